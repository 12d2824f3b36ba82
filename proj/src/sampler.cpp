#include "curlflow/sampler.hpp"

#include <cmath>

#include "curlflow/error.hpp"

namespace curlflow {

const char* scheme_name(DirectScheme s) {
    return s == DirectScheme::Linear ? "direct_linear" : "direct_monotone_cubic";
}

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

// Lattice cell base and fraction along one axis with n samples.
inline void locate(double s, int n, int& i, double& t) {
    if (n == 1) {
        i = 0;
        t = 0.0;
        return;
    }
    i = clampi(static_cast<int>(std::floor(s)), 0, n - 2);
    t = std::min(std::max(s - i, 0.0), 1.0);
}

}  // namespace

double interp_linear(const Array2& a, Vec2 origin, double h, Vec2 x) {
    int i, j;
    double tx, ty;
    locate((x.x - origin.x) / h, a.nx(), i, tx);
    locate((x.y - origin.y) / h, a.ny(), j, ty);
    const int i1 = std::min(i + 1, a.nx() - 1), j1 = std::min(j + 1, a.ny() - 1);
    double lo = (1.0 - tx) * a(i, j) + tx * a(i1, j);
    double hi = (1.0 - tx) * a(i, j1) + tx * a(i1, j1);
    return (1.0 - ty) * lo + ty * hi;
}

double interp_linear(const Array3& a, Vec3 origin, double h, Vec3 x) {
    int i, j, k;
    double tx, ty, tz;
    locate((x.x - origin.x) / h, a.nx(), i, tx);
    locate((x.y - origin.y) / h, a.ny(), j, ty);
    locate((x.z - origin.z) / h, a.nz(), k, tz);
    const int i1 = std::min(i + 1, a.nx() - 1), j1 = std::min(j + 1, a.ny() - 1),
              k1 = std::min(k + 1, a.nz() - 1);
    auto plane = [&](int kk) {
        double lo = (1.0 - tx) * a(i, j, kk) + tx * a(i1, j, kk);
        double hi = (1.0 - tx) * a(i, j1, kk) + tx * a(i1, j1, kk);
        return (1.0 - ty) * lo + ty * hi;
    };
    return (1.0 - tz) * plane(k) + tz * plane(k1);
}

double monotone_cubic_1d(double p0, double p1, double p2, double p3, double t) {
    const double d0 = p1 - p0, d1 = p2 - p1, d2 = p3 - p2;
    double m1 = 0.0, m2 = 0.0;
    if (d1 != 0.0) {
        m1 = d0 * d1 > 0.0 ? 0.5 * (d0 + d1) : 0.0;
        m2 = d1 * d2 > 0.0 ? 0.5 * (d1 + d2) : 0.0;
        const double a = m1 / d1, b = m2 / d1, s = a * a + b * b;
        if (s > 9.0) {
            const double tau = 3.0 / std::sqrt(s);
            m1 = tau * a * d1;
            m2 = tau * b * d1;
        }
    }
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p1 + (t3 - 2 * t2 + t) * m1 + (-2 * t3 + 3 * t2) * p2 +
           (t3 - t2) * m2;
}

double interp_monotone_cubic(const Array2& a, Vec2 origin, double h, Vec2 x) {
    int i, j;
    double tx, ty;
    locate((x.x - origin.x) / h, a.nx(), i, tx);
    locate((x.y - origin.y) / h, a.ny(), j, ty);
    double rows[4];
    for (int b = 0; b < 4; ++b) {
        const int jj = clampi(j - 1 + b, 0, a.ny() - 1);
        double p[4];
        for (int c = 0; c < 4; ++c) p[c] = a(clampi(i - 1 + c, 0, a.nx() - 1), jj);
        rows[b] = monotone_cubic_1d(p[0], p[1], p[2], p[3], tx);
    }
    return monotone_cubic_1d(rows[0], rows[1], rows[2], rows[3], ty);
}

double interp_monotone_cubic(const Array3& a, Vec3 origin, double h, Vec3 x) {
    int i, j, k;
    double tx, ty, tz;
    locate((x.x - origin.x) / h, a.nx(), i, tx);
    locate((x.y - origin.y) / h, a.ny(), j, ty);
    locate((x.z - origin.z) / h, a.nz(), k, tz);
    double planes[4];
    for (int d = 0; d < 4; ++d) {
        const int kk = clampi(k - 1 + d, 0, a.nz() - 1);
        double rows[4];
        for (int b = 0; b < 4; ++b) {
            const int jj = clampi(j - 1 + b, 0, a.ny() - 1);
            double p[4];
            for (int c = 0; c < 4; ++c) p[c] = a(clampi(i - 1 + c, 0, a.nx() - 1), jj, kk);
            rows[b] = monotone_cubic_1d(p[0], p[1], p[2], p[3], tx);
        }
        planes[d] = monotone_cubic_1d(rows[0], rows[1], rows[2], rows[3], ty);
    }
    return monotone_cubic_1d(planes[0], planes[1], planes[2], planes[3], tz);
}

void extrapolate_into_solid(Array2& a, const Array2& weight, int layers) {
    if (!a.same_shape(weight)) throw DimensionError("extrapolation weights disagree in extent");
    std::vector<unsigned char> known(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) known[n] = weight.data()[n] > 0.0;
    for (int layer = 0; layer < layers; ++layer) {
        std::vector<std::pair<std::size_t, double>> fill;
        for (int j = 0; j < a.ny(); ++j)
            for (int i = 0; i < a.nx(); ++i) {
                if (known[a.index(i, j)]) continue;
                double sum = 0.0;
                int cnt = 0;
                const Index2 nb[4] = {{i - 1, j}, {i + 1, j}, {i, j - 1}, {i, j + 1}};
                for (Index2 m : nb)
                    if (a.in_range(m.i, m.j) && known[a.index(m.i, m.j)]) {
                        sum += a(m.i, m.j);
                        ++cnt;
                    }
                if (cnt > 0) fill.emplace_back(a.index(i, j), sum / cnt);
            }
        for (auto [n, v] : fill) {
            a.data()[n] = v;
            known[n] = 1;
        }
    }
}

void extrapolate_into_solid(Array3& a, const Array3& weight, int layers) {
    if (!a.same_shape(weight)) throw DimensionError("extrapolation weights disagree in extent");
    std::vector<unsigned char> known(a.size());
    for (std::size_t n = 0; n < a.size(); ++n) known[n] = weight.data()[n] > 0.0;
    for (int layer = 0; layer < layers; ++layer) {
        std::vector<std::pair<std::size_t, double>> fill;
        for (int k = 0; k < a.nz(); ++k)
            for (int j = 0; j < a.ny(); ++j)
                for (int i = 0; i < a.nx(); ++i) {
                    if (known[a.index(i, j, k)]) continue;
                    double sum = 0.0;
                    int cnt = 0;
                    const Index3 nb[6] = {{i - 1, j, k}, {i + 1, j, k}, {i, j - 1, k},
                                          {i, j + 1, k}, {i, j, k - 1}, {i, j, k + 1}};
                    for (Index3 m : nb)
                        if (a.in_range(m.i, m.j, m.k) && known[a.index(m.i, m.j, m.k)]) {
                            sum += a(m.i, m.j, m.k);
                            ++cnt;
                        }
                    if (cnt > 0) fill.emplace_back(a.index(i, j, k), sum / cnt);
                }
        for (auto [n, v] : fill) {
            a.data()[n] = v;
            known[n] = 1;
        }
    }
}

DirectSampler2::DirectSampler2(MacField2 f, DirectScheme s, const CutCells2* geom)
    : f_(std::move(f)), s_(s) {
    f_.check();
    if (geom) {
        extrapolate_into_solid(f_.u, geom->faces.u);
        extrapolate_into_solid(f_.v, geom->faces.v);
    }
}

Vec2 DirectSampler2::velocity(Vec2 x) const {
    const auto& g = f_.desc;
    x = g.bounds().clamp(x);
    Vec2 ou = g.origin + stagger_offset(Stagger2::UFace) * g.h;
    Vec2 ov = g.origin + stagger_offset(Stagger2::VFace) * g.h;
    if (s_ == DirectScheme::Linear)
        return {interp_linear(f_.u, ou, g.h, x), interp_linear(f_.v, ov, g.h, x)};
    return {interp_monotone_cubic(f_.u, ou, g.h, x), interp_monotone_cubic(f_.v, ov, g.h, x)};
}

std::string DirectSampler2::name() const { return scheme_name(s_); }

DirectSampler3::DirectSampler3(MacField3 f, DirectScheme s, const CutCells3* geom)
    : f_(std::move(f)), s_(s) {
    f_.check();
    if (geom) {
        extrapolate_into_solid(f_.u, geom->faces.u);
        extrapolate_into_solid(f_.v, geom->faces.v);
        extrapolate_into_solid(f_.w, geom->faces.w);
    }
}

Vec3 DirectSampler3::velocity(Vec3 x) const {
    const auto& g = f_.desc;
    x = g.bounds().clamp(x);
    Vec3 ou = g.origin + stagger_offset(Stagger3::UFace) * g.h;
    Vec3 ov = g.origin + stagger_offset(Stagger3::VFace) * g.h;
    Vec3 ow = g.origin + stagger_offset(Stagger3::WFace) * g.h;
    if (s_ == DirectScheme::Linear)
        return {interp_linear(f_.u, ou, g.h, x), interp_linear(f_.v, ov, g.h, x),
                interp_linear(f_.w, ow, g.h, x)};
    return {interp_monotone_cubic(f_.u, ou, g.h, x), interp_monotone_cubic(f_.v, ov, g.h, x),
            interp_monotone_cubic(f_.w, ow, g.h, x)};
}

std::string DirectSampler3::name() const { return scheme_name(s_); }

CurlFlowSampler2::CurlFlowSampler2(std::shared_ptr<const StreamField2> sf, KernelOrder k)
    : sf_(std::move(sf)), k_(k) {}

void CurlFlowSampler2::enable_ramp(std::vector<RampBoundary2> bounds, RampParams p,
                                   RampCounters* counters) {
    ramp_.emplace(sf_.get(), k_, std::move(bounds), p, counters);
}

ValueGrad2 CurlFlowSampler2::psi(Vec2 x) const {
    x = sf_->desc.bounds().clamp(x);
    return ramp_ ? ramp_->eval(x) : eval_psi_grad(*sf_, x, k_);
}

Vec2 CurlFlowSampler2::velocity(Vec2 x) const {
    ValueGrad2 r = psi(x);
    return {r.grad.y, -r.grad.x};
}

std::string CurlFlowSampler2::name() const {
    return std::string("curlflow_") + kernel_name(k_) + (ramp_ ? "+ramp" : "");
}

CurlFlowSampler3::CurlFlowSampler3(std::shared_ptr<const PotentialInterpolant3> psi, KernelOrder k)
    : psi_(std::move(psi)), k_(k) {}

void CurlFlowSampler3::enable_wall_ramp(std::vector<int> walls, RampParams p) {
    ramp_.emplace(psi_.get(), k_, std::move(walls), p);
}

PotentialSample3 CurlFlowSampler3::potential(Vec3 x) const {
    x = psi_->desc().bounds().clamp(x);
    return ramp_ ? ramp_->eval(x) : psi_->sample(x, k_);
}

Vec3 CurlFlowSampler3::velocity(Vec3 x) const { return curl_of(potential(x).jac); }

std::string CurlFlowSampler3::name() const {
    return std::string("curlflow_") + kernel_name(k_) + (ramp_ ? "+wall_ramp" : "");
}

VelocityRampSampler3::VelocityRampSampler3(std::shared_ptr<const VelocitySampler3> inner,
                                           std::shared_ptr<const SolidField3> solid, RampParams p,
                                           Vec3 u_solid, RampCounters* counters)
    : inner_(std::move(inner)), solid_(std::move(solid)), p_(p), u_solid_(u_solid),
      counters_(counters) {
    p_.validate();
}

Vec3 VelocityRampSampler3::velocity(Vec3 x) const {
    x = inner_->domain().clamp(x);
    VelocityFn3 u = [this](Vec3 y) { return inner_->velocity(y); };
    return ramp_normal_velocity(u, x, *solid_, u_solid_, p_, counters_);
}

Vec3 RbfAugmentedSampler3::velocity(Vec3 x) const {
    x = inner_->domain().clamp(x);
    return inner_->velocity(x) + model_->eval(x);
}

Vec3 SummedSampler3::velocity(Vec3 x) const { return a_->velocity(x) + b_->velocity(x); }

}  // namespace curlflow
