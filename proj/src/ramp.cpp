#include "curlflow/ramp.hpp"

#include <cmath>

#include "curlflow/error.hpp"

namespace curlflow {

const char* profile_name(RampProfile p) {
    return p == RampProfile::BridsonRamp ? "bridson_ramp" : "smoothstep";
}

const char* mode_name(RampMode m) {
    switch (m) {
        case RampMode::Additive: return "additive";
        case RampMode::MultiplicativeTargeted: return "multiplicative_targeted";
        case RampMode::MultiplicativeZero: return "multiplicative_zero";
    }
    return "?";
}

RampProfile parse_profile(const std::string& s) {
    if (s == "bridson_ramp") return RampProfile::BridsonRamp;
    if (s == "smoothstep") return RampProfile::Smoothstep;
    throw ConfigError("unknown ramp profile '" + s + "'");
}

RampMode parse_mode(const std::string& s) {
    if (s == "additive") return RampMode::Additive;
    if (s == "multiplicative_targeted") return RampMode::MultiplicativeTargeted;
    if (s == "multiplicative_zero") return RampMode::MultiplicativeZero;
    throw ConfigError("unknown ramp mode '" + s + "'");
}

void RampParams::validate() const {
    if (!(d0 > 0.0) || !std::isfinite(d0)) throw ConfigError("ramp d0 must be positive");
}

double profile_eval(RampProfile p, double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    if (p == RampProfile::Smoothstep) return t * t * (3.0 - 2.0 * t);
    double t2 = t * t;
    return t * (15.0 - 10.0 * t2 + 3.0 * t2 * t2) / 8.0;
}

double profile_slope(RampProfile p, double t) {
    if (t < 0.0 || t >= 1.0) return 0.0;
    if (p == RampProfile::Smoothstep) return 6.0 * t * (1.0 - t);
    double t2 = t * t;
    return (15.0 - 30.0 * t2 + 15.0 * t2 * t2) / 8.0;
}

namespace {

template <class V, class M>
struct RampGeom {
    double d = 0.0;
    V n{};    // unit gradient of d
    M jcp{};  // Jacobian of the closest-point map
};

// One scalar ramp. value/grad at x and at cp; target psi_c.
template <class V, class M>
void ramp_scalar(RampMode mode, const RampParams& p, const RampGeom<V, M>& geo, double vx,
                 const V& gx, double vcp, const V& gcp, double target, double& out, V& gout) {
    const double t = geo.d / p.d0;
    const double a = profile_eval(p.profile, t);
    const V da = geo.n * (profile_slope(p.profile, t) / p.d0);
    switch (mode) {
        case RampMode::Additive: {
            out = vx + (target - vcp) * (1.0 - a);
            gout = gx - (geo.jcp.transposed() * gcp) * (1.0 - a) - da * (target - vcp);
            return;
        }
        case RampMode::MultiplicativeTargeted:
            out = a * vx + (1.0 - a) * target;
            gout = gx * a + da * (vx - target);
            return;
        case RampMode::MultiplicativeZero:
            out = a * vx;
            gout = gx * a + da * vx;
            return;
    }
}

class PartView2 : public SolidField2 {
public:
    PartView2(const SolidField2& s, int id) : s_(s), id_(id) {}
    DistanceSample2 sample(Vec2 x) const override { return s_.sample_solid(id_, x); }

private:
    const SolidField2& s_;
    int id_;
};

Vec2 axis2(int a, double s) { return a == 0 ? Vec2{s, 0.0} : Vec2{0.0, s}; }

Vec3 axis3(int a, double s) {
    Vec3 v;
    v[a] = s;
    return v;
}

}  // namespace

RampBoundary2 RampBoundary2::domain_wall(const GridDesc2& g, int wall, double psi_c) {
    if (wall < 0 || wall > 3) throw DomainError("2D wall index out of range");
    RampBoundary2 b;
    b.kind = Kind::Wall;
    b.wall = wall;
    b.box = g.bounds();
    b.psi_c = psi_c;
    return b;
}

RampBoundary2 RampBoundary2::solid_part(std::shared_ptr<const SolidField2> s, int id,
                                        double psi_c) {
    RampBoundary2 b;
    b.kind = Kind::Solid;
    b.solid = std::move(s);
    b.solid_id = id;
    b.psi_c = psi_c;
    return b;
}

DistanceSample2 RampBoundary2::distance(Vec2 x) const {
    if (kind == Kind::Solid) return solid->sample_solid(solid_id, x);
    const int a = wall / 2;
    const bool hi = wall % 2 == 1;
    DistanceSample2 s;
    s.d = hi ? box.hi[a] - x[a] : x[a] - box.lo[a];
    s.grad = axis2(a, hi ? -1.0 : 1.0);
    return s;
}

ClosestPoint2 RampBoundary2::closest(Vec2 x) const {
    if (kind == Kind::Solid) return closest_point(PartView2(*solid, solid_id), x);
    DistanceSample2 s = distance(x);
    ClosestPoint2 c;
    c.dist = s.d;
    c.normal = s.grad;
    c.cp = x - s.grad * s.d;
    return c;
}

ValueGrad2 ramp_psi_2d(const PsiFn2& psi, Vec2 x, const RampBoundary2& b, const RampParams& p,
                       RampCounters* counters) {
    ValueGrad2 at_x = psi(x);
    DistanceSample2 ds = b.distance(x);
    if (ds.d >= p.d0) return at_x;
    RampGeom<Vec2, Mat2> geo;
    geo.d = std::max(ds.d, 0.0);
    double gn = norm(ds.grad);
    RampMode mode = p.mode;
    ValueGrad2 at_cp;
    if (mode == RampMode::Additive) {
        ClosestPoint2 c = b.closest(x);
        if (c.degenerate || gn < 1e-10) {
            mode = RampMode::MultiplicativeTargeted;
            if (counters) counters->degenerate.fetch_add(1, std::memory_order_relaxed);
        } else {
            at_cp = psi(c.cp);
            geo.jcp = Mat2::identity() - outer(ds.grad / gn, ds.grad / gn) - ds.hess * ds.d;
        }
    }
    geo.n = gn > 0.0 ? ds.grad / gn : Vec2{};
    ValueGrad2 r;
    ramp_scalar(mode, p, geo, at_x.value, at_x.grad, at_cp.value, at_cp.grad, b.psi_c, r.value,
                r.grad);
    return r;
}

RampedStream2::RampedStream2(const StreamField2* sf, KernelOrder k,
                             std::vector<RampBoundary2> bounds, RampParams p,
                             RampCounters* counters)
    : sf_(sf), k_(k), bounds_(std::move(bounds)), p_(p), counters_(counters) {
    p_.validate();
}

ValueGrad2 RampedStream2::eval_level(int level, Vec2 x) const {
    if (level == 0) return eval_psi_grad(*sf_, sf_->desc.bounds().clamp(x), k_);
    const RampBoundary2& b = bounds_[static_cast<std::size_t>(level - 1)];
    PsiFn2 inner = [&](Vec2 y) { return eval_level(level - 1, y); };
    return ramp_psi_2d(inner, x, b, p_, counters_);
}

std::vector<RampBoundary2> ramp_boundaries_2d(const StreamField2& sf, const DomainBc& bc,
                                              std::shared_ptr<const SolidField2> solids) {
    const auto& g = sf.desc;
    std::vector<RampBoundary2> out;
    const Index2 corner[4] = {{0, 0}, {g.nx, 0}, {0, 0}, {0, g.ny}};
    for (int wall = 0; wall < 4; ++wall)
        if (bc.walls[wall].kind == WallKind::Closed)
            out.push_back(RampBoundary2::domain_wall(g, wall, sf.node(corner[wall].i, corner[wall].j)));
    if (!solids || sf.solid_component.empty()) return out;
    for (int id = 0; id < solids->solid_count(); ++id) {
        double deepest = 0.0;
        int comp = -1;
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i) {
                double d = solids->sample_solid(id, g.node_position(i, j)).d;
                if (d < deepest && sf.component(i, j) >= 0) {
                    deepest = d;
                    comp = sf.component(i, j);
                }
            }
        if (comp < 0) continue;
        out.push_back(RampBoundary2::solid_part(solids, id,
                                                sf.constants[static_cast<std::size_t>(comp)].psi_c));
    }
    return out;
}

PotentialSample3 ramp_tangential_psi_3d(const PotentialFn3& psi, Vec3 x, const Box3& box,
                                        int wall, const RampParams& p) {
    if (wall < 0 || wall > 5) throw DomainError("wall index out of range");
    const int a = wall / 2;
    const bool hi = wall % 2 == 1;
    const double d = hi ? box.hi[a] - x[a] : x[a] - box.lo[a];
    PotentialSample3 sx = psi(x);
    if (d >= p.d0) return sx;
    RampGeom<Vec3, Mat3> geo;
    geo.d = std::max(d, 0.0);
    geo.n = axis3(a, hi ? -1.0 : 1.0);
    geo.jcp = Mat3::identity() - outer(geo.n, geo.n);
    Vec3 cp = x;
    cp[a] = hi ? box.hi[a] : box.lo[a];
    PotentialSample3 scp = psi(cp);
    PotentialSample3 out = sx;
    for (int c = 0; c < 3; ++c) {
        if (c == a) continue;
        Vec3 gx{sx.jac[c][0], sx.jac[c][1], sx.jac[c][2]};
        Vec3 gcp{scp.jac[c][0], scp.jac[c][1], scp.jac[c][2]};
        double v = 0.0;
        Vec3 gv;
        ramp_scalar(p.mode, p, geo, sx.value[c], gx, scp.value[c], gcp, 0.0, v, gv);
        out.value[c] = v;
        for (int b = 0; b < 3; ++b) out.jac[c][b] = gv[b];
    }
    return out;
}

RampedPotential3::RampedPotential3(const PotentialInterpolant3* psi, KernelOrder k,
                                   std::vector<int> walls, RampParams p)
    : psi_(psi), k_(k), walls_(std::move(walls)), p_(p) {
    p_.validate();
}

PotentialSample3 RampedPotential3::eval_level(int level, Vec3 x) const {
    if (level == 0) return psi_->sample(psi_->desc().bounds().clamp(x), k_);
    PotentialFn3 inner = [&](Vec3 y) { return eval_level(level - 1, y); };
    return ramp_tangential_psi_3d(inner, x, psi_->desc().bounds(),
                                  walls_[static_cast<std::size_t>(level - 1)], p_);
}

Vec3 ramp_normal_velocity(const VelocityFn3& u, Vec3 x, const SolidField3& solid, Vec3 u_solid,
                          const RampParams& p, RampCounters* counters) {
    Vec3 ux = u(x);
    DistanceSample3 ds = solid.sample(x);
    if (ds.d >= p.d0) return ux;
    double gn = norm(ds.grad);
    ClosestPoint3 c = closest_point(solid, x);
    if (gn < 1e-10 || c.degenerate) {
        if (counters) counters->skipped.fetch_add(1, std::memory_order_relaxed);
        return ux;
    }
    Vec3 n = ds.grad / gn;
    double a = profile_eval(p.profile, std::max(ds.d, 0.0) / p.d0);
    double shift = (dot(u_solid, n) - dot(u(c.cp), n)) * (1.0 - a);
    return ux + n * shift;
}

}  // namespace curlflow
