#include "curlflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "curlflow/error.hpp"
#include "curlflow/field_io.hpp"

namespace curlflow {

int histogram_bin(double value) {
    if (!(value > 1e-16)) return 0;
    const int b = static_cast<int>(std::floor((std::log10(value) + 16.0) * 2.0));
    return std::clamp(b, 0, kHistogramBins - 1);
}

namespace {

bool near_kink(double s, double h, double margin) {
    const double t = s / (0.5 * h);
    return std::abs(t - std::round(t)) * 0.5 * h < margin;
}

template <class V>
std::vector<double> to_vector(const V& x) {
    std::vector<double> out(Box<V>::kDim);
    for (int a = 0; a < Box<V>::kDim; ++a) out[a] = x[a];
    return out;
}

template <class V, class S, class Solid>
DivergenceReport divergence_impl(const S& s, double h, std::size_t n, std::uint64_t seed,
                                 const Solid* solid, DivergenceOptions opt, bool parallel) {
    constexpr int dim = Box<V>::kDim;
    if (n == 0) throw ConfigError("sample_divergence: n_points must be positive");
    if (!(h > 0.0)) throw ConfigError("sample_divergence: h must be positive");
    const double eps = opt.eps_over_h * h;
    if (!(eps > 0.0) || eps > 0.1 * h) throw ConfigError("sample_divergence: eps must be in (0, h/10]");
    const auto box = s.domain();
    std::mt19937_64 rng(seed);
    std::vector<std::uniform_real_distribution<double>> dist;
    for (int a = 0; a < dim; ++a) dist.emplace_back(box.lo[a] + eps, box.hi[a] - eps);

    // Candidates are drawn serially so the point set depends on the seed alone.
    std::vector<V> pts;
    pts.reserve(n);
    const double margin = opt.kink_margin * eps;
    std::size_t attempts = 0;
    while (pts.size() < n) {
        if (++attempts > 1000 * n + 1000000)
            throw ConfigError("sample_divergence: no admissible sample points");
        V x{};
        for (int a = 0; a < dim; ++a) x[a] = dist[a](rng);
        bool reject = false;
        for (int a = 0; a < dim && !reject; ++a)
            reject = margin > 0.0 && near_kink(x[a] - box.lo[a], h, margin);
        if (reject) continue;
        if (solid && solid->sample(x).d < 2.0 * eps) continue;
        pts.push_back(x);
    }

    std::vector<double> div(n), speed(n);
    auto eval = [&](std::size_t p) {
        const V x = pts[p];
        double d = 0.0;
        for (int a = 0; a < dim; ++a) {
            V xp = x, xm = x;
            xp[a] += eps;
            xm[a] -= eps;
            d += (s.velocity(xp)[a] - s.velocity(xm)[a]) / (2.0 * eps);
        }
        div[p] = std::abs(d);
        speed[p] = norm(s.velocity(x));
    };
    const long long nn = static_cast<long long>(n);
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 64)
        for (long long p = 0; p < nn; ++p) eval(static_cast<std::size_t>(p));
    } else {
        for (long long p = 0; p < nn; ++p) eval(static_cast<std::size_t>(p));
    }

    DivergenceReport r;
    r.samples = n;
    r.eps = eps;
    r.h = h;
    r.seed = seed;
    r.max_speed = *std::max_element(speed.begin(), speed.end());
    const double scale = r.max_speed > 0.0 ? h / r.max_speed : 0.0;
    double sum = 0.0, sq = 0.0;
    std::size_t worst = 0;
    for (std::size_t p = 0; p < n; ++p) {
        const double v = div[p] * scale;
        sum += v;
        sq += v * v;
        if (v > r.max) {
            r.max = v;
            worst = p;
        }
        ++r.histogram[histogram_bin(v)];
    }
    r.mean = sum / n;
    r.rms = std::sqrt(sq / n);
    r.worst_point = to_vector(pts[worst]);
    return r;
}

double erf_mass(double lo, double hi, double x, double bw) {
    const double s = 1.0 / (std::sqrt(2.0) * bw);
    return 0.5 * (std::erf((hi - x) * s) - std::erf((lo - x) * s));
}

template <class V, class Desc, class Solid>
UniformityReport uniformity_impl(const ParticleSet<V>& ps, const Desc& g, int refine,
                                 const Solid* solid) {
    constexpr int dim = Box<V>::kDim;
    if (refine < 1) throw ConfigError("uniformity: refine must be >= 1");
    std::vector<V> pts;
    for (std::size_t p = 0; p < ps.size(); ++p)
        if (ps.status[p] == ParticleStatus::Active) pts.push_back(ps.pos[p]);
    UniformityReport r;
    r.particles = pts.size();
    r.bandwidth = 2.0 * g.h;
    if (pts.size() < 2) throw ConfigError("uniformity: needs at least two active particles");
    const auto box = g.bounds();
    const double bw = r.bandwidth;
    const std::size_t n = pts.size();

    std::vector<double> inv_mass(n);
    for (std::size_t p = 0; p < n; ++p) {
        double m = 1.0;
        for (int a = 0; a < dim; ++a) m *= erf_mass(box.lo[a], box.hi[a], pts[p][a], bw);
        inv_mass[p] = m > 0.0 ? 1.0 / m : 0.0;
    }
    const double norm_c = std::pow(2.0 * std::numbers::pi * bw * bw, -0.5 * dim);
    const double cut2 = 16.0 * bw * bw;
    std::vector<double> rho(n);
    const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 64)
    for (long long i = 0; i < nn; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const V d = pts[i] - pts[j];
            const double r2 = dot(d, d);
            if (r2 < cut2) acc += std::exp(-0.5 * r2 / (bw * bw));
        }
        rho[i] = acc * norm_c * inv_mass[i];
    }
    double mean = 0.0;
    for (double v : rho) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : rho) var += (v - mean) * (v - mean);
    var /= n;
    r.mean_density = mean;
    r.density_cov = mean > 0.0 ? std::sqrt(var) / mean : 0.0;

    int cells[3] = {g.nx * refine, g.ny * refine, 1};
    if constexpr (dim == 3) cells[2] = g.nz * refine;
    const double ch = g.h / refine;
    std::vector<char> occupied(static_cast<std::size_t>(cells[0]) * cells[1] * cells[2], 0);
    auto flat = [&](const int* c) {
        return (static_cast<std::size_t>(c[2]) * cells[1] + c[1]) * cells[0] + c[0];
    };
    for (const V& x : pts) {
        int c[3] = {0, 0, 0};
        for (int a = 0; a < dim; ++a)
            c[a] = std::clamp(static_cast<int>(std::floor((x[a] - box.lo[a]) / ch)), 0, cells[a] - 1);
        occupied[flat(c)] = 1;
    }
    int counted = 0, empty = 0;
    for (int k = 0; k < cells[2]; ++k)
        for (int j = 0; j < cells[1]; ++j)
            for (int i = 0; i < cells[0]; ++i) {
                const int c[3] = {i, j, k};
                V center = box.lo;
                for (int a = 0; a < dim; ++a) center[a] += (c[a] + 0.5) * ch;
                if (solid && solid->sample(center).d < 0.0) continue;
                ++counted;
                empty += !occupied[flat(c)];
            }
    r.analysis_cells = counted;
    r.empty_fraction = counted > 0 ? static_cast<double>(empty) / counted : 0.0;
    return r;
}

template <class V, class Measure>
FluxScan wall_scan_impl(const Box<V>& box, int wall, std::size_t n, std::uint64_t seed, Measure measure) {
    constexpr int dim = Box<V>::kDim;
    if (wall < 0 || wall >= 2 * dim) throw ConfigError("wall scan: wall index out of range");
    const int axis = wall / 2;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    FluxScan r;
    r.samples = n;
    double sum = 0.0;
    V worst{};
    for (std::size_t p = 0; p < n; ++p) {
        V x{};
        for (int a = 0; a < dim; ++a) x[a] = box.lo[a] + u01(rng) * (box.hi[a] - box.lo[a]);
        x[axis] = wall % 2 == 0 ? box.lo[axis] : box.hi[axis];
        const double f = measure(x, axis);
        sum += f;
        if (f > r.max || p == 0) {
            r.max = f;
            worst = x;
        }
    }
    r.mean = n > 0 ? sum / n : 0.0;
    if (n > 0) r.worst_point = to_vector(worst);
    return r;
}

template <class V, class Solid, class B, class Measure>
FluxScan solid_scan_impl(const Solid& solid, const B& box, std::size_t n, std::uint64_t seed,
                         Measure measure) {
    constexpr int dim = Box<V>::kDim;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    FluxScan r;
    r.samples = n;
    double sum = 0.0;
    V worst{};
    for (std::size_t p = 0; p < n; ++p) {
        V x{};
        for (int a = 0; a < dim; ++a) x[a] = box.lo[a] + u01(rng) * (box.hi[a] - box.lo[a]);
        const auto cp = closest_point(solid, x);
        const auto ds = solid.sample(cp.cp);
        const double gn = norm(ds.grad);
        const V nrm = gn > 0.0 ? ds.grad * (1.0 / gn) : V{};
        const double f = measure(cp.cp, nrm);
        sum += f;
        if (f > r.max || p == 0) {
            r.max = f;
            worst = cp.cp;
        }
    }
    r.mean = n > 0 ? sum / n : 0.0;
    if (n > 0) r.worst_point = to_vector(worst);
    return r;
}

}  // namespace

DivergenceReport sample_divergence(const VelocitySampler2& s, double h, std::size_t n,
                                   std::uint64_t seed, const SolidField2* solid,
                                   DivergenceOptions opt) {
    return divergence_impl<Vec2>(s, h, n, seed, solid, opt, true);
}

DivergenceReport sample_divergence(const VelocitySampler3& s, double h, std::size_t n,
                                   std::uint64_t seed, const SolidField3* solid,
                                   DivergenceOptions opt) {
    return divergence_impl<Vec3>(s, h, n, seed, solid, opt, true);
}

namespace serial {
DivergenceReport sample_divergence(const VelocitySampler2& s, double h, std::size_t n,
                                   std::uint64_t seed, const SolidField2* solid,
                                   DivergenceOptions opt) {
    return divergence_impl<Vec2>(s, h, n, seed, solid, opt, false);
}
DivergenceReport sample_divergence(const VelocitySampler3& s, double h, std::size_t n,
                                   std::uint64_t seed, const SolidField3* solid,
                                   DivergenceOptions opt) {
    return divergence_impl<Vec3>(s, h, n, seed, solid, opt, false);
}
}  // namespace serial

UniformityReport uniformity(const ParticleSet2& ps, const GridDesc2& g, int refine,
                            const SolidField2* solid) {
    return uniformity_impl(ps, g, refine, solid);
}

UniformityReport uniformity(const ParticleSet3& ps, const GridDesc3& g, int refine,
                            const SolidField3* solid) {
    return uniformity_impl(ps, g, refine, solid);
}

FluxScan wall_flux_scan(const VelocitySampler3& s, int wall, std::size_t n, std::uint64_t seed) {
    return wall_scan_impl<Vec3>(s.domain(), wall, n, seed,
                                [&](Vec3 x, int axis) { return std::abs(s.velocity(x)[axis]); });
}

FluxScan wall_flux_scan(const VelocitySampler2& s, int wall, std::size_t n, std::uint64_t seed) {
    return wall_scan_impl<Vec2>(s.domain(), wall, n, seed,
                                [&](Vec2 x, int axis) { return std::abs(s.velocity(x)[axis]); });
}

FluxScan solid_flux_scan(const VelocitySampler3& s, const SolidField3& solid, const Box3& box,
                         std::size_t n, std::uint64_t seed) {
    return solid_scan_impl<Vec3>(solid, box, n, seed,
                                 [&](Vec3 x, Vec3 nrm) { return std::abs(dot(s.velocity(x), nrm)); });
}

FluxScan solid_flux_scan(const VelocitySampler2& s, const SolidField2& solid, const Box2& box,
                         std::size_t n, std::uint64_t seed) {
    return solid_scan_impl<Vec2>(solid, box, n, seed,
                                 [&](Vec2 x, Vec2 nrm) { return std::abs(dot(s.velocity(x), nrm)); });
}

FluxScan wall_tangential_error(const VelocitySampler2& s, const VelocitySampler2& ref, int wall,
                               std::size_t n, std::uint64_t seed) {
    return wall_scan_impl<Vec2>(s.domain(), wall, n, seed, [&](Vec2 x, int axis) {
        const int t = 1 - axis;
        return std::abs(s.velocity(x)[t] - ref.velocity(x)[t]);
    });
}

FluxScan solid_tangential_error(const VelocitySampler2& s, const VelocitySampler2& ref,
                                const SolidField2& solid, const Box2& box, std::size_t n,
                                std::uint64_t seed) {
    return solid_scan_impl<Vec2>(solid, box, n, seed, [&](Vec2 x, Vec2 nrm) {
        const Vec2 t{-nrm.y, nrm.x};
        return std::abs(dot(s.velocity(x) - ref.velocity(x), t));
    });
}

std::string summary_line(const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string out;
    for (const auto& [k, v] : kv) {
        if (!out.empty()) out += ' ';
        out += k + '=' + v;
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> summary_fields(const std::string& label,
                                                                const DivergenceReport& r) {
    return {{label + ".samples", std::to_string(r.samples)},
            {label + ".eps", format_double(r.eps)},
            {label + ".max_speed", format_double(r.max_speed)},
            {label + ".div_max", format_double(r.max)},
            {label + ".div_mean", format_double(r.mean)},
            {label + ".div_rms", format_double(r.rms)},
            {label + ".seed", std::to_string(r.seed)}};
}

std::vector<std::pair<std::string, std::string>> summary_fields(const std::string& label,
                                                                const UniformityReport& r) {
    return {{label + ".particles", std::to_string(r.particles)},
            {label + ".density_cov", format_double(r.density_cov)},
            {label + ".empty_fraction", format_double(r.empty_fraction)},
            {label + ".analysis_cells", std::to_string(r.analysis_cells)}};
}

void write_histogram_csv(std::ostream& os, const DivergenceReport& r) {
    os << "bin_lo,bin_hi,count\n";
    for (int b = 0; b < kHistogramBins; ++b)
        os << format_double(std::pow(10.0, -16.0 + 0.5 * b)) << ','
           << format_double(std::pow(10.0, -16.0 + 0.5 * (b + 1))) << ',' << r.histogram[b] << '\n';
}

}  // namespace curlflow
