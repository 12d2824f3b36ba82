#include "curlflow/rbf.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "curlflow/error.hpp"

namespace curlflow {

RbfParams RbfParams::for_spacing(double h) {
    RbfParams p;
    p.sigma = 1.2 * h;
    p.cutoff = 3.0 * p.sigma;
    p.nu = 3;
    return p;
}

void RbfParams::validate() const {
    if (!(sigma > 0.0) || !(cutoff > 0.0)) throw ConfigError("RBF sigma and cutoff must be positive");
    if (nu < 2) throw ConfigError("RBF exponent nu must be at least 2");
}

Mat3 matrix_kernel(Vec3 dx, const RbfParams& p) {
    const double s = dot(dx, dx);
    const double c2 = p.cutoff * p.cutoff;
    Mat3 m;
    if (s >= c2) return m;
    const double s2 = p.sigma * p.sigma;
    const double q = 1.0 - s / c2;
    const double e = std::exp(-s / s2);
    const double nu = p.nu;
    const double qn2 = std::pow(q, nu - 2.0);
    const double f1 = e * qn2 * q * (-q / s2 - nu / c2);
    const double f2 = e * qn2 * (q * q / (s2 * s2) + 2.0 * nu * q / (s2 * c2) + nu * (nu - 1.0) / (c2 * c2));
    const double diag = -4.0 * (f1 + f2 * s);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m[a][b] = 4.0 * f2 * dx[a] * dx[b] + (a == b ? diag : 0.0);
    return m;
}

CenterHash::CenterHash(const std::vector<Vec3>& pts, double cell) : cell_(cell) {
    for (std::size_t n = 0; n < pts.size(); ++n) insert(pts[n], static_cast<int>(n));
}

void CenterHash::insert(Vec3 x, int index) {
    buckets_[key(static_cast<long long>(std::floor(x.x / cell_)),
                 static_cast<long long>(std::floor(x.y / cell_)),
                 static_cast<long long>(std::floor(x.z / cell_)))]
        .push_back(index);
}

void RbfModel::rebuild_hash() { hash = CenterHash(centers, params.cutoff); }

Vec3 RbfModel::eval(Vec3 x) const {
    Vec3 v;
    hash.for_near(x, params.cutoff, centers, [&](int j) {
        v += matrix_kernel(x - centers[static_cast<std::size_t>(j)], params) *
             coeffs[static_cast<std::size_t>(j)];
    });
    return v;
}

RbfModel fit(const std::vector<Vec3>& centers, const std::vector<Vec3>& targets,
             const RbfParams& p, double tol, RbfFitStats* stats) {
    p.validate();
    if (centers.empty()) throw Error("RBF fit needs at least one center");
    if (centers.size() != targets.size()) throw DimensionError("RBF centers and targets differ in count");
    RbfModel m;
    m.params = p;
    m.centers = centers;
    m.rebuild_hash();
    const int n = static_cast<int>(centers.size());

    std::string close;
    int close_count = 0;
    const double min_sep = 1e-6 * p.sigma;
    for (int k = 0; k < n; ++k)
        m.hash.for_near(centers[static_cast<std::size_t>(k)], min_sep, centers, [&](int j) {
            if (j <= k) return;
            if (close_count++ < 8) close += " (" + std::to_string(k) + "," + std::to_string(j) + ")";
        });
    if (close_count > 0)
        throw Error("RBF centers nearly coincide, system is singular:" + close +
                    (close_count > 8 ? " ..." : ""));

    MatrixBuilder builder(3 * n);
    for (int k = 0; k < n; ++k)
        m.hash.for_near(centers[static_cast<std::size_t>(k)], p.cutoff, centers, [&](int j) {
            Mat3 b = matrix_kernel(centers[static_cast<std::size_t>(k)] - centers[static_cast<std::size_t>(j)], p);
            for (int a = 0; a < 3; ++a)
                for (int c = 0; c < 3; ++c)
                    if (b[a][c] != 0.0) builder.add(3 * k + a, 3 * j + c, b[a][c]);
        });
    SparseMatrix a = builder.build();
    std::vector<double> rhs(static_cast<std::size_t>(3 * n));
    for (int k = 0; k < n; ++k)
        for (int c = 0; c < 3; ++c) rhs[static_cast<std::size_t>(3 * k + c)] = targets[static_cast<std::size_t>(k)][c];

    m.coeffs.assign(static_cast<std::size_t>(n), Vec3{});
    double bnorm = 0.0;
    for (double v : rhs) bnorm = std::max(bnorm, std::abs(v));
    if (bnorm == 0.0) return m;

    CgOptions opt;
    opt.tol = tol;
    opt.preconditioner = Preconditioner::Jacobi;
    opt.max_iterations = std::max(20000, 30 * n);
    CgResult r = pcg(a, rhs, opt);
    for (int k = 0; k < n; ++k)
        for (int c = 0; c < 3; ++c)
            m.coeffs[static_cast<std::size_t>(k)][c] = r.x[static_cast<std::size_t>(3 * k + c)];
    if (stats) {
        stats->iterations = r.iterations;
        stats->residual = r.residual;
        stats->nonzeros = a.nonzeros();
    }
    return m;
}

std::vector<Vec3> surface_vertices(const LevelSet3& ls, const SolidField3& solid, double weld) {
    const auto& g = ls.phi.desc;
    const auto& v = ls.phi.values;
    std::vector<Vec3> raw;
    auto crossing = [&](int i0, int j0, int k0, int i1, int j1, int k1) {
        double a = v(i0, j0, k0), b = v(i1, j1, k1);
        if ((a < 0.0) == (b < 0.0)) return;
        double t = a / (a - b);
        Vec3 p0 = g.node_position(i0, j0, k0), p1 = g.node_position(i1, j1, k1);
        raw.push_back(p0 + (p1 - p0) * t);
    };
    for (int k = 0; k <= g.nz; ++k)
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i) {
                if (i < g.nx) crossing(i, j, k, i + 1, j, k);
                if (j < g.ny) crossing(i, j, k, i, j + 1, k);
                if (k < g.nz) crossing(i, j, k, i, j, k + 1);
            }
    std::vector<Vec3> kept;
    CenterHash hash({}, std::max(weld, 1e-12 * g.h));
    for (const Vec3& x : raw) {
        bool near = false;
        hash.for_near(x, weld, kept, [&](int) { near = true; });
        if (near) continue;
        hash.insert(x, static_cast<int>(kept.size()));
        kept.push_back(x);
    }
    for (Vec3& x : kept) x = closest_point(solid, x).cp;
    return kept;
}

void save_rbf(const std::string& path, const RbfModel& m) {
    std::ofstream os(path);
    if (!os) throw Error("cannot write " + path);
    os << "CURLFLOW RBF " << m.centers.size() << ' ' << format_double(m.params.sigma) << ' '
       << format_double(m.params.cutoff) << ' ' << m.params.nu << '\n';
    for (std::size_t n = 0; n < m.centers.size(); ++n) {
        for (int a = 0; a < 3; ++a) os << format_double(m.centers[n][a]) << ' ';
        for (int a = 0; a < 3; ++a) os << format_double(m.coeffs[n][a]) << (a == 2 ? '\n' : ' ');
    }
}

RbfModel load_rbf(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot read " + path);
    std::string magic, kind, sig, cut;
    std::size_t count = 0;
    RbfModel m;
    if (!(is >> magic >> kind >> count >> sig >> cut >> m.params.nu) || magic != "CURLFLOW" ||
        kind != "RBF")
        throw ConfigError(path + ": not an RBF dump");
    m.params.sigma = parse_double(sig);
    m.params.cutoff = parse_double(cut);
    m.centers.resize(count);
    m.coeffs.resize(count);
    for (std::size_t n = 0; n < count; ++n) {
        std::string t[6];
        for (auto& s : t)
            if (!(is >> s)) throw ConfigError(path + ": truncated RBF dump");
        for (int a = 0; a < 3; ++a) {
            m.centers[n][a] = parse_double(t[a]);
            m.coeffs[n][a] = parse_double(t[3 + a]);
        }
    }
    m.rebuild_hash();
    return m;
}

}  // namespace curlflow
