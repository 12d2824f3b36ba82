#include "curlflow/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "curlflow/error.hpp"

namespace curlflow {

// ---- sparse algebra -------------------------------------------------------

void SparseMatrix::multiply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double s = 0.0;
        for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s += val[p] * x[col[p]];
        y[i] = s;
    }
}

double SparseMatrix::at(int i, int j) const {
    auto b = col.begin() + row_ptr[i], e = col.begin() + row_ptr[i + 1];
    auto it = std::lower_bound(b, e, j);
    return it != e && *it == j ? val[static_cast<std::size_t>(it - col.begin())] : 0.0;
}

void MatrixBuilder::add(int i, int j, double v) { rows_[static_cast<std::size_t>(i)].emplace_back(j, v); }

SparseMatrix MatrixBuilder::build(bool check) const {
    SparseMatrix m;
    m.n = static_cast<int>(rows_.size());
    m.row_ptr.assign(rows_.size() + 1, 0);
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        auto row = rows_[i];
        std::sort(row.begin(), row.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        for (std::size_t p = 0; p < row.size(); ++p) {
            if (!m.col.empty() && static_cast<int>(m.col.size()) > m.row_ptr[i] &&
                m.col.back() == row[p].first) {
                m.val.back() += row[p].second;
            } else {
                m.col.push_back(row[p].first);
                m.val.push_back(row[p].second);
            }
        }
        m.row_ptr[i + 1] = static_cast<int>(m.col.size());
    }
    if (check) {
        for (int i = 0; i < m.n; ++i) {
            if (m.row_ptr[i] == m.row_ptr[i + 1]) continue;
            if (!(m.at(i, i) > 0.0))
                throw Error("non-positive diagonal in row " + std::to_string(i));
            for (int p = m.row_ptr[i]; p < m.row_ptr[i + 1]; ++p) {
                double a = m.val[p], b = m.at(m.col[p], i);
                if (std::abs(a - b) > 1e-14 * std::max({1.0, std::abs(a), std::abs(b)}))
                    throw Error("matrix not symmetric at (" + std::to_string(i) + "," +
                                std::to_string(m.col[p]) + ")");
            }
        }
    }
    return m;
}

namespace {

constexpr std::size_t kDotBlock = 2048;

template <class F>
double blocked_sum(std::size_t n, F&& term) {
    std::size_t nb = (n + kDotBlock - 1) / kDotBlock;
    std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(nb); ++b) {
        std::size_t lo = static_cast<std::size_t>(b) * kDotBlock;
        std::size_t hi = std::min(n, lo + kDotBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
}

double norm_inf(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm_l1(const std::vector<double>& v) {
    return blocked_sum(v.size(), [&](std::size_t i) { return std::abs(v[i]); });
}

// Lower-triangular incomplete Cholesky factor with the pattern of tril(A).
struct Ic0 {
    std::vector<int> row_ptr, col;
    std::vector<double> val;
    std::vector<double> diag;

    bool factor(const SparseMatrix& a) {
        const int n = a.n;
        row_ptr.assign(static_cast<std::size_t>(n) + 1, 0);
        col.clear();
        val.clear();
        for (int i = 0; i < n; ++i) {
            for (int p = a.row_ptr[i]; p < a.row_ptr[i + 1]; ++p)
                if (a.col[p] < i) {
                    col.push_back(a.col[p]);
                    val.push_back(a.val[p]);
                }
            row_ptr[i + 1] = static_cast<int>(col.size());
        }
        diag.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) {
                int k = col[p];
                // subtract sum_{j<k} L_ij L_kj over the shared pattern
                double s = val[p];
                int q = row_ptr[k], qe = row_ptr[k + 1];
                for (int r = row_ptr[i]; r < p && q < qe;) {
                    if (col[r] == col[q]) {
                        s -= val[r] * val[q];
                        ++r;
                        ++q;
                    } else if (col[r] < col[q]) {
                        ++r;
                    } else {
                        ++q;
                    }
                }
                val[p] = s / diag[k];
            }
            double d = a.at(i, i);
            for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) d -= val[p] * val[p];
            if (!(d > 0.0)) return false;
            diag[i] = std::sqrt(d);
        }
        return true;
    }

    void apply(const std::vector<double>& r, std::vector<double>& z) const {
        const int n = static_cast<int>(diag.size());
        z = r;
        for (int i = 0; i < n; ++i) {
            double s = z[i];
            for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) s -= val[p] * z[col[p]];
            z[i] = s / diag[i];
        }
        for (int i = n - 1; i >= 0; --i) {
            z[i] /= diag[i];
            for (int p = row_ptr[i]; p < row_ptr[i + 1]; ++p) z[col[p]] -= val[p] * z[i];
        }
    }
};

}  // namespace

double blocked_dot(const std::vector<double>& a, const std::vector<double>& b) {
    return blocked_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

CgResult pcg(const SparseMatrix& a, const std::vector<double>& b, const CgOptions& opt,
             const std::vector<double>* x0) {
    const std::size_t n = static_cast<std::size_t>(a.n);
    if (b.size() != n) throw DimensionError("rhs size does not match matrix");
    CgResult res;
    res.x = x0 ? *x0 : std::vector<double>(n, 0.0);
    if (res.x.size() != n) throw DimensionError("initial guess size does not match matrix");

    Preconditioner pre = opt.preconditioner;
    Ic0 ic;
    if (pre == Preconditioner::IC0 && !ic.factor(a)) {
        pre = Preconditioner::Jacobi;
        res.ic0_fallback = true;
    }
    std::vector<double> inv_diag;
    if (pre == Preconditioner::Jacobi) {
        inv_diag.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            double d = a.at(static_cast<int>(i), static_cast<int>(i));
            inv_diag[i] = d > 0.0 ? 1.0 / d : 1.0;
        }
    }
    auto precondition = [&](const std::vector<double>& r, std::vector<double>& z) {
        switch (pre) {
            case Preconditioner::None: z = r; break;
            case Preconditioner::Jacobi:
                z.resize(n);
                for (std::size_t i = 0; i < n; ++i) z[i] = r[i] * inv_diag[i];
                break;
            case Preconditioner::IC0: ic.apply(r, z); break;
        }
    };

    const double bnorm = opt.stop == StopRule::RelativeL2 ? std::sqrt(blocked_dot(b, b))
                                                          : std::max(1.0, norm_inf(b));
    auto measure = [&](const std::vector<double>& r) {
        return opt.stop == StopRule::RelativeL2 ? std::sqrt(blocked_dot(r, r)) : norm_l1(r);
    };
    const double target = opt.tol * bnorm;

    std::vector<double> r(n), z, p, q(n);
    a.multiply(res.x, q);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
    auto energy = [&]() {
        // 0.5 x.Ax - b.x = -0.5 (x.b + x.r)
        return -0.5 * blocked_sum(n, [&](std::size_t i) { return res.x[i] * (b[i] + r[i]); });
    };
    res.residual = measure(r);
    if (opt.record_history) {
        res.energy.push_back(energy());
        res.residuals.push_back(res.residual);
    }
    if (n == 0 || res.residual <= target) return res;

    precondition(r, z);
    p = z;
    double rz = blocked_dot(r, z);
    for (int it = 1; it <= opt.max_iterations; ++it) {
        a.multiply(p, q);
        double pq = blocked_dot(p, q);
        if (!(pq > 0.0)) throw ConvergenceError("matrix is not positive definite", res.residual, it);
        double alpha = rz / pq;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
            res.x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        res.iterations = it;
        res.residual = measure(r);
        if (opt.record_history) {
            res.energy.push_back(energy());
            res.residuals.push_back(res.residual);
        }
        if (res.residual <= target) {
            // confirm with the true residual
            a.multiply(res.x, q);
            for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
            res.residual = measure(r);
            if (res.residual <= target) return res;
        }
        precondition(r, z);
        double rz_new = blocked_dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
#pragma omp parallel for schedule(static)
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i)
            p[i] = z[i] + beta * p[i];
    }
    throw ConvergenceError("conjugate gradient did not converge", res.residual,
                           opt.max_iterations);
}

// ---- domain boundaries ----------------------------------------------------

DomainBc DomainBc::wind_tunnel(double speed) {
    DomainBc bc;
    bc.walls[0] = {WallKind::Prescribed, speed};
    bc.walls[1] = {WallKind::Prescribed, speed};
    return bc;
}

bool DomainBc::fully_closed(int dim) const {
    for (int w = 0; w < 2 * dim; ++w)
        if (walls[static_cast<std::size_t>(w)].kind != WallKind::Closed) return false;
    return true;
}

bool DomainBc::any_open(int dim) const {
    for (int w = 0; w < 2 * dim; ++w)
        if (walls[static_cast<std::size_t>(w)].kind == WallKind::Open) return true;
    return false;
}

const char* wall_name(int wall) {
    static const char* names[6] = {"x_min", "x_max", "y_min", "y_max", "z_min", "z_max"};
    return wall >= 0 && wall < 6 ? names[wall] : "?";
}

FaceWeights2 unit_weights(const GridDesc2& g) {
    return {Array2(g.nx + 1, g.ny, 1.0), Array2(g.nx, g.ny + 1, 1.0)};
}

FaceWeights3 unit_weights(const GridDesc3& g) {
    return {Array3(g.nx + 1, g.ny, g.nz, 1.0), Array3(g.nx, g.ny + 1, g.nz, 1.0),
            Array3(g.nx, g.ny, g.nz + 1, 1.0)};
}

// ---- pressure projection --------------------------------------------------
//
// Both dimensions share one implementation over a flat face list: each face
// knows its weight, the cells on either side (-1 outside the domain) and
// which wall it lies on. Pressure is scaled by 1/h so the matrix entries are
// the bare weights.

namespace {

struct FaceRef {
    double* u;
    double w;
    int lo, hi;  // cell indices, -1 outside
    int wall;    // -1 interior
};

struct ProjectionCore {
    int ncells = 0;
    std::vector<FaceRef> faces;

    void apply_walls_and_solids(const DomainBc& bc) {
        for (auto& f : faces) {
            if (f.wall >= 0) {
                const WallBc& wb = bc.walls[static_cast<std::size_t>(f.wall)];
                if (wb.kind == WallKind::Closed) *f.u = 0.0;
                if (wb.kind == WallKind::Prescribed) *f.u = wb.speed;
            }
            if (f.w <= 0.0) *f.u = 0.0;
        }
    }

    std::vector<double> residuals() const {
        std::vector<double> div(static_cast<std::size_t>(ncells), 0.0);
        for (const auto& f : faces) {
            if (f.w <= 0.0) continue;
            double flux = f.w * *f.u;
            if (f.lo >= 0) div[static_cast<std::size_t>(f.lo)] += flux;
            if (f.hi >= 0) div[static_cast<std::size_t>(f.hi)] -= flux;
        }
        return div;
    }

    std::vector<char> active_cells() const {
        std::vector<char> act(static_cast<std::size_t>(ncells), 0);
        for (const auto& f : faces) {
            if (f.w <= 0.0) continue;
            if (f.lo >= 0) act[static_cast<std::size_t>(f.lo)] = 1;
            if (f.hi >= 0) act[static_cast<std::size_t>(f.hi)] = 1;
        }
        return act;
    }

    double max_residual() const {
        auto div = residuals();
        auto act = active_cells();
        double m = 0.0;
        for (std::size_t c = 0; c < div.size(); ++c)
            if (act[c]) m = std::max(m, std::abs(div[c]));
        return m;
    }

    void solve(const DomainBc& bc, double tol, ProjectionStats* stats) {
        apply_walls_and_solids(bc);
        auto act = active_cells();
        const std::size_t nc = static_cast<std::size_t>(ncells);

        // components of active cells connected through open interior faces
        std::vector<std::vector<int>> adj(nc);
        std::vector<char> dirichlet(nc, 0);
        for (const auto& f : faces) {
            if (f.w <= 0.0) continue;
            if (f.lo >= 0 && f.hi >= 0) {
                adj[static_cast<std::size_t>(f.lo)].push_back(f.hi);
                adj[static_cast<std::size_t>(f.hi)].push_back(f.lo);
            } else if (f.wall >= 0 &&
                       bc.walls[static_cast<std::size_t>(f.wall)].kind == WallKind::Open) {
                dirichlet[static_cast<std::size_t>(f.lo >= 0 ? f.lo : f.hi)] = 1;
            }
        }
        std::vector<int> comp(nc, -1);
        std::vector<char> pinned(nc, 0);
        int ncomp = 0, npinned = 0;
        for (std::size_t c = 0; c < nc; ++c) {
            if (!act[c] || comp[c] >= 0) continue;
            std::deque<int> queue{static_cast<int>(c)};
            comp[c] = ncomp;
            bool has_dirichlet = false;
            while (!queue.empty()) {
                int x = queue.front();
                queue.pop_front();
                has_dirichlet |= dirichlet[static_cast<std::size_t>(x)] != 0;
                for (int y : adj[static_cast<std::size_t>(x)])
                    if (comp[static_cast<std::size_t>(y)] < 0) {
                        comp[static_cast<std::size_t>(y)] = ncomp;
                        queue.push_back(y);
                    }
            }
            if (!has_dirichlet) {
                pinned[c] = 1;
                ++npinned;
            }
            ++ncomp;
        }

        std::vector<int> row(nc, -1);
        int n = 0;
        for (std::size_t c = 0; c < nc; ++c)
            if (act[c] && !pinned[c]) row[c] = n++;

        MatrixBuilder mb(n);
        for (const auto& f : faces) {
            if (f.w <= 0.0) continue;
            int a = f.lo >= 0 ? row[static_cast<std::size_t>(f.lo)] : -1;
            int b = f.hi >= 0 ? row[static_cast<std::size_t>(f.hi)] : -1;
            bool open_wall = f.wall >= 0 &&
                             bc.walls[static_cast<std::size_t>(f.wall)].kind == WallKind::Open;
            if (f.lo >= 0 && f.hi >= 0) {
                if (a >= 0) mb.add(a, a, f.w);
                if (b >= 0) mb.add(b, b, f.w);
                if (a >= 0 && b >= 0) {
                    mb.add(a, b, -f.w);
                    mb.add(b, a, -f.w);
                }
            } else if (open_wall) {
                int c = a >= 0 ? a : b;
                if (c >= 0) mb.add(c, c, f.w);
            }
        }
        SparseMatrix m = mb.build();

        auto div = residuals();
        std::vector<double> rhs(static_cast<std::size_t>(n));
        double init = 0.0;
        for (std::size_t c = 0; c < nc; ++c) {
            if (act[c]) init = std::max(init, std::abs(div[c]));
            if (row[c] >= 0) rhs[static_cast<std::size_t>(row[c])] = -div[c];
        }

        CgOptions opt;
        opt.tol = tol;
        opt.stop = StopRule::DivergenceL1;
        CgResult cg;
        try {
            cg = pcg(m, rhs, opt);
        } catch (const ConvergenceError& e) {
            throw ConvergenceError(std::string("pressure projection: ") + e.what(), e.residual(),
                                   e.iterations());
        }

        auto pressure = [&](int cell) {
            if (cell < 0) return 0.0;
            int r = row[static_cast<std::size_t>(cell)];
            return r >= 0 ? cg.x[static_cast<std::size_t>(r)] : 0.0;
        };
        for (auto& f : faces) {
            if (f.w <= 0.0) continue;
            bool interior = f.lo >= 0 && f.hi >= 0;
            bool open_wall = f.wall >= 0 &&
                             bc.walls[static_cast<std::size_t>(f.wall)].kind == WallKind::Open;
            if (interior || open_wall) *f.u -= pressure(f.hi) - pressure(f.lo);
        }
        if (stats) {
            stats->iterations = cg.iterations;
            stats->initial_residual = init;
            stats->residual = max_residual();
            stats->pinned_cells = npinned;
        }
    }
};

ProjectionCore core_for(MacField2& f, const FaceWeights2& w) {
    const auto& g = f.desc;
    ProjectionCore pc;
    pc.ncells = g.nx * g.ny;
    auto cell = [&](int i, int j) {
        return i < 0 || j < 0 || i >= g.nx || j >= g.ny ? -1 : j * g.nx + i;
    };
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            pc.faces.push_back({&f.u(i, j), w.u(i, j), cell(i - 1, j), cell(i, j),
                                i == 0 ? 0 : (i == g.nx ? 1 : -1)});
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            pc.faces.push_back({&f.v(i, j), w.v(i, j), cell(i, j - 1), cell(i, j),
                                j == 0 ? 2 : (j == g.ny ? 3 : -1)});
    return pc;
}

ProjectionCore core_for(MacField3& f, const FaceWeights3& w) {
    const auto& g = f.desc;
    ProjectionCore pc;
    pc.ncells = g.nx * g.ny * g.nz;
    auto cell = [&](int i, int j, int k) {
        return i < 0 || j < 0 || k < 0 || i >= g.nx || j >= g.ny || k >= g.nz
                   ? -1
                   : (k * g.ny + j) * g.nx + i;
    };
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                pc.faces.push_back({&f.u(i, j, k), w.u(i, j, k), cell(i - 1, j, k), cell(i, j, k),
                                    i == 0 ? 0 : (i == g.nx ? 1 : -1)});
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                pc.faces.push_back({&f.v(i, j, k), w.v(i, j, k), cell(i, j - 1, k), cell(i, j, k),
                                    j == 0 ? 2 : (j == g.ny ? 3 : -1)});
    for (int k = 0; k <= g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                pc.faces.push_back({&f.w(i, j, k), w.w(i, j, k), cell(i, j, k - 1), cell(i, j, k),
                                    k == 0 ? 4 : (k == g.nz ? 5 : -1)});
    return pc;
}

void check_weights(const MacField2& f, const FaceWeights2& w) {
    f.check();
    if (!w.u.same_shape(f.u) || !w.v.same_shape(f.v))
        throw DimensionError("face weights do not match field extents");
}

void check_weights(const MacField3& f, const FaceWeights3& w) {
    f.check();
    if (!w.u.same_shape(f.u) || !w.v.same_shape(f.v) || !w.w.same_shape(f.w))
        throw DimensionError("face weights do not match field extents");
}

}  // namespace

MacField2 pressure_project(const MacField2& f, const FaceWeights2& w, const DomainBc& bc,
                           double tol, ProjectionStats* stats) {
    check_weights(f, w);
    MacField2 out = f;
    core_for(out, w).solve(bc, tol, stats);
    return out;
}

MacField3 pressure_project(const MacField3& f, const FaceWeights3& w, const DomainBc& bc,
                           double tol, ProjectionStats* stats) {
    check_weights(f, w);
    MacField3 out = f;
    core_for(out, w).solve(bc, tol, stats);
    return out;
}

MacField2 pressure_project(const MacField2& f, const DomainBc& bc, double tol,
                           ProjectionStats* stats) {
    return pressure_project(f, unit_weights(f.desc), bc, tol, stats);
}

MacField3 pressure_project(const MacField3& f, const DomainBc& bc, double tol,
                           ProjectionStats* stats) {
    return pressure_project(f, unit_weights(f.desc), bc, tol, stats);
}

double max_cell_residual(const MacField2& f, const FaceWeights2& w) {
    check_weights(f, w);
    MacField2 tmp = f;
    return core_for(tmp, w).max_residual();
}

double max_cell_residual(const MacField3& f, const FaceWeights3& w) {
    check_weights(f, w);
    MacField3 tmp = f;
    return core_for(tmp, w).max_residual();
}

// ---- nodal Poisson --------------------------------------------------------

namespace {

template <class Field, class Interior, class Neighbors>
void solve_nodal(std::size_t nnodes, const Field& rhs, const Field& dir,
                                Field& out, double h, double tol, PoissonStats* stats,
                                Interior&& interior, Neighbors&& neighbors) {
    std::vector<int> row(nnodes, -1);
    int n = 0;
    for (std::size_t p = 0; p < nnodes; ++p)
        if (interior(p)) row[p] = n++;
    MatrixBuilder mb(n);
    std::vector<double> b(static_cast<std::size_t>(n), 0.0);
    const double h2 = h * h;
    std::vector<std::size_t> nb;
    for (std::size_t p = 0; p < nnodes; ++p) {
        int r = row[p];
        if (r < 0) continue;
        nb.clear();
        neighbors(p, nb);
        mb.add(r, r, static_cast<double>(nb.size()));
        b[static_cast<std::size_t>(r)] = -h2 * rhs.values.data()[p];
        for (std::size_t q : nb) {
            if (row[q] >= 0)
                mb.add(r, row[q], -1.0);
            else
                b[static_cast<std::size_t>(r)] += dir.values.data()[q];
        }
    }
    SparseMatrix m = mb.build();
    CgOptions opt;
    opt.tol = tol;
    opt.record_history = stats != nullptr;
    CgResult cg = pcg(m, b, opt);
    for (std::size_t p = 0; p < nnodes; ++p)
        out.values.data()[p] = row[p] >= 0 ? cg.x[static_cast<std::size_t>(row[p])]
                                           : dir.values.data()[p];
    if (stats) {
        stats->iterations = cg.iterations;
        stats->residual = cg.residual;
        stats->energy = std::move(cg.energy);
    }
}

}  // namespace

NodalField2 solve_nodal_poisson(const NodalField2& rhs, const NodalField2& dirichlet, double tol,
                                PoissonStats* stats) {
    const auto& g = rhs.desc;
    if (!rhs.values.same_shape(dirichlet.values) || rhs.values.nx() != g.nx + 1 ||
        rhs.values.ny() != g.ny + 1)
        throw DimensionError("nodal Poisson inputs disagree in extent");
    NodalField2 out(g);
    const int sx = g.nx + 1;
    auto interior = [&](std::size_t p) {
        int i = static_cast<int>(p % sx), j = static_cast<int>(p / sx);
        return i > 0 && j > 0 && i < g.nx && j < g.ny;
    };
    auto neighbors = [&](std::size_t p, std::vector<std::size_t>& nb) {
        nb.push_back(p - 1);
        nb.push_back(p + 1);
        nb.push_back(p - sx);
        nb.push_back(p + sx);
    };
    solve_nodal(rhs.values.size(), rhs, dirichlet, out, g.h, tol, stats, interior, neighbors);
    return out;
}

NodalField3 solve_nodal_poisson(const NodalField3& rhs, const NodalField3& dirichlet, double tol,
                                PoissonStats* stats) {
    const auto& g = rhs.desc;
    if (!rhs.values.same_shape(dirichlet.values) || rhs.values.nx() != g.nx + 1 ||
        rhs.values.ny() != g.ny + 1 || rhs.values.nz() != g.nz + 1)
        throw DimensionError("nodal Poisson inputs disagree in extent");
    NodalField3 out(g);
    const std::size_t sx = static_cast<std::size_t>(g.nx) + 1;
    const std::size_t sxy = sx * (static_cast<std::size_t>(g.ny) + 1);
    auto interior = [&](std::size_t p) {
        int i = static_cast<int>(p % sx), j = static_cast<int>((p / sx) % (g.ny + 1)),
            k = static_cast<int>(p / sxy);
        return i > 0 && j > 0 && k > 0 && i < g.nx && j < g.ny && k < g.nz;
    };
    auto neighbors = [&](std::size_t p, std::vector<std::size_t>& nb) {
        nb.push_back(p - sxy);
        nb.push_back(p - sx);
        nb.push_back(p - 1);
        nb.push_back(p + 1);
        nb.push_back(p + sx);
        nb.push_back(p + sxy);
    };
    solve_nodal(rhs.values.size(), rhs, dirichlet, out, g.h, tol, stats, interior, neighbors);
    return out;
}

NodalField3 nodal_laplacian(const NodalField3& phi) {
    const auto& g = phi.desc;
    NodalField3 out(g);
    const auto& v = phi.values;
    const double inv_h2 = 1.0 / (g.h * g.h);
    for (int k = 1; k < g.nz; ++k)
        for (int j = 1; j < g.ny; ++j)
            for (int i = 1; i < g.nx; ++i)
                out.values(i, j, k) = (v(i - 1, j, k) + v(i + 1, j, k) + v(i, j - 1, k) +
                                       v(i, j + 1, k) + v(i, j, k - 1) + v(i, j, k + 1) -
                                       6.0 * v(i, j, k)) *
                                      inv_h2;
    return out;
}

NodalField2 nodal_laplacian(const NodalField2& phi) {
    const auto& g = phi.desc;
    NodalField2 out(g);
    const auto& v = phi.values;
    const double inv_h2 = 1.0 / (g.h * g.h);
    for (int j = 1; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i)
            out.values(i, j) =
                (v(i - 1, j) + v(i + 1, j) + v(i, j - 1) + v(i, j + 1) - 4.0 * v(i, j)) * inv_h2;
    return out;
}

}  // namespace curlflow
