#include <omp.h>

#include <cmath>
#include <random>
#include <vector>

#include "curlflow/error.hpp"
#include "curlflow/levelset.hpp"
#include "curlflow/poisson.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace curlflow;

namespace {

// dense SPD system B^T B + n I, solved by Gaussian elimination as the oracle
struct Dense {
    int n;
    std::vector<double> a;
    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
};

Dense random_spd(int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> b(static_cast<std::size_t>(n) * n);
    for (double& v : b) v = U(rng);
    Dense d{n, std::vector<double>(b.size(), 0.0)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = i == j ? n : 0.0;
            for (int k = 0; k < n; ++k) s += b[k * n + i] * b[k * n + j];
            d(i, j) = s;
        }
    return d;
}

std::vector<double> gauss_solve(Dense a, std::vector<double> b) {
    const int n = a.n;
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
        for (int k = 0; k < n; ++k) std::swap(a(c, k), a(p, k));
        std::swap(b[c], b[p]);
        for (int r = c + 1; r < n; ++r) {
            const double f = a(r, c) / a(c, c);
            for (int k = c; k < n; ++k) a(r, k) -= f * a(c, k);
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k) s -= a(r, k) * x[k];
        x[r] = s / a(r, r);
    }
    return x;
}

SparseMatrix to_csr(Dense& d) {
    MatrixBuilder mb(d.n);
    for (int i = 0; i < d.n; ++i)
        for (int j = 0; j < d.n; ++j) mb.add(i, j, d(i, j));
    return mb.build();
}

}  // namespace

TEST_SUITE("poisson_projection") {

TEST_CASE("pcg agrees with dense elimination for every preconditioner") {
    Dense d = random_spd(30, 1);
    const SparseMatrix a = to_csr(d);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> b(30);
    for (double& v : b) v = U(rng);
    const auto oracle = gauss_solve(d, b);
    for (auto pc : {Preconditioner::None, Preconditioner::Jacobi, Preconditioner::IC0}) {
        CgOptions opt;
        opt.tol = 1e-13;
        opt.preconditioner = pc;
        const auto r = pcg(a, b, opt);
        for (int i = 0; i < 30; ++i) CHECK(r.x[i] == doctest::Approx(oracle[i]).epsilon(1e-9));
    }
}

TEST_CASE("cg energy never increases") {
    Dense d = random_spd(40, 3);
    const SparseMatrix a = to_csr(d);
    std::vector<double> b(40, 1.0);
    CgOptions opt;
    opt.tol = 1e-12;
    opt.record_history = true;
    for (auto pc : {Preconditioner::None, Preconditioner::IC0}) {
        opt.preconditioner = pc;
        const auto r = pcg(a, b, opt);
        REQUIRE(r.energy.size() >= 2);
        for (std::size_t k = 1; k < r.energy.size(); ++k)
            CHECK(r.energy[k] <= r.energy[k - 1] + 1e-12 * std::abs(r.energy[k - 1]));
    }
}

TEST_CASE("matrix builder rejects asymmetric input") {
    MatrixBuilder mb(2);
    mb.add(0, 0, 2.0);
    mb.add(1, 1, 2.0);
    mb.add(0, 1, 1.0);
    mb.add(1, 0, 0.5);
    CHECK_THROWS_AS(mb.build(), Error);
}

TEST_CASE("an iteration cap surfaces as ConvergenceError") {
    Dense d = random_spd(50, 4);
    const SparseMatrix a = to_csr(d);
    CgOptions opt;
    opt.tol = 1e-15;
    opt.max_iterations = 2;
    opt.preconditioner = Preconditioner::None;
    CHECK_THROWS_AS(pcg(a, std::vector<double>(50, 1.0), opt), ConvergenceError);
}

TEST_CASE("blocked dot is independent of the thread count") {
    std::vector<double> a(100003), b(100003);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = U(rng), b[i] = U(rng);
    omp_set_num_threads(1);
    const double one = blocked_dot(a, b);
    omp_set_num_threads(4);
    const double four = blocked_dot(a, b);
    CHECK(one == four);
}

TEST_CASE("projection meets the cell tolerance and the boundary conditions") {
    const double tol = 1e-10;
    GridDesc2 g{20, 12, 0.5, {}};
    Circle disk({5.0, 3.0}, 1.4);
    const CutCells2 cc = build_cut_cells(LevelSet2::from_solid(g, disk));
    const DomainBc bc = DomainBc::wind_tunnel(0.8);
    ProjectionStats st;
    const MacField2 p = pressure_project(testing::random_field(g, 6), cc.faces, bc, tol, &st);
    CHECK(max_cell_residual(p, cc.faces) <= tol);
    CHECK(st.residual <= tol);
    for (int j = 0; j < g.ny; ++j) {
        CHECK(p.u(0, j) == doctest::Approx(0.8));
        CHECK(p.u(g.nx, j) == doctest::Approx(0.8).epsilon(1e-8));
    }
    for (int i = 0; i < g.nx; ++i) {
        CHECK(p.v(i, 0) == 0.0);
        CHECK(p.v(i, g.ny) == 0.0);
    }
    for (std::size_t n = 0; n < p.u.size(); ++n)
        if (cc.faces.u.data()[n] == 0.0) CHECK(p.u.data()[n] == 0.0);
}

TEST_CASE("projection leaves a discretely divergence-free field alone") {
    GridDesc3 g{6, 5, 4, 1.0, {}};
    const DomainBc bc = DomainBc::closed();
    const MacField3 p1 = pressure_project(testing::random_field(g, 7), bc, 1e-12);
    const MacField3 p2 = pressure_project(p1, bc, 1e-12);
    for (std::size_t n = 0; n < p1.w.size(); ++n) CHECK(p2.w.data()[n] == doctest::Approx(p1.w.data()[n]));
    CHECK(discrete_divergence(p1).max_abs() < 1e-11);
}

TEST_CASE("nodal poisson recovers a discrete manufactured solution") {
    GridDesc2 g{24, 16, 0.25, {}};
    NodalField2 exact(g);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            const Vec2 p = g.node_position(i, j);
            exact.values(i, j) = std::sin(p.x) * std::cosh(0.5 * p.y) + p.x * p.y;
        }
    PoissonStats st;
    const NodalField2 sol = solve_nodal_poisson(nodal_laplacian(exact), exact, 1e-13, &st);
    for (std::size_t n = 0; n < sol.values.size(); ++n)
        CHECK(sol.values.data()[n] == doctest::Approx(exact.values.data()[n]).epsilon(1e-9));
    CHECK(st.iterations > 0);
}

}
