#include <omp.h>

#include <cmath>
#include <memory>

#include "curlflow/scenario.hpp"
#include "curlflow/vecpot3d.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace curlflow;

namespace {

double max_diff(const Array3& a, const Array3& b) {
    double m = 0.0;
    for (std::size_t n = 0; n < a.size(); ++n) m = std::max(m, std::abs(a.data()[n] - b.data()[n]));
    return m;
}

}  // namespace

TEST_SUITE("vecpot3d") {

TEST_CASE("raw sweep reproduces the face velocities") {
    GridDesc3 g{6, 5, 4, 0.5, {}};
    const DomainBc bc = DomainBc::wind_tunnel(0.6);
    const MacField3 f = random_divergence_free(g, bc, 1, 1e-12);
    const auto raw = parallel_sweep_3d(f, bc);
    CHECK(raw.state == GaugeState::RawSwept);
    CHECK(raw.edges.ez.max_abs() == 0.0);
    const MacField3 back = curl_flux(raw.edges);
    CHECK(max_diff(back.u, f.u) < 1e-12);
    CHECK(max_diff(back.v, f.v) < 1e-12);
    CHECK(max_diff(back.w, f.w) < 1e-12);
}

TEST_CASE("boundary gauge clears the top plane without changing circulations") {
    GridDesc3 g{5, 5, 5, 1.0, {}};
    const DomainBc bc = DomainBc::closed();
    const MacField3 f = random_divergence_free(g, bc, 2, 1e-12);
    const auto raw = parallel_sweep_3d(f, bc);
    const auto phi = build_phi_bc(raw);
    const auto bf = apply_boundary_gauge(raw, phi);
    CHECK(bf.state == GaugeState::BoundaryFixed);
    CHECK(max_wall_tangential(bf.edges, 5) < 1e-12);
    CHECK(max_face_residual(bf.edges, f) < 1e-12);
    // phi_BC lives on the top plane only
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i) CHECK(phi.values(i, j, k) == 0.0);
}

TEST_CASE("coulomb gauge is divergence free, keeps the curl and zero tangential walls") {
    GridDesc3 g{8, 8, 8, 1.0, {}};
    const DomainBc bc = DomainBc::closed();
    const MacField3 f = random_divergence_free(g, bc, 3, 1e-12);
    const auto raw = parallel_sweep_3d(f, bc);
    PoissonStats st;
    const auto co = gauge_correct(raw, build_phi_bc(raw), 1e-12, &st);
    CHECK(co.state == GaugeState::Coulomb);
    CHECK(nodal_divergence(co.edges).max_abs() < 1e-9);
    CHECK(max_face_residual(co.edges, f) < 1e-11);
    for (int w = 0; w < 6; ++w) CHECK(max_wall_tangential(co.edges, w) < 1e-11);
    REQUIRE(st.energy.size() >= 2);
    for (std::size_t k = 1; k < st.energy.size(); ++k)
        CHECK(st.energy[k] <= st.energy[k - 1] + 1e-12 * std::abs(st.energy[k - 1]));
}

TEST_CASE("cut sweep zeroes fully solid edges") {
    GridDesc3 g{12, 12, 12, 1.0, {}};
    Sphere s({6.0, 6.0, 6.0}, 3.3);
    const CutCells3 cc = build_cut_cells(LevelSet3::from_solid(g, s));
    const DomainBc bc = DomainBc::closed();
    const MacField3 f = random_divergence_free(g, bc, 4, 1e-12, &cc.faces);
    const auto raw = sweep_3d_cut(f, cc, bc);
    CHECK(raw.stretched);
    CHECK(raw.solid_gauge_residual < 1e-12);
    for (std::size_t n = 0; n < cc.edge_x.size(); ++n)
        if (cc.edge_x.data()[n] == 0.0) CHECK(std::abs(raw.edges.ex.data()[n]) < 1e-12);
    CHECK(max_face_residual(raw.edges, f, &cc.faces) < 1e-12);
    CHECK(max_true_length_residual(raw.true_length, f, cc) < 1e-12);
    const auto co = gauge_correct_cut(raw, cc, 1e-12);
    CHECK(max_face_residual(co.edges, f, &cc.faces) < 1e-11);
}

TEST_CASE("linear interpolant of edge values is curl-consistent at face centres") {
    GridDesc3 g{4, 4, 4, 1.0, {}};
    const DomainBc bc = DomainBc::closed();
    const MacField3 f = random_divergence_free(g, bc, 5, 1e-12);
    const auto raw = parallel_sweep_3d(f, bc);
    PotentialInterpolant3 interp(raw.edges);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                CHECK(interp.velocity(g.u_face(i, j, k), KernelOrder::Linear).x ==
                      doctest::Approx(f.u(i, j, k)).epsilon(1e-10));
}

TEST_CASE("parallel sweep matches the serial reference bit for bit") {
    GridDesc3 g{20, 18, 16, 1.0, {}};
    const DomainBc bc = DomainBc::wind_tunnel(0.3);
    const MacField3 f = random_divergence_free(g, bc, 6, 1e-10);
    omp_set_num_threads(4);
    const auto a = parallel_sweep_3d(f, bc);
    const auto b = serial::parallel_sweep_3d(f, bc);
    CHECK(testing::bit_equal(a.edges.ex.data(), b.edges.ex.data()));
    CHECK(testing::bit_equal(a.edges.ey.data(), b.edges.ey.data()));
}

TEST_CASE("gauge correction runs identically under different thread counts") {
    GridDesc3 g{10, 10, 10, 1.0, {}};
    const DomainBc bc = DomainBc::closed();
    const auto raw = parallel_sweep_3d(random_divergence_free(g, bc, 7, 1e-12), bc);
    omp_set_num_threads(1);
    const auto one = gauge_correct(raw, build_phi_bc(raw), 1e-12);
    omp_set_num_threads(4);
    const auto four = gauge_correct(raw, build_phi_bc(raw), 1e-12);
    CHECK(testing::bit_equal(one.edges.ex.data(), four.edges.ex.data()));
    CHECK(testing::bit_equal(one.edges.ez.data(), four.edges.ez.data()));
}

}
