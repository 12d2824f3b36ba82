#include <cmath>
#include <limits>
#include <sstream>

#include "curlflow/error.hpp"
#include "curlflow/field_io.hpp"
#include "curlflow/grid.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace curlflow;

TEST_SUITE("grid_core") {

TEST_CASE("grid descriptors reject empty or degenerate grids") {
    CHECK_THROWS_AS((GridDesc2{0, 3, 1.0, {}}.validate()), DimensionError);
    CHECK_THROWS_AS((GridDesc3{2, 2, 2, 0.0, {}}.validate()), DimensionError);
    CHECK_NOTHROW((GridDesc3{1, 1, 1, 0.5, {}}.validate()));
}

TEST_CASE("staggered positions follow the MAC layout") {
    GridDesc3 g{4, 3, 2, 0.5, {1.0, 2.0, 3.0}};
    CHECK(g.u_face(0, 0, 0).x == doctest::Approx(1.0));
    CHECK(g.u_face(0, 0, 0).y == doctest::Approx(2.25));
    CHECK(g.ex_edge(0, 0, 0).x == doctest::Approx(1.25));
    CHECK(g.ex_edge(0, 0, 0).z == doctest::Approx(3.0));
    CHECK(lattice_extent(g, Stagger3::UFace) == Index3{5, 3, 2});
    CHECK(lattice_extent(g, Stagger3::EdgeZ) == Index3{5, 4, 2});
    for (auto s : {Stagger3::Node, Stagger3::VFace, Stagger3::EdgeY, Stagger3::Cell}) {
        Index3 idx{1, 2, 1};
        CHECK(nearest_index(g, s, lattice_position(g, s, idx)) == idx);
    }
}

TEST_CASE("curl of edge values is discretely divergence free") {
    GridDesc3 g{5, 4, 6, 0.7, {}};
    EdgeField3 psi(g);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (auto* a : {&psi.ex, &psi.ey, &psi.ez})
        for (double& v : a->data()) v = U(rng);
    const Array3 div = discrete_divergence(curl_flux(psi));
    CHECK(div.max_abs() < 1e-13);
}

TEST_CASE("edge gradient of a nodal scalar has no circulation") {
    GridDesc3 g{4, 4, 4, 1.0, {}};
    NodalField3 phi(g);
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (double& v : phi.values.data()) v = U(rng);
    const FaceCirculation3 c = face_circulation(nodal_gradient(phi));
    CHECK(c.u.max_abs() < 1e-14);
    CHECK(c.v.max_abs() < 1e-14);
    CHECK(c.w.max_abs() < 1e-14);
}

TEST_CASE("dump round trip is bit exact") {
    GridDesc3 g{3, 2, 4, 0.1, {-0.3, 0.0, 7.0}};
    MacField3 f = testing::random_field(g, 5);
    f.u(0, 0, 0) = 0.1;
    f.u(1, 0, 0) = -0.0;
    f.v(0, 0, 0) = std::numeric_limits<double>::denorm_min();
    f.w(0, 0, 0) = 1e300;
    std::stringstream ss;
    write_dump(ss, to_dump(f));
    const MacField3 back = mac3_from_dump(read_dump(ss));
    CHECK(back.desc == g);
    CHECK(testing::bit_equal(back.u.data(), f.u.data()));
    CHECK(testing::bit_equal(back.v.data(), f.v.data()));
    CHECK(testing::bit_equal(back.w.data(), f.w.data()));
    CHECK(std::signbit(back.u(1, 0, 0)));
}

TEST_CASE("shortest double formatting parses back exactly") {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> U(-1e6, 1e6);
    for (int n = 0; n < 1000; ++n) {
        const double v = U(rng) * std::pow(10.0, n % 40 - 20);
        CHECK(parse_double(format_double(v)) == v);
    }
}

TEST_CASE("malformed dumps are rejected") {
    std::stringstream bad("CURLFLOW MAC2 2 2 1.0 0 0\n# u\n1\n2\n");
    CHECK_THROWS_AS(mac2_from_dump(read_dump(bad)), Error);
    NodalField2 n(GridDesc2{2, 2, 1.0, {}});
    CHECK_THROWS_AS(mac2_from_dump(to_dump(n)), Error);
}

}
