#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "curlflow/error.hpp"
#include "curlflow/rbf.hpp"
#include "doctest.h"

using namespace curlflow;

namespace {

// scalar generator, differentiated numerically as the oracle
double phi(Vec3 d, const RbfParams& p) {
    const double r2 = dot(d, d);
    const double q = 1.0 - r2 / (p.cutoff * p.cutoff);
    if (q <= 0.0) return 0.0;
    return std::exp(-r2 / (p.sigma * p.sigma)) * std::pow(q, p.nu);
}

Mat3 fd_kernel(Vec3 d, const RbfParams& p) {
    const double e = 1e-4;
    Mat3 hess;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            Vec3 ea, eb;
            ea[a] = e;
            eb[b] = e;
            hess[a][b] = (phi(d + ea + eb, p) - phi(d + ea - eb, p) - phi(d - ea + eb, p) +
                          phi(d - ea - eb, p)) / (4 * e * e);
        }
    const double lap = hess[0][0] + hess[1][1] + hess[2][2];
    for (int a = 0; a < 3; ++a) hess[a][a] -= lap;
    return hess;
}

}  // namespace

TEST_SUITE("rbf_correction") {

TEST_CASE("matrix kernel equals grad grad^T - laplacian I of the generator") {
    const RbfParams p = RbfParams::for_spacing(1.0);
    CHECK(p.sigma == doctest::Approx(1.2));
    CHECK(p.cutoff == doctest::Approx(3.6));
    CHECK(p.nu == 3);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int n = 0; n < 100; ++n) {
        const Vec3 d{U(rng), U(rng), U(rng)};
        const Mat3 k = matrix_kernel(d, p), o = fd_kernel(d, p);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) CHECK(k[a][b] == doctest::Approx(o[a][b]).epsilon(1e-5).scale(1.0));
    }
    CHECK(matrix_kernel({3.6, 0.0, 0.0}, p)[0][0] == 0.0);
    CHECK(matrix_kernel({2.0, 3.0, 0.1}, p)[1][1] == 0.0);
}

TEST_CASE("every kernel column is divergence free") {
    const RbfParams p = RbfParams::for_spacing(0.5);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const double e = 1e-5;
    for (int n = 0; n < 100; ++n) {
        const Vec3 d{U(rng), U(rng), U(rng)};
        for (int col = 0; col < 3; ++col) {
            double div = 0.0;
            for (int a = 0; a < 3; ++a) {
                Vec3 ea;
                ea[a] = e;
                div += (matrix_kernel(d + ea, p)[a][col] - matrix_kernel(d - ea, p)[a][col]) / (2 * e);
            }
            CHECK(std::abs(div) < 1e-6);
        }
    }
}

TEST_CASE("the fit interpolates its targets") {
    const RbfParams p = RbfParams::for_spacing(1.0);
    std::vector<Vec3> centers, targets;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int n = 0; n < 40; ++n) {
        const double th = 2.0 * M_PI * n / 40.0;
        centers.push_back({5.0 + 3.0 * std::cos(th), 5.0 + 3.0 * std::sin(th), 5.0 + 0.3 * (n % 3)});
        targets.push_back({U(rng), U(rng), U(rng)});
    }
    RbfFitStats st;
    const RbfModel m = fit(centers, targets, p, 1e-12, &st);
    CHECK(st.iterations > 0);
    for (std::size_t n = 0; n < centers.size(); ++n) {
        const Vec3 v = m.eval(centers[n]);
        CHECK(norm(v - targets[n]) < 1e-8);
    }
    CHECK(norm(m.eval({30.0, 30.0, 30.0})) == 0.0);
}

TEST_CASE("coincident centers are rejected") {
    const RbfParams p = RbfParams::for_spacing(1.0);
    std::vector<Vec3> c = {{1.0, 1.0, 1.0}, {1.0, 1.0, 1.0 + 1e-9}};
    std::vector<Vec3> t = {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    CHECK_THROWS_AS(fit(c, t, p), Error);
}

TEST_CASE("surface vertices lie on the sphere and are welded") {
    GridDesc3 g{12, 12, 12, 1.0, {}};
    Sphere s({6.0, 6.0, 6.0}, 3.3);
    const auto v = surface_vertices(LevelSet3::from_solid(g, s), s, 0.25);
    REQUIRE(v.size() > 50);
    for (std::size_t a = 0; a < v.size(); ++a) {
        CHECK(std::abs(norm(v[a] - Vec3{6.0, 6.0, 6.0}) - 3.3) < 1e-10);
        for (std::size_t b = a + 1; b < v.size(); ++b) CHECK(norm(v[a] - v[b]) >= 0.25);
    }
}

TEST_CASE("model save and load round trip") {
    const RbfParams p = RbfParams::for_spacing(1.0);
    std::vector<Vec3> c = {{1.0, 2.0, 3.0}, {2.5, 2.0, 3.0}, {1.0, 3.7, 2.2}};
    std::vector<Vec3> t = {{0.1, 0.2, 0.3}, {-0.4, 0.0, 0.9}, {0.0, 1.0, -1.0}};
    const RbfModel m = fit(c, t, p, 1e-12);
    const auto path = std::filesystem::temp_directory_path() /
                      ("curlflow_rbf_" + std::to_string(::getpid()) + ".txt");
    save_rbf(path.string(), m);
    const RbfModel back = load_rbf(path.string());
    std::filesystem::remove(path);
    REQUIRE(back.centers.size() == 3);
    for (std::size_t n = 0; n < 3; ++n) {
        CHECK(norm(back.centers[n] - m.centers[n]) == 0.0);
        CHECK(norm(back.coeffs[n] - m.coeffs[n]) == 0.0);
    }
    const Vec3 x{1.7, 2.6, 2.9};
    CHECK(norm(back.eval(x) - m.eval(x)) == 0.0);
}

}
