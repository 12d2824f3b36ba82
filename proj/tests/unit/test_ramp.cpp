#include <cmath>
#include <memory>
#include <random>

#include "curlflow/diagnostics.hpp"
#include "curlflow/error.hpp"
#include "curlflow/kernel.hpp"
#include "curlflow/ramp.hpp"
#include "curlflow/sampler.hpp"
#include "curlflow/scenario.hpp"
#include "doctest.h"

using namespace curlflow;

TEST_SUITE("kernel") {

TEST_CASE("quadratic B-spline weights at a sample") {
    const Stencil1 st = kernel_stencil(KernelOrder::Quadratic, 3.0);
    CHECK(st.base == 2);
    CHECK(st.w[0] == doctest::Approx(0.125));
    CHECK(st.w[1] == doctest::Approx(0.75));
    CHECK(st.w[2] == doctest::Approx(0.125));
    CHECK(st.dw[0] == doctest::Approx(-0.5));
    CHECK(st.dw[2] == doctest::Approx(0.5));
}

TEST_CASE("weights form a partition of unity with matching derivatives") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-3.0, 7.0);
    for (auto k : {KernelOrder::Linear, KernelOrder::Quadratic}) {
        for (int n = 0; n < 500; ++n) {
            const double s = U(rng);
            const Stencil1 st = kernel_stencil(k, s);
            double sum = 0.0, dsum = 0.0, first = 0.0;
            for (int c = 0; c < st.count; ++c) {
                sum += st.w[c];
                dsum += st.dw[c];
                first += st.w[c] * (st.base + c);
            }
            CHECK(sum == doctest::Approx(1.0));
            CHECK(std::abs(dsum) < 1e-12);
            // both kernels reproduce linear data
            CHECK(first == doctest::Approx(s));
        }
    }
}

TEST_CASE("kernel derivative matches finite differences") {
    const double e = 1e-6;
    for (double s : {0.2, 0.7, 1.3, 2.61}) {
        const Stencil1 a = kernel_stencil(KernelOrder::Quadratic, s - e);
        const Stencil1 b = kernel_stencil(KernelOrder::Quadratic, s + e);
        const Stencil1 m = kernel_stencil(KernelOrder::Quadratic, s);
        REQUIRE(a.base == b.base);
        for (int c = 0; c < 3; ++c) CHECK(m.dw[c] == doctest::Approx((b.w[c] - a.w[c]) / (2 * e)).epsilon(1e-6));
    }
}

TEST_CASE("lattice interpolation reproduces affine data inside the ghost ring") {
    Lattice2 l(6, 5, {0.5, -1.0}, 0.5);
    for (int j = -1; j <= 5; ++j)
        for (int i = -1; i <= 6; ++i) l.at(i, j) = 2.0 + 0.3 * (0.5 + 0.5 * i) - 1.7 * (-1.0 + 0.5 * j);
    for (auto k : {KernelOrder::Linear, KernelOrder::Quadratic}) {
        const auto r = l.eval({1.8, 0.1}, k);
        CHECK(r.value == doctest::Approx(2.0 + 0.3 * 1.8 - 1.7 * 0.1));
        CHECK(r.grad.x == doctest::Approx(0.3));
        CHECK(r.grad.y == doctest::Approx(-1.7));
    }
}

}

TEST_SUITE("boundary_ramp") {

TEST_CASE("profiles hit their closed-form values") {
    CHECK(profile_eval(RampProfile::BridsonRamp, 0.5) == doctest::Approx(0.79296875));
    CHECK(profile_eval(RampProfile::Smoothstep, 0.5) == doctest::Approx(0.5));
    CHECK(profile_eval(RampProfile::BridsonRamp, 0.0) == 0.0);
    CHECK(profile_eval(RampProfile::BridsonRamp, 1.0) == 1.0);
    CHECK(profile_eval(RampProfile::Smoothstep, 2.0) == 1.0);
    CHECK(profile_slope(RampProfile::BridsonRamp, 0.0) == doctest::Approx(15.0 / 8.0));
    CHECK(profile_slope(RampProfile::BridsonRamp, 1.0) == 0.0);
    CHECK(profile_slope(RampProfile::Smoothstep, -0.1) == 0.0);
}

TEST_CASE("profile slopes match finite differences") {
    for (auto p : {RampProfile::BridsonRamp, RampProfile::Smoothstep})
        for (double t = 0.05; t < 1.0; t += 0.1) {
            const double e = 1e-6;
            const double fd = (profile_eval(p, t + e) - profile_eval(p, t - e)) / (2 * e);
            CHECK(profile_slope(p, t) == doctest::Approx(fd).epsilon(1e-6));
        }
}

TEST_CASE("ramp parameters and names are checked") {
    RampParams p;
    p.d0 = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    CHECK(parse_mode(mode_name(RampMode::MultiplicativeTargeted)) == RampMode::MultiplicativeTargeted);
    CHECK(parse_profile("smoothstep") == RampProfile::Smoothstep);
    CHECK_THROWS_AS(parse_mode("sideways"), ConfigError);
}

namespace {

ValueGrad2 wavy(Vec2 x) {
    ValueGrad2 r;
    r.value = std::sin(x.x) + 0.5 * x.y * x.y;
    r.grad = {std::cos(x.x), x.y};
    return r;
}

}  // namespace

TEST_CASE("every mode pins psi at the boundary and is untouched beyond d0") {
    GridDesc2 g{8, 8, 1.0, {}};
    const auto wall = RampBoundary2::domain_wall(g, 0, 0.4);
    for (auto mode : {RampMode::Additive, RampMode::MultiplicativeTargeted}) {
        RampParams p;
        p.mode = mode;
        p.d0 = 1.5;
        for (double y : {0.5, 2.0, 7.5}) {
            CHECK(ramp_psi_2d(wavy, {0.0, y}, wall, p).value == doctest::Approx(0.4));
            const auto far = ramp_psi_2d(wavy, {1.6, y}, wall, p);
            CHECK(far.value == wavy({1.6, y}).value);
        }
    }
    RampParams z;
    z.mode = RampMode::MultiplicativeZero;
    CHECK(ramp_psi_2d(wavy, {0.0, 3.0}, wall, z).value == 0.0);
}

TEST_CASE("ramped gradients match finite differences of ramped values") {
    auto disk = std::make_shared<Circle>(Vec2{4.0, 4.0}, 1.5);
    const auto b = RampBoundary2::solid_part(disk, 0, 0.2);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (auto mode : {RampMode::Additive, RampMode::MultiplicativeTargeted, RampMode::MultiplicativeZero}) {
        RampParams p;
        p.mode = mode;
        for (int n = 0; n < 50; ++n) {
            const double th = 2 * M_PI * U(rng), r = 1.55 + 0.9 * U(rng);
            const Vec2 x{4.0 + r * std::cos(th), 4.0 + r * std::sin(th)};
            const double e = 1e-6;
            const auto c = ramp_psi_2d(wavy, x, b, p);
            const double gx = (ramp_psi_2d(wavy, x + Vec2{e, 0}, b, p).value -
                               ramp_psi_2d(wavy, x - Vec2{e, 0}, b, p).value) / (2 * e);
            const double gy = (ramp_psi_2d(wavy, x + Vec2{0, e}, b, p).value -
                               ramp_psi_2d(wavy, x - Vec2{0, e}, b, p).value) / (2 * e);
            CHECK(c.grad.x == doctest::Approx(gx).epsilon(1e-5));
            CHECK(c.grad.y == doctest::Approx(gy).epsilon(1e-5));
        }
    }
}

TEST_CASE("ramped 2D curl flow does not leak through closed walls") {
    GridDesc2 g{6, 5, 1.0, {}};
    const MacField2 f = random_divergence_free(g, DomainBc::closed(), 3, 1e-12);
    auto sf = std::make_shared<StreamField2>(sweep_stream_function(f));
    CurlFlowSampler2 s(sf, KernelOrder::Quadratic);
    RampParams p;
    s.enable_ramp(ramp_boundaries_2d(*sf, DomainBc::closed(), nullptr), p);
    for (int w = 0; w < 4; ++w) CHECK(wall_flux_scan(s, w, 500, 10 + w).max < 1e-12);
}

TEST_CASE("3D tangential ramp zeroes the wall-parallel potential") {
    GridDesc3 g{4, 4, 4, 1.0, {}};
    const DomainBc bc = DomainBc::closed();
    const auto raw = parallel_sweep_3d(random_divergence_free(g, bc, 4, 1e-12), bc);
    PotentialInterpolant3 interp(raw.edges);
    RampedPotential3 rp(&interp, KernelOrder::Quadratic, {0, 1, 2, 3, 4, 5}, RampParams{});
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 4.0);
    for (int n = 0; n < 200; ++n) {
        const auto top = rp.eval({U(rng), U(rng), 4.0});
        CHECK(std::abs(top.value.x) < 1e-14);
        CHECK(std::abs(top.value.y) < 1e-14);
        CHECK(std::abs(rp.velocity({U(rng), U(rng), 4.0}).z) < 1e-12);
    }
}

TEST_CASE("velocity ramp removes normal flow at a sphere") {
    GridDesc3 g{10, 10, 10, 1.0, {}};
    auto base = std::make_shared<AnalyticSampler3>([](Vec3) { return Vec3{0.3, -0.2, 1.0}; }, g.bounds());
    auto sphere = std::make_shared<Sphere>(Vec3{5.0, 5.0, 5.0}, 2.0);
    VelocityRampSampler3 s(base, sphere, RampParams{});
    const auto scan = solid_flux_scan(s, *sphere, g.bounds(), 500, 6);
    CHECK(scan.max < 1e-12);
}

}
