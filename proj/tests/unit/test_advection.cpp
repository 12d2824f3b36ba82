#include <omp.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "curlflow/advection.hpp"
#include "curlflow/scenario.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace curlflow;

TEST_SUITE("advection") {

TEST_CASE("rk3 matches its stability polynomial on linear flow") {
    // u = lambda x: one step multiplies by 1 + z + z^2/2 + z^3/6, z = lambda dt
    const double lambda = 0.7;
    AnalyticSampler2 s([&](Vec2 x) { return x * lambda; }, Box2{{-100.0, -100.0}, {100.0, 100.0}});
    for (double dt : {0.1, 0.5, 1.0}) {
        const double z = lambda * dt;
        const double amp = 1.0 + z + z * z / 2.0 + z * z * z / 6.0;
        const Vec2 x = rk3_step({1.0, -2.0}, dt, s);
        CHECK(x.x == doctest::Approx(amp).epsilon(1e-14));
        CHECK(x.y == doctest::Approx(-2.0 * amp).epsilon(1e-14));
    }
}

TEST_CASE("rk3 is third order on rotation") {
    AnalyticSampler3 rot([](Vec3 x) { return Vec3{-x.y, x.x, 0.0}; }, Box3{{-2, -2, -2}, {2, 2, 2}});
    auto err = [&](int n) {
        Vec3 x{1.0, 0.0, 0.5};
        for (int s = 0; s < n; ++s) x = rk3_step(x, 1.0 / n, rot);
        return norm(x - Vec3{std::cos(1.0), std::sin(1.0), 0.5});
    };
    const double order = std::log2(err(32) / err(64));
    CHECK(order > 2.8);
    CHECK(order < 3.2);
}

TEST_CASE("steps stay inside the domain") {
    AnalyticSampler2 s([](Vec2) { return Vec2{5.0, 0.0}; }, Box2{{0.0, 0.0}, {2.0, 2.0}});
    const Vec2 x = rk3_step({1.5, 1.0}, 1.0, s);
    CHECK(x.x == 2.0);
    CHECK(x.y == 1.0);
}

TEST_CASE("collision policies") {
    auto disk = std::make_shared<Circle>(Vec2{5.0, 2.0}, 1.0);
    AnalyticSampler2 s([](Vec2) { return Vec2{1.0, 0.0}; }, Box2{{0.0, 0.0}, {10.0, 4.0}});
    SUBCASE("freeze keeps the penetrating position") {
        ParticleSet2 ps;
        ps.add({3.5, 2.0});
        const auto st = advect_particles(ps, s, disk.get(), 1.0, CollisionPolicy::Freeze);
        CHECK(st.frozen == 1);
        CHECK(ps.status[0] == ParticleStatus::Frozen);
        const Vec2 at = ps.pos[0];
        CHECK(at.x == doctest::Approx(4.5));
        advect_particles(ps, s, disk.get(), 1.0, CollisionPolicy::Freeze);
        CHECK(ps.pos[0].x == at.x);
    }
    SUBCASE("project returns to the surface") {
        ParticleSet2 ps;
        ps.add({3.5, 2.0});
        const auto st = advect_particles(ps, s, disk.get(), 1.0, CollisionPolicy::Project);
        CHECK(st.projected == 1);
        CHECK(ps.status[0] == ParticleStatus::Active);
        CHECK(disk->sample(ps.pos[0]).d >= -1e-12);
    }
    SUBCASE("none only counts") {
        ParticleSet2 ps;
        ps.add({3.5, 2.0});
        const auto st = advect_particles(ps, s, disk.get(), 1.0, CollisionPolicy::None);
        CHECK(st.penetrations == 1);
        CHECK(ps.status[0] == ParticleStatus::Active);
    }
}

TEST_CASE("parallel advection matches the serial reference bit for bit") {
    GridDesc3 g{8, 8, 8, 1.0, {}};
    const DomainBc bc = DomainBc::closed();
    const auto raw = parallel_sweep_3d(random_divergence_free(g, bc, 1, 1e-12), bc);
    CurlFlowSampler3 s(std::make_shared<PotentialInterpolant3>(raw.edges), KernelOrder::Quadratic);
    Sphere sphere({4.0, 4.0, 4.0}, 1.5);
    ParticleSet3 a = seed_particles(g, 2, 3, &sphere);
    ParticleSet3 b = a;
    omp_set_num_threads(4);
    for (int step = 0; step < 5; ++step) {
        advect_particles(a, s, &sphere, 0.5, CollisionPolicy::Freeze);
        serial::advect_particles(b, s, &sphere, 0.5, CollisionPolicy::Freeze);
    }
    REQUIRE(a.size() == b.size());
    for (std::size_t n = 0; n < a.size(); ++n) {
        CHECK(norm(a.pos[n] - b.pos[n]) == 0.0);
        CHECK(a.status[n] == b.status[n]);
    }
}

TEST_CASE("seeding is deterministic and avoids solids") {
    GridDesc2 g{6, 4, 1.0, {}};
    Circle c({3.0, 2.0}, 1.0);
    const auto a = seed_particles(g, 3, 9, &c), b = seed_particles(g, 3, 9, &c);
    REQUIRE(a.size() == b.size());
    CHECK(a.size() < 6u * 4u * 9u);
    for (std::size_t n = 0; n < a.size(); ++n) {
        CHECK(norm(a.pos[n] - b.pos[n]) == 0.0);
        CHECK(c.sample(a.pos[n]).d >= 0.0);
    }
}

TEST_CASE("inflow emitter keeps the lattice density") {
    GridDesc2 g{10, 4, 1.0, {}};
    InflowEmitter2 em(g, 2, 0.5, 7);
    ParticleSet2 ps;
    std::size_t added = 0;
    for (int f = 1; f <= 8; ++f) added += em.emit(ps, 1.0, f);
    // 8 time units at 0.5 cells per unit: four cells of columns, 2 per cell, 8 per column
    CHECK(added == 4u * 2u * 8u);
    for (std::size_t n = 0; n < ps.size(); ++n) {
        CHECK(ps.pos[n].x >= 0.0);
        CHECK(ps.pos[n].x < 4.0);
        CHECK(ps.birth[n] >= 1);
    }
}

TEST_CASE("particle csv has one row per particle") {
    ParticleSet2 ps;
    ps.add({1.0, 2.0});
    ps.add({0.5, 0.25});
    std::ostringstream os;
    write_particles_csv(os, 3, ps, true);
    const std::string s = os.str();
    CHECK(std::count(s.begin(), s.end(), '\n') == 3);
    CHECK(s.rfind("frame,id,x,y,status", 0) == 0);
}

TEST_CASE("semi-Lagrangian advection keeps a uniform field") {
    GridDesc2 g{6, 6, 1.0, {}};
    MacField2 f(g);
    f.u.fill(0.3);
    f.v.fill(-0.2);
    const MacField2 a = semi_lagrangian_advect(f, 0.7);
    CHECK(a.u(3, 3) == doctest::Approx(0.3));
    CHECK(a.v(2, 4) == doctest::Approx(-0.2));
}

}
