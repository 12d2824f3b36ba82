#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "curlflow/sampler.hpp"

namespace curlflow {

/// Ralston's third-order Runge-Kutta step:
/// k1 = u(x), k2 = u(x + dt/2 k1), k3 = u(x + 3dt/4 k2), x' = x + dt (2k1 + 3k2 + 4k3) / 9.
/// Stage positions are clamped to the sampler's domain before sampling and
/// the result is clamped as well. Negative dt traces backward.
Vec2 rk3_step(Vec2 x, double dt, const VelocitySampler2& s);
Vec3 rk3_step(Vec3 x, double dt, const VelocitySampler3& s);

enum class ParticleStatus : unsigned char { Active, Frozen };
enum class CollisionPolicy { Freeze, Project, None };

const char* policy_name(CollisionPolicy p);

template <class V>
struct ParticleSet {
    std::vector<V> pos;
    std::vector<ParticleStatus> status;
    std::vector<int> birth;  // frame the particle appeared

    std::size_t size() const { return pos.size(); }
    void add(V x, int born = 0) {
        pos.push_back(x);
        status.push_back(ParticleStatus::Active);
        birth.push_back(born);
    }
    std::size_t count(ParticleStatus s) const {
        std::size_t n = 0;
        for (auto t : status) n += t == s;
        return n;
    }
};
using ParticleSet2 = ParticleSet<Vec2>;
using ParticleSet3 = ParticleSet<Vec3>;

struct StepStats {
    long long penetrations = 0;  // particles ending the step inside a solid
    long long frozen = 0;
    long long projected = 0;
};

/// RK3 per active particle; afterwards d(x') < 0 triggers the policy. Frozen
/// particles keep their (penetrating) position forever.
StepStats advect_particles(ParticleSet2& ps, const VelocitySampler2& s, const SolidField2* solid,
                           double dt, CollisionPolicy policy);
StepStats advect_particles(ParticleSet3& ps, const VelocitySampler3& s, const SolidField3* solid,
                           double dt, CollisionPolicy policy);

/// Backtraces every face sample with RK3 through the linear interpolant and
/// resamples the same component there.
MacField2 semi_lagrangian_advect(const MacField2& f, double dt);
MacField3 semi_lagrangian_advect(const MacField3& f, double dt);

/// Closed-form divergence of the bilinear direct interpolant at x.
double direct_linear_divergence(const MacField2& f, Vec2 x);

/// Particles on a jittered lattice of `per_axis` samples per cell side,
/// skipping points inside `solid`. Deterministic in `seed`.
ParticleSet2 seed_particles(const GridDesc2& g, int per_axis, std::uint64_t seed,
                            const SolidField2* solid = nullptr);
ParticleSet3 seed_particles(const GridDesc3& g, int per_axis, std::uint64_t seed,
                            const SolidField3* solid = nullptr);
/// A planar layer x = plane_x filled with an n x n jittered lattice over the
/// box's y-z extents (minus a margin), skipping solid points.
ParticleSet3 seed_plane_x(const Box3& box, double plane_x, int n, double margin,
                          std::uint64_t seed, const SolidField3* solid = nullptr);

/// Keeps the x- inflow wall fed at the lattice density of `per_axis`
/// samples per cell side: every emit() advances the entered length by
/// speed*dt and adds the lattice columns that crossed the wall meanwhile,
/// each at the depth it would have reached.
class InflowEmitter2 {
public:
    InflowEmitter2(const GridDesc2& g, int per_axis, double speed, std::uint64_t seed);
    /// Returns the number of particles added.
    std::size_t emit(ParticleSet2& ps, double dt, int frame, const SolidField2* solid = nullptr);

private:
    GridDesc2 g_;
    int per_axis_;
    double speed_;
    double entered_ = 0.0;
    long long columns_ = 0;
    std::mt19937_64 rng_;
};

/// `frame,id,x,y[,z],status` rows.
void write_particles_csv(std::ostream& os, int frame, const ParticleSet2& ps, bool header);
void write_particles_csv(std::ostream& os, int frame, const ParticleSet3& ps, bool header);

namespace serial {
StepStats advect_particles(ParticleSet2& ps, const VelocitySampler2& s, const SolidField2* solid,
                           double dt, CollisionPolicy policy);
StepStats advect_particles(ParticleSet3& ps, const VelocitySampler3& s, const SolidField3* solid,
                           double dt, CollisionPolicy policy);
}  // namespace serial

}  // namespace curlflow
