#include "curlflow/advection.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "curlflow/error.hpp"
#include "curlflow/field_io.hpp"

namespace curlflow {

const char* policy_name(CollisionPolicy p) {
    switch (p) {
        case CollisionPolicy::Freeze: return "freeze";
        case CollisionPolicy::Project: return "project";
        case CollisionPolicy::None: return "none";
    }
    return "?";
}

namespace {

template <class V, class S>
V rk3(V x, double dt, const S& s) {
    const auto box = s.domain();
    V k1 = s.velocity(x);
    V k2 = s.velocity(box.clamp(x + k1 * (0.5 * dt)));
    V k3 = s.velocity(box.clamp(x + k2 * (0.75 * dt)));
    return box.clamp(x + (k1 * 2.0 + k2 * 3.0 + k3 * 4.0) * (dt / 9.0));
}

template <class V, class S, class Solid>
void step_one(ParticleSet<V>& ps, std::size_t n, const S& s, const Solid* solid, double dt,
              CollisionPolicy policy, StepStats& st) {
    if (ps.status[n] != ParticleStatus::Active) return;
    V x = rk3(ps.pos[n], dt, s);
    if (solid && solid->sample(x).d < 0.0) {
        ++st.penetrations;
        if (policy == CollisionPolicy::Freeze) {
            ps.status[n] = ParticleStatus::Frozen;
            ++st.frozen;
        } else if (policy == CollisionPolicy::Project) {
            x = closest_point(*solid, x).cp;
            ++st.projected;
        }
    }
    ps.pos[n] = x;
}

template <class V, class S, class Solid>
StepStats advect_impl(ParticleSet<V>& ps, const S& s, const Solid* solid, double dt,
                      CollisionPolicy policy, bool parallel) {
    if (ps.status.size() != ps.pos.size()) throw DimensionError("particle status count mismatch");
    const long long n = static_cast<long long>(ps.size());
    long long pen = 0, fr = 0, pr = 0;
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 256) reduction(+ : pen, fr, pr)
        for (long long p = 0; p < n; ++p) {
            StepStats st;
            step_one(ps, static_cast<std::size_t>(p), s, solid, dt, policy, st);
            pen += st.penetrations;
            fr += st.frozen;
            pr += st.projected;
        }
    } else {
        for (long long p = 0; p < n; ++p) {
            StepStats st;
            step_one(ps, static_cast<std::size_t>(p), s, solid, dt, policy, st);
            pen += st.penetrations;
            fr += st.frozen;
            pr += st.projected;
        }
    }
    return {pen, fr, pr};
}

}  // namespace

Vec2 rk3_step(Vec2 x, double dt, const VelocitySampler2& s) { return rk3(x, dt, s); }
Vec3 rk3_step(Vec3 x, double dt, const VelocitySampler3& s) { return rk3(x, dt, s); }

StepStats advect_particles(ParticleSet2& ps, const VelocitySampler2& s, const SolidField2* solid,
                           double dt, CollisionPolicy policy) {
    return advect_impl(ps, s, solid, dt, policy, true);
}

StepStats advect_particles(ParticleSet3& ps, const VelocitySampler3& s, const SolidField3* solid,
                           double dt, CollisionPolicy policy) {
    return advect_impl(ps, s, solid, dt, policy, true);
}

namespace serial {
StepStats advect_particles(ParticleSet2& ps, const VelocitySampler2& s, const SolidField2* solid,
                           double dt, CollisionPolicy policy) {
    return advect_impl(ps, s, solid, dt, policy, false);
}
StepStats advect_particles(ParticleSet3& ps, const VelocitySampler3& s, const SolidField3* solid,
                           double dt, CollisionPolicy policy) {
    return advect_impl(ps, s, solid, dt, policy, false);
}
}  // namespace serial

MacField2 semi_lagrangian_advect(const MacField2& f, double dt) {
    DirectSampler2 s(f, DirectScheme::Linear);
    const auto& g = f.desc;
    MacField2 out(g);
    const Vec2 ou = g.origin + stagger_offset(Stagger2::UFace) * g.h;
    const Vec2 ov = g.origin + stagger_offset(Stagger2::VFace) * g.h;
#pragma omp parallel for schedule(static)
    for (int j = 0; j < g.ny + 1; ++j) {
        if (j < g.ny)
            for (int i = 0; i <= g.nx; ++i)
                out.u(i, j) = interp_linear(f.u, ou, g.h, rk3(g.u_face(i, j), -dt, s));
        for (int i = 0; i < g.nx; ++i)
            out.v(i, j) = interp_linear(f.v, ov, g.h, rk3(g.v_face(i, j), -dt, s));
    }
    return out;
}

MacField3 semi_lagrangian_advect(const MacField3& f, double dt) {
    DirectSampler3 s(f, DirectScheme::Linear);
    const auto& g = f.desc;
    MacField3 out(g);
    const Vec3 ou = g.origin + stagger_offset(Stagger3::UFace) * g.h;
    const Vec3 ov = g.origin + stagger_offset(Stagger3::VFace) * g.h;
    const Vec3 ow = g.origin + stagger_offset(Stagger3::WFace) * g.h;
#pragma omp parallel for schedule(static)
    for (int k = 0; k < g.nz + 1; ++k)
        for (int j = 0; j < g.ny + 1; ++j)
            for (int i = 0; i < g.nx + 1; ++i) {
                if (j < g.ny && k < g.nz)
                    out.u(i, j, k) = interp_linear(f.u, ou, g.h, rk3(g.u_face(i, j, k), -dt, s));
                if (i < g.nx && k < g.nz)
                    out.v(i, j, k) = interp_linear(f.v, ov, g.h, rk3(g.v_face(i, j, k), -dt, s));
                if (i < g.nx && j < g.ny)
                    out.w(i, j, k) = interp_linear(f.w, ow, g.h, rk3(g.w_face(i, j, k), -dt, s));
            }
    return out;
}

double direct_linear_divergence(const MacField2& f, Vec2 x) {
    const auto& g = f.desc;
    x = g.bounds().clamp(x);
    auto cell = [](double s, int n, int& i, double& t) {
        if (n == 1) {
            i = 0;
            t = 0.0;
            return;
        }
        i = std::min(std::max(static_cast<int>(std::floor(s)), 0), n - 2);
        t = std::min(std::max(s - i, 0.0), 1.0);
    };
    // u samples: (nx+1) x ny at (i, j + 1/2); v samples: nx x (ny+1) at (i + 1/2, j).
    const double sx = (x.x - g.origin.x) / g.h, sy = (x.y - g.origin.y) / g.h;
    int iu, ju, iv, jv;
    double unused, bu, av;
    cell(sx, g.nx + 1, iu, unused);
    cell(sy - 0.5, g.ny, ju, bu);
    cell(sx - 0.5, g.nx, iv, av);
    cell(sy, g.ny + 1, jv, unused);
    const int ju1 = std::min(ju + 1, g.ny - 1), iv1 = std::min(iv + 1, g.nx - 1);
    auto lerp = [](double a, double b, double t) { return (1.0 - t) * a + t * b; };
    double dudx = lerp(f.u(iu + 1, ju) - f.u(iu, ju), f.u(iu + 1, ju1) - f.u(iu, ju1), bu);
    double dvdy = lerp(f.v(iv, jv + 1) - f.v(iv, jv), f.v(iv1, jv + 1) - f.v(iv1, jv), av);
    return (dudx + dvdy) / g.h;
}

namespace {

template <class V, class Solid, class Desc>
void seed_lattice(ParticleSet<V>& ps, const Desc& g, int per_axis, std::uint64_t seed,
                  const Solid* solid) {
    if (per_axis < 1) throw ConfigError("particles per axis must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    const double step = g.h / per_axis;
    constexpr int dim = sizeof(V) / sizeof(double);
    int n[3] = {g.nx * per_axis, g.ny * per_axis, 1};
    if constexpr (dim == 3) n[2] = g.nz * per_axis;
    for (int c = 0; c < n[2]; ++c)
        for (int b = 0; b < n[1]; ++b)
            for (int a = 0; a < n[0]; ++a) {
                V x = g.origin;
                const int idx[3] = {a, b, c};
                for (int d = 0; d < dim; ++d) x[d] += (idx[d] + 0.5 + jitter(rng)) * step;
                if (solid && solid->sample(x).d < 0.0) continue;
                ps.add(x);
            }
}

}  // namespace

ParticleSet2 seed_particles(const GridDesc2& g, int per_axis, std::uint64_t seed,
                            const SolidField2* solid) {
    ParticleSet2 ps;
    seed_lattice(ps, g, per_axis, seed, solid);
    return ps;
}

ParticleSet3 seed_particles(const GridDesc3& g, int per_axis, std::uint64_t seed,
                            const SolidField3* solid) {
    ParticleSet3 ps;
    seed_lattice(ps, g, per_axis, seed, solid);
    return ps;
}

InflowEmitter2::InflowEmitter2(const GridDesc2& g, int per_axis, double speed, std::uint64_t seed)
    : g_(g), per_axis_(per_axis), speed_(speed), rng_(seed) {
    if (per_axis < 1) throw ConfigError("particles per axis must be positive");
    if (!(speed > 0.0)) throw ConfigError("inflow emission needs a positive inflow speed");
}

std::size_t InflowEmitter2::emit(ParticleSet2& ps, double dt, int frame, const SolidField2* solid) {
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    const double step = g_.h / per_axis_;
    const double width = g_.nx * g_.h;
    entered_ += speed_ * dt;
    std::size_t added = 0;
    for (; (columns_ + 0.5) * step < entered_; ++columns_) {
        const double depth = entered_ - (columns_ + 0.5) * step;
        for (int b = 0; b < g_.ny * per_axis_; ++b) {
            const double dx = jitter(rng_) * step, dy = jitter(rng_) * step;
            if (depth + dx >= width) continue;
            const Vec2 x{g_.origin.x + std::max(depth + dx, 0.0), g_.origin.y + (b + 0.5) * step + dy};
            if (solid && solid->sample(x).d < 0.0) continue;
            ps.add(x, frame);
            ++added;
        }
    }
    return added;
}

ParticleSet3 seed_plane_x(const Box3& box, double plane_x, int n, double margin,
                          std::uint64_t seed, const SolidField3* solid) {
    if (n < 1) throw ConfigError("plane seeding needs n >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> jitter(-0.25, 0.25);
    ParticleSet3 ps;
    const double ly = box.hi.y - box.lo.y - 2.0 * margin;
    const double lz = box.hi.z - box.lo.z - 2.0 * margin;
    for (int c = 0; c < n; ++c)
        for (int b = 0; b < n; ++b) {
            Vec3 x{plane_x, box.lo.y + margin + (b + 0.5 + jitter(rng)) * ly / n,
                   box.lo.z + margin + (c + 0.5 + jitter(rng)) * lz / n};
            if (solid && solid->sample(x).d < 0.0) continue;
            ps.add(x);
        }
    return ps;
}

void write_particles_csv(std::ostream& os, int frame, const ParticleSet2& ps, bool header) {
    if (header) os << "frame,id,x,y,status\n";
    for (std::size_t n = 0; n < ps.size(); ++n)
        os << frame << ',' << n << ',' << format_double(ps.pos[n].x) << ','
           << format_double(ps.pos[n].y) << ','
           << (ps.status[n] == ParticleStatus::Active ? "active" : "frozen") << '\n';
}

void write_particles_csv(std::ostream& os, int frame, const ParticleSet3& ps, bool header) {
    if (header) os << "frame,id,x,y,z,status\n";
    for (std::size_t n = 0; n < ps.size(); ++n)
        os << frame << ',' << n << ',' << format_double(ps.pos[n].x) << ','
           << format_double(ps.pos[n].y) << ',' << format_double(ps.pos[n].z) << ','
           << (ps.status[n] == ParticleStatus::Active ? "active" : "frozen") << '\n';
}

}  // namespace curlflow
