#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "curlflow/kernel.hpp"
#include "curlflow/levelset.hpp"
#include "curlflow/streamfunc2d.hpp"
#include "curlflow/vecpot3d.hpp"

namespace curlflow {

enum class RampProfile { BridsonRamp, Smoothstep };
enum class RampMode { Additive, MultiplicativeTargeted, MultiplicativeZero };

const char* profile_name(RampProfile p);
const char* mode_name(RampMode m);
/// Accepts the names above ("bridson_ramp", "smoothstep", "additive",
/// "multiplicative_targeted", "multiplicative_zero"); throws ConfigError.
RampProfile parse_profile(const std::string& s);
RampMode parse_mode(const std::string& s);

struct RampParams {
    double d0 = 1.0;
    RampProfile profile = RampProfile::BridsonRamp;
    RampMode mode = RampMode::Additive;

    /// Throws ConfigError unless d0 > 0.
    void validate() const;
};

/// (15t - 10t^3 + 3t^5) / 8 or 3t^2 - 2t^3, clamped to [0, 1].
double profile_eval(RampProfile p, double t);
/// d profile / dt, one-sided at 0; zero outside [0, 1).
double profile_slope(RampProfile p, double t);

/// Shared by concurrent queries; relaxed atomics.
struct RampCounters {
    std::atomic<long long> degenerate{0};  // closest point unusable, fallback taken
    std::atomic<long long> skipped{0};     // velocity ramp skipped

    void reset() {
        degenerate = 0;
        skipped = 0;
    }
};

/// A boundary the 2D ramp drives psi toward: a closed domain wall or one solid.
struct RampBoundary2 {
    enum class Kind { Wall, Solid } kind = Kind::Wall;
    int wall = 0;                              // 0:x- 1:x+ 2:y- 3:y+
    Box2 box{};                                // domain extents for walls
    std::shared_ptr<const SolidField2> solid;  // for solids
    int solid_id = 0;
    double psi_c = 0.0;

    static RampBoundary2 domain_wall(const GridDesc2& g, int wall, double psi_c);
    static RampBoundary2 solid_part(std::shared_ptr<const SolidField2> s, int id, double psi_c);

    DistanceSample2 distance(Vec2 x) const;
    ClosestPoint2 closest(Vec2 x) const;
};

using PsiFn2 = std::function<ValueGrad2(Vec2)>;

/// Ramps psi toward the boundary's psi_c, returning value and analytic
/// gradient. ADDITIVE: psi + (psi_c - psi(cp))(1 - a); MULTIPLICATIVE_TARGETED:
/// a psi + (1 - a) psi_c; MULTIPLICATIVE_ZERO: a psi, with a = profile(d / d0).
/// A degenerate closest point makes ADDITIVE fall back to the targeted form.
ValueGrad2 ramp_psi_2d(const PsiFn2& psi, Vec2 x, const RampBoundary2& b, const RampParams& p,
                       RampCounters* counters = nullptr);

/// Stream function interpolant with ramps applied one boundary after another
/// (walls x-, x+, y-, y+ first, then solids in id order).
class RampedStream2 {
public:
    RampedStream2(const StreamField2* sf, KernelOrder k, std::vector<RampBoundary2> bounds,
                  RampParams p, RampCounters* counters = nullptr);

    ValueGrad2 eval(Vec2 x) const { return eval_level(static_cast<int>(bounds_.size()), x); }
    Vec2 velocity(Vec2 x) const {
        ValueGrad2 r = eval(x);
        return {r.grad.y, -r.grad.x};
    }
    const std::vector<RampBoundary2>& boundaries() const { return bounds_; }

private:
    ValueGrad2 eval_level(int level, Vec2 x) const;

    const StreamField2* sf_;
    KernelOrder k_;
    std::vector<RampBoundary2> bounds_;
    RampParams p_;
    RampCounters* counters_;
};

/// Boundaries for every closed wall (psi_c from the wall's corner node) and
/// every solid part that owns solid nodes (psi_c from its deepest node's
/// component). Parts without solid nodes are skipped.
std::vector<RampBoundary2> ramp_boundaries_2d(const StreamField2& sf, const DomainBc& bc,
                                              std::shared_ptr<const SolidField2> solids);

using PotentialFn3 = std::function<PotentialSample3(Vec3)>;

/// Ramps the two tangential psi components toward 0 at one axis wall of box.
/// Normal component and far field (d >= d0) are untouched.
PotentialSample3 ramp_tangential_psi_3d(const PotentialFn3& psi, Vec3 x, const Box3& box,
                                        int wall, const RampParams& p);

/// Potential interpolant with tangential ramps on the given walls, applied in
/// wall order (x-, x+, y-, y+, z-, z+).
class RampedPotential3 {
public:
    RampedPotential3(const PotentialInterpolant3* psi, KernelOrder k, std::vector<int> walls,
                     RampParams p);

    PotentialSample3 eval(Vec3 x) const { return eval_level(static_cast<int>(walls_.size()), x); }
    Vec3 velocity(Vec3 x) const { return curl_of(eval(x).jac); }

private:
    PotentialSample3 eval_level(int level, Vec3 x) const;

    const PotentialInterpolant3* psi_;
    KernelOrder k_;
    std::vector<int> walls_;
    RampParams p_;
};

using VelocityFn3 = std::function<Vec3(Vec3)>;

/// u + (u_solid.n - u(cp).n)(1 - a) n with n the unit level-set gradient at x.
/// Degenerate normals skip the correction and count it.
Vec3 ramp_normal_velocity(const VelocityFn3& u, Vec3 x, const SolidField3& solid, Vec3 u_solid,
                          const RampParams& p, RampCounters* counters = nullptr);

}  // namespace curlflow
