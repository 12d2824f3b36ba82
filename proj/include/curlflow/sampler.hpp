#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "curlflow/grid.hpp"
#include "curlflow/levelset.hpp"
#include "curlflow/ramp.hpp"
#include "curlflow/rbf.hpp"
#include "curlflow/streamfunc2d.hpp"
#include "curlflow/vecpot3d.hpp"

namespace curlflow {

/// Position -> velocity over a box. Queries outside the box are clamped
/// onto it, so every sampler is total. Implementations are read-only after
/// construction and safe to share across threads.
class VelocitySampler2 {
public:
    virtual ~VelocitySampler2() = default;
    virtual Vec2 velocity(Vec2 x) const = 0;
    virtual Box2 domain() const = 0;
    virtual std::string name() const = 0;
};

class VelocitySampler3 {
public:
    virtual ~VelocitySampler3() = default;
    virtual Vec3 velocity(Vec3 x) const = 0;
    virtual Box3 domain() const = 0;
    virtual std::string name() const = 0;
};

enum class DirectScheme { Linear, MonotoneCubic };

const char* scheme_name(DirectScheme s);

/// Per-component staggered interpolation of MAC samples. Lattice indices are
/// clamped, so beyond the outermost sample row the value is held constant.
double interp_linear(const Array2& a, Vec2 origin, double h, Vec2 x);
double interp_linear(const Array3& a, Vec3 origin, double h, Vec3 x);
/// Tensor-product Fritsch-Carlson monotone cubic over a 4^d stencil.
double interp_monotone_cubic(const Array2& a, Vec2 origin, double h, Vec2 x);
double interp_monotone_cubic(const Array3& a, Vec3 origin, double h, Vec3 x);
/// 1D Fritsch-Carlson Hermite segment between p1 and p2 at t in [0, 1].
double monotone_cubic_1d(double p0, double p1, double p2, double p3, double t);

/// Fills samples with zero weight by averaging known 4/6-neighbours, one
/// breadth-first layer at a time, `layers` deep.
void extrapolate_into_solid(Array2& a, const Array2& weight, int layers = 2);
void extrapolate_into_solid(Array3& a, const Array3& weight, int layers = 2);

class DirectSampler2 : public VelocitySampler2 {
public:
    /// With `geom`, velocities are first extrapolated two layers into solid faces.
    DirectSampler2(MacField2 f, DirectScheme s, const CutCells2* geom = nullptr);
    Vec2 velocity(Vec2 x) const override;
    Box2 domain() const override { return f_.desc.bounds(); }
    std::string name() const override;
    const MacField2& field() const { return f_; }

private:
    MacField2 f_;
    DirectScheme s_;
};

class DirectSampler3 : public VelocitySampler3 {
public:
    DirectSampler3(MacField3 f, DirectScheme s, const CutCells3* geom = nullptr);
    Vec3 velocity(Vec3 x) const override;
    Box3 domain() const override { return f_.desc.bounds(); }
    std::string name() const override;

private:
    MacField3 f_;
    DirectScheme s_;
};

class CurlFlowSampler2 : public VelocitySampler2 {
public:
    CurlFlowSampler2(std::shared_ptr<const StreamField2> sf, KernelOrder k);
    /// Velocity becomes the curl of the ramped stream function.
    void enable_ramp(std::vector<RampBoundary2> bounds, RampParams p,
                     RampCounters* counters = nullptr);
    Vec2 velocity(Vec2 x) const override;
    ValueGrad2 psi(Vec2 x) const;
    Box2 domain() const override { return sf_->desc.bounds(); }
    std::string name() const override;

private:
    std::shared_ptr<const StreamField2> sf_;
    KernelOrder k_;
    std::optional<RampedStream2> ramp_;
};

class CurlFlowSampler3 : public VelocitySampler3 {
public:
    CurlFlowSampler3(std::shared_ptr<const PotentialInterpolant3> psi, KernelOrder k);
    /// Tangential psi ramps on the listed walls (see RampedPotential3).
    void enable_wall_ramp(std::vector<int> walls, RampParams p);
    Vec3 velocity(Vec3 x) const override;
    PotentialSample3 potential(Vec3 x) const;
    Box3 domain() const override { return psi_->desc().bounds(); }
    std::string name() const override;

private:
    std::shared_ptr<const PotentialInterpolant3> psi_;
    KernelOrder k_;
    std::optional<RampedPotential3> ramp_;
};

/// Normal-velocity ramp toward a static (or uniformly moving) solid.
class VelocityRampSampler3 : public VelocitySampler3 {
public:
    VelocityRampSampler3(std::shared_ptr<const VelocitySampler3> inner,
                         std::shared_ptr<const SolidField3> solid, RampParams p,
                         Vec3 u_solid = {}, RampCounters* counters = nullptr);
    Vec3 velocity(Vec3 x) const override;
    Box3 domain() const override { return inner_->domain(); }
    std::string name() const override { return inner_->name() + "+velocity_ramp"; }

private:
    std::shared_ptr<const VelocitySampler3> inner_;
    std::shared_ptr<const SolidField3> solid_;
    RampParams p_;
    Vec3 u_solid_;
    RampCounters* counters_;
};

class RbfAugmentedSampler3 : public VelocitySampler3 {
public:
    RbfAugmentedSampler3(std::shared_ptr<const VelocitySampler3> inner,
                         std::shared_ptr<const RbfModel> model)
        : inner_(std::move(inner)), model_(std::move(model)) {}
    Vec3 velocity(Vec3 x) const override;
    Box3 domain() const override { return inner_->domain(); }
    std::string name() const override { return inner_->name() + "+rbf"; }

private:
    std::shared_ptr<const VelocitySampler3> inner_;
    std::shared_ptr<const RbfModel> model_;
};

class SummedSampler3 : public VelocitySampler3 {
public:
    SummedSampler3(std::shared_ptr<const VelocitySampler3> a,
                   std::shared_ptr<const VelocitySampler3> b)
        : a_(std::move(a)), b_(std::move(b)) {}
    Vec3 velocity(Vec3 x) const override;
    Box3 domain() const override { return a_->domain(); }
    std::string name() const override { return a_->name() + "+" + b_->name(); }

private:
    std::shared_ptr<const VelocitySampler3> a_, b_;
};

/// Closed-form fields, used by tests and the measurement self-checks.
class AnalyticSampler2 : public VelocitySampler2 {
public:
    AnalyticSampler2(std::function<Vec2(Vec2)> f, Box2 box, std::string name = "analytic")
        : f_(std::move(f)), box_(box), name_(std::move(name)) {}
    Vec2 velocity(Vec2 x) const override { return f_(box_.clamp(x)); }
    Box2 domain() const override { return box_; }
    std::string name() const override { return name_; }

private:
    std::function<Vec2(Vec2)> f_;
    Box2 box_;
    std::string name_;
};

class AnalyticSampler3 : public VelocitySampler3 {
public:
    AnalyticSampler3(std::function<Vec3(Vec3)> f, Box3 box, std::string name = "analytic")
        : f_(std::move(f)), box_(box), name_(std::move(name)) {}
    Vec3 velocity(Vec3 x) const override { return f_(box_.clamp(x)); }
    Box3 domain() const override { return box_; }
    std::string name() const override { return name_; }

private:
    std::function<Vec3(Vec3)> f_;
    Box3 box_;
    std::string name_;
};

}  // namespace curlflow
