#pragma once

#include <memory>
#include <vector>

#include "curlflow/grid.hpp"

namespace curlflow {

/// Signed distance sample; d < 0 inside solid. `hess` is the Hessian of d
/// where known (zero for grid-interpolated level sets).
struct DistanceSample2 {
    double d = 0.0;
    Vec2 grad{};
    Mat2 hess{};
    int solid_id = 0;
};

struct DistanceSample3 {
    double d = 0.0;
    Vec3 grad{};
    Mat3 hess{};
    int solid_id = 0;
};

class SolidField2 {
public:
    virtual ~SolidField2() = default;
    virtual DistanceSample2 sample(Vec2 x) const = 0;
    virtual int solid_count() const { return 1; }
    /// Distance to one particular solid; defaults to the whole field.
    virtual DistanceSample2 sample_solid(int /*id*/, Vec2 x) const { return sample(x); }
};

class SolidField3 {
public:
    virtual ~SolidField3() = default;
    virtual DistanceSample3 sample(Vec3 x) const = 0;
    virtual int solid_count() const { return 1; }
    virtual DistanceSample3 sample_solid(int /*id*/, Vec3 x) const { return sample(x); }
};

// ---- analytic shapes ------------------------------------------------------

class Circle : public SolidField2 {
public:
    Circle(Vec2 c, double r) : c_(c), r_(r) {}
    DistanceSample2 sample(Vec2 x) const override;
    Vec2 center() const { return c_; }
    double radius() const { return r_; }

private:
    Vec2 c_;
    double r_;
};

class Rect : public SolidField2 {
public:
    Rect(Vec2 lo, Vec2 hi) : lo_(lo), hi_(hi) {}
    DistanceSample2 sample(Vec2 x) const override;

private:
    Vec2 lo_, hi_;
};

/// Solid made of an open polyline thickened to `thickness`.
class Polyline : public SolidField2 {
public:
    Polyline(std::vector<Vec2> pts, double thickness)
        : pts_(std::move(pts)), half_(0.5 * thickness) {}
    DistanceSample2 sample(Vec2 x) const override;

private:
    std::vector<Vec2> pts_;
    double half_;
};

/// Union by minimum distance; solid_id reports the index of the nearest part.
class Union2 : public SolidField2 {
public:
    void add(std::shared_ptr<const SolidField2> s) { parts_.push_back(std::move(s)); }
    DistanceSample2 sample(Vec2 x) const override;
    int solid_count() const override { return static_cast<int>(parts_.size()); }
    DistanceSample2 sample_solid(int id, Vec2 x) const override;
    bool empty() const { return parts_.empty(); }

private:
    std::vector<std::shared_ptr<const SolidField2>> parts_;
};

class Sphere : public SolidField3 {
public:
    Sphere(Vec3 c, double r) : c_(c), r_(r) {}
    DistanceSample3 sample(Vec3 x) const override;
    Vec3 center() const { return c_; }
    double radius() const { return r_; }

private:
    Vec3 c_;
    double r_;
};

class Cuboid : public SolidField3 {
public:
    Cuboid(Vec3 lo, Vec3 hi) : lo_(lo), hi_(hi) {}
    DistanceSample3 sample(Vec3 x) const override;

private:
    Vec3 lo_, hi_;
};

/// Solid half-space {n.x < offset}, n unit.
class HalfSpace3 : public SolidField3 {
public:
    HalfSpace3(Vec3 n, double offset) : n_(n / norm(n)), off_(offset) {}
    DistanceSample3 sample(Vec3 x) const override;

private:
    Vec3 n_;
    double off_;
};

class Union3 : public SolidField3 {
public:
    void add(std::shared_ptr<const SolidField3> s) { parts_.push_back(std::move(s)); }
    DistanceSample3 sample(Vec3 x) const override;
    int solid_count() const override { return static_cast<int>(parts_.size()); }
    DistanceSample3 sample_solid(int id, Vec3 x) const override;
    bool empty() const { return parts_.empty(); }

private:
    std::vector<std::shared_ptr<const SolidField3>> parts_;
};

// ---- nodal level sets -----------------------------------------------------

struct LevelSet2 {
    NodalField2 phi;
    static LevelSet2 from_solid(const GridDesc2& g, const SolidField2& s);
    static LevelSet2 all_fluid(const GridDesc2& g);
};

struct LevelSet3 {
    NodalField3 phi;
    static LevelSet3 from_solid(const GridDesc3& g, const SolidField3& s);
    static LevelSet3 all_fluid(const GridDesc3& g);
};

/// Bilinear/trilinear view of a nodal level set. Gradients come from nodal
/// central differences interpolated the same way; the Hessian is reported as 0.
class GridSolid2 : public SolidField2 {
public:
    explicit GridSolid2(LevelSet2 ls);
    DistanceSample2 sample(Vec2 x) const override;

private:
    LevelSet2 ls_;
    Array2 gx_, gy_;
};

class GridSolid3 : public SolidField3 {
public:
    explicit GridSolid3(LevelSet3 ls);
    DistanceSample3 sample(Vec3 x) const override;

private:
    LevelSet3 ls_;
    Array3 gx_, gy_, gz_;
};

// ---- closest points -------------------------------------------------------

struct ClosestPoint2 {
    Vec2 cp{};
    double dist = 0.0;
    Vec2 normal{};
    bool degenerate = false;
    int solid_id = 0;
};

struct ClosestPoint3 {
    Vec3 cp{};
    double dist = 0.0;
    Vec3 normal{};
    bool degenerate = false;
    int solid_id = 0;
};

/// cp = x - d n followed by one Newton re-projection onto d = 0. When |grad d|
/// vanishes the raw estimate is returned with `degenerate` set.
ClosestPoint2 closest_point(const SolidField2& s, Vec2 x);
ClosestPoint3 closest_point(const SolidField3& s, Vec3 x);

// ---- cut cells ------------------------------------------------------------

struct CutEdge2 {
    Vec2 a, b;
    double length = 0.0;
    Vec2 tangent{};
    Vec2 normal{};  // points out of the solid
};

struct CutCells2 {
    GridDesc2 desc;
    FaceWeights2 faces;  // u: vertical grid edges, v: horizontal grid edges
    Array2 cell_frac;
    std::vector<unsigned char> node_solid;
    std::vector<CutEdge2> cut_edges;

    bool solid_node(int i, int j) const {
        return node_solid[static_cast<std::size_t>(j) * (desc.nx + 1) + i] != 0;
    }
};

struct CutCells3 {
    GridDesc3 desc;
    FaceWeights3 faces;
    Array3 edge_x, edge_y, edge_z;  // fluid length fractions, EdgeField3 layout
    std::vector<unsigned char> node_solid;

    bool solid_node(int i, int j, int k) const {
        return node_solid[(static_cast<std::size_t>(k) * (desc.ny + 1) + j) * (desc.nx + 1) + i] != 0;
    }
};

constexpr double kFractionClamp = 1e-6;

/// Fluid fraction of a segment whose endpoint distances are da, db.
double edge_fluid_fraction(double da, double db);
/// Fluid area fraction of a unit square with corner values in CCW order
/// (0,0), (1,0), (1,1), (0,1); saddles are resolved by the corner average.
double square_fluid_fraction(double d00, double d10, double d11, double d01);

CutCells2 build_cut_cells(const LevelSet2& ls);
CutCells3 build_cut_cells(const LevelSet3& ls);
CutCells2 all_fluid_cells(const GridDesc2& g);
CutCells3 all_fluid_cells(const GridDesc3& g);

}  // namespace curlflow
