#pragma once

#include <cstddef>
#include <vector>

#include "curlflow/vec.hpp"

namespace curlflow {

struct GridDesc2 {
    int nx = 1, ny = 1;
    double h = 1.0;
    Vec2 origin{};

    /// Throws DimensionError unless nx, ny >= 1 and h > 0.
    void validate() const;
    Box2 bounds() const { return {origin, origin + Vec2{nx * h, ny * h}}; }
    int cell_count() const { return nx * ny; }

    Vec2 node_position(int i, int j) const;
    Vec2 u_face(int i, int j) const;
    Vec2 v_face(int i, int j) const;
    Vec2 cell_center(int i, int j) const;

    bool operator==(const GridDesc2&) const = default;
};

struct GridDesc3 {
    int nx = 1, ny = 1, nz = 1;
    double h = 1.0;
    Vec3 origin{};

    void validate() const;
    Box3 bounds() const { return {origin, origin + Vec3{nx * h, ny * h, nz * h}}; }
    int cell_count() const { return nx * ny * nz; }

    Vec3 node_position(int i, int j, int k) const;
    Vec3 u_face(int i, int j, int k) const;
    Vec3 v_face(int i, int j, int k) const;
    Vec3 w_face(int i, int j, int k) const;
    Vec3 ex_edge(int i, int j, int k) const;
    Vec3 ey_edge(int i, int j, int k) const;
    Vec3 ez_edge(int i, int j, int k) const;
    Vec3 cell_center(int i, int j, int k) const;

    bool operator==(const GridDesc3&) const = default;
};

/// Dense x-fastest 2D array.
class Array2 {
public:
    Array2() = default;
    Array2(int nx, int ny, double fill = 0.0);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    std::size_t size() const { return data_.size(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }
    bool in_range(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_; }

    double& operator()(int i, int j) { return data_[index(i, j)]; }
    double operator()(int i, int j) const { return data_[index(i, j)]; }
    /// Bounds-checked access; throws DomainError.
    double at(int i, int j) const;

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }
    void fill(double v);
    double max_abs() const;
    bool same_shape(const Array2& o) const { return nx_ == o.nx_ && ny_ == o.ny_; }

private:
    int nx_ = 0, ny_ = 0;
    std::vector<double> data_;
};

class Array3 {
public:
    Array3() = default;
    Array3(int nx, int ny, int nz, double fill = 0.0);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    std::size_t size() const { return data_.size(); }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k) * ny_ + j) * nx_ + i;
    }
    bool in_range(int i, int j, int k) const {
        return i >= 0 && j >= 0 && k >= 0 && i < nx_ && j < ny_ && k < nz_;
    }

    double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
    double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }
    double at(int i, int j, int k) const;

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }
    void fill(double v);
    double max_abs() const;
    bool same_shape(const Array3& o) const { return nx_ == o.nx_ && ny_ == o.ny_ && nz_ == o.nz_; }

private:
    int nx_ = 0, ny_ = 0, nz_ = 0;
    std::vector<double> data_;
};

struct MacField2 {
    GridDesc2 desc;
    Array2 u, v;

    MacField2() = default;
    explicit MacField2(const GridDesc2& d);
    /// Throws DimensionError if component extents disagree with desc.
    void check() const;
    double max_abs() const;
};

struct MacField3 {
    GridDesc3 desc;
    Array3 u, v, w;

    MacField3() = default;
    explicit MacField3(const GridDesc3& d);
    void check() const;
    double max_abs() const;
};

struct NodalField2 {
    GridDesc2 desc;
    Array2 values;

    NodalField2() = default;
    explicit NodalField2(const GridDesc2& d, double fill = 0.0);
};

struct NodalField3 {
    GridDesc3 desc;
    Array3 values;

    NodalField3() = default;
    explicit NodalField3(const GridDesc3& d, double fill = 0.0);
};

struct EdgeField3 {
    GridDesc3 desc;
    Array3 ex, ey, ez;

    EdgeField3() = default;
    explicit EdgeField3(const GridDesc3& d);
    void check() const;
    double max_abs() const;
};

/// Fluid fractions of the velocity faces. In 2D a "face" is the grid edge
/// carrying the normal component, so these are edge length fractions.
struct FaceWeights2 {
    Array2 u, v;
};

struct FaceWeights3 {
    Array3 u, v, w;
};

/// Per-cell sum of outward fluxes divided by cell volume. With weights, each
/// face flux is scaled by its fluid fraction; cells with no open face give 0.
Array2 discrete_divergence(const MacField2& f, const FaceWeights2* weights = nullptr);
Array3 discrete_divergence(const MacField3& f, const FaceWeights3* weights = nullptr);

/// Face velocities from edge circulations: u = (sum of signed edge values) / h,
/// so that u*h^2 equals the circulation times h.
MacField3 curl_flux(const EdgeField3& psi);

/// Face circulations sum(+-psi_e * h) of the three face orientations, one per face.
struct FaceCirculation3 {
    Array3 u, v, w;
};
FaceCirculation3 face_circulation(const EdgeField3& psi);

/// Signed backward-difference divergence of an edge field at interior nodes;
/// boundary nodes are left at 0.
Array3 nodal_divergence(const EdgeField3& psi);

/// Edge differences of a nodal scalar: ex = (phi(i+1) - phi(i)) / h, etc.
EdgeField3 nodal_gradient(const NodalField3& phi);

/// Nearest staggered index for a world position (rounding), per lattice.
struct Index2 {
    int i, j;
    bool operator==(const Index2&) const = default;
};
struct Index3 {
    int i, j, k;
    bool operator==(const Index3&) const = default;
};

enum class Stagger2 { Node, UFace, VFace, Cell };
enum class Stagger3 { Node, UFace, VFace, WFace, EdgeX, EdgeY, EdgeZ, Cell };

/// Lattice offset (in cells) of sample (0,0[,0]) relative to the grid origin.
Vec2 stagger_offset(Stagger2 s);
Vec3 stagger_offset(Stagger3 s);
Index2 lattice_extent(const GridDesc2& d, Stagger2 s);
Index3 lattice_extent(const GridDesc3& d, Stagger3 s);

Vec2 lattice_position(const GridDesc2& d, Stagger2 s, Index2 idx);
Vec3 lattice_position(const GridDesc3& d, Stagger3 s, Index3 idx);
Index2 nearest_index(const GridDesc2& d, Stagger2 s, Vec2 p);
Index3 nearest_index(const GridDesc3& d, Stagger3 s, Vec3 p);

}  // namespace curlflow
