#pragma once

#include "curlflow/field_io.hpp"
#include "curlflow/grid.hpp"
#include "curlflow/kernel.hpp"
#include "curlflow/levelset.hpp"
#include "curlflow/poisson.hpp"

namespace curlflow {

enum class GaugeState { RawSwept, BoundaryFixed, Coulomb };

const char* gauge_name(GaugeState s);

/// Edge vector potential. For cut-cell fields `edges` holds the stretched
/// values (uniform-lattice circulations reproduce W h^2 u) and `true_length`
/// the values rescaled by h / l on partial edges (0 on fully solid edges).
struct VectorPotentialField3 {
    EdgeField3 edges;
    EdgeField3 true_length;
    GaugeState state = GaugeState::RawSwept;
    bool stretched = false;
    DomainBc bc;
    double sweep_residual = 0.0;        // worst face circulation mismatch after sweeping
    double solid_gauge_residual = 0.0;  // worst fully-solid edge left nonzero (cut cells)
};

/// psi_z = 0; z_min plane seeded so its faces carry their w flux; then every
/// (i, j) column is swept in +z with psi_y(k+1) = psi_y(k) - h u and
/// psi_x(k+1) = psi_x(k) + h v. w-face relations are audited afterwards.
VectorPotentialField3 parallel_sweep_3d(const MacField3& f, const DomainBc& bc);

/// Nodal phi_BC, nonzero only on z = z_max, with psi + grad phi_BC = 0 on the
/// top-plane edges. Built by traversal from the corner; the redundant edges
/// are checked. When the four side walls are closed the outer loop is forced
/// to exactly 0.
NodalField3 build_phi_bc(const VectorPotentialField3& psi);

/// psi + grad phi_BC (phi_BC extended by zero into the interior).
VectorPotentialField3 apply_boundary_gauge(const VectorPotentialField3& psi,
                                           const NodalField3& phi_bc);

/// Solves L phi = -div psi at interior nodes with phi = phi_BC on the boundary
/// and returns psi + grad phi.
VectorPotentialField3 gauge_correct(const VectorPotentialField3& psi, const NodalField3& phi_bc,
                                    double tol = 1e-10, PoissonStats* stats = nullptr);

/// Uniform sweep with face fluxes W h^2 u, then a gauge traversal over solid
/// nodes that zeroes every fully solid edge, then the true-length rescale.
VectorPotentialField3 sweep_3d_cut(const MacField3& f, const CutCells3& geom,
                                   const DomainBc& bc);

/// Gauge correction on the stretched uniform lattice, solids included.
VectorPotentialField3 gauge_correct_cut(const VectorPotentialField3& psi, const CutCells3& geom,
                                        double tol = 1e-10, PoissonStats* stats = nullptr);

/// Recomputes true-length values from stretched ones.
EdgeField3 true_length_values(const EdgeField3& stretched, const CutCells3& geom);

/// Worst |circulation - W h^2 u| over faces with W > 0 (W = 1 without
/// weights), using the stretched lattice (sum of +-h psi_e).
double max_face_residual(const EdgeField3& psi, const MacField3& f,
                         const FaceWeights3* w = nullptr);
/// Same relation with true edge lengths l = frac h and true-length values.
double max_true_length_residual(const EdgeField3& psi_true, const MacField3& f,
                                const CutCells3& geom);

/// Largest |tangential edge value| on the given wall (0..5).
double max_wall_tangential(const EdgeField3& psi, int wall);

/// psi components and their Jacobian jac[a][b] = d psi_a / d x_b.
struct PotentialSample3 {
    Vec3 value{};
    Mat3 jac{};
};

/// Curl of a Jacobian: (dpz/dy - dpy/dz, dpx/dz - dpz/dx, dpy/dx - dpx/dy).
Vec3 curl_of(const Mat3& jac);

/// Kernel interpolant of the three staggered edge lattices (ghost layer by
/// copying the nearest interior sample).
class PotentialInterpolant3 {
public:
    PotentialInterpolant3() = default;
    explicit PotentialInterpolant3(const EdgeField3& psi);

    const GridDesc3& desc() const { return desc_; }
    /// Throws DomainError more than h/2 outside the domain.
    PotentialSample3 sample(Vec3 x, KernelOrder k) const;
    Vec3 velocity(Vec3 x, KernelOrder k) const { return curl_of(sample(x, k).jac); }

private:
    GridDesc3 desc_;
    Lattice3 lx_, ly_, lz_;
};

Vec3 eval_velocity_3d(const PotentialInterpolant3& psi, Vec3 x, KernelOrder k);

namespace serial {
VectorPotentialField3 parallel_sweep_3d(const MacField3& f, const DomainBc& bc);
}  // namespace serial

}  // namespace curlflow
