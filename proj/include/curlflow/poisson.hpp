#pragma once

#include <array>
#include <vector>

#include "curlflow/grid.hpp"

namespace curlflow {

/// Compressed sparse row matrix.
struct SparseMatrix {
    int n = 0;
    std::vector<int> row_ptr, col;
    std::vector<double> val;

    void multiply(const std::vector<double>& x, std::vector<double>& y) const;
    double at(int i, int j) const;
    std::size_t nonzeros() const { return val.size(); }
};

/// Accumulates (i, j, v) triplets; duplicates are summed.
class MatrixBuilder {
public:
    explicit MatrixBuilder(int n) : rows_(static_cast<std::size_t>(n)) {}
    void add(int i, int j, double v);
    /// Builds CSR with sorted columns; throws Error on asymmetry beyond
    /// 1e-14 (relative to the entry magnitude) or a non-positive diagonal in
    /// a non-empty row.
    SparseMatrix build(bool check_spd_shape = true) const;

private:
    std::vector<std::vector<std::pair<int, double>>> rows_;
};

enum class Preconditioner { None, Jacobi, IC0 };

enum class StopRule {
    RelativeL2,  // ||r||_2 <= tol * ||b||_2
    DivergenceL1  // ||r||_1 <= tol * max(1, ||b||_inf)
};

struct CgOptions {
    double tol = 1e-10;
    int max_iterations = 20000;
    Preconditioner preconditioner = Preconditioner::IC0;
    StopRule stop = StopRule::RelativeL2;
    bool record_history = false;
};

struct CgResult {
    std::vector<double> x;
    int iterations = 0;
    double residual = 0.0;          // in the stop rule's norm
    bool ic0_fallback = false;      // IC(0) broke down, Jacobi used
    std::vector<double> energy;     // 0.5 x^T A x - b^T x per iteration
    std::vector<double> residuals;  // stop-rule norm per iteration
};

/// Preconditioned conjugate gradients. Dot products use a fixed blocking so
/// results do not depend on the thread count. Throws ConvergenceError.
CgResult pcg(const SparseMatrix& a, const std::vector<double>& b, const CgOptions& opt = {},
             const std::vector<double>* x0 = nullptr);

/// Order-independent sum used by the solver, exposed for the diagnostics.
double blocked_dot(const std::vector<double>& a, const std::vector<double>& b);

// ---- domain boundaries ----------------------------------------------------

enum class WallKind { Closed, Prescribed, Open };

struct WallBc {
    WallKind kind = WallKind::Closed;
    /// Normal velocity component (along the +axis direction) for Prescribed.
    double speed = 0.0;
};

/// Walls indexed 0:x-, 1:x+, 2:y-, 3:y+, 4:z-, 5:z+.
struct DomainBc {
    std::array<WallBc, 6> walls{};

    static DomainBc closed() { return {}; }
    /// Inflow at x- and outflow at x+ with the same axial speed.
    static DomainBc wind_tunnel(double speed);
    bool fully_closed(int dim) const;
    bool any_open(int dim) const;
};

const char* wall_name(int wall);

struct ProjectionStats {
    int iterations = 0;
    double residual = 0.0;      // max per-cell |sum W u| after projection
    double initial_residual = 0.0;
    int pinned_cells = 0;
};

/// Weighted (cut-cell) pressure projection. Residuals are measured per cell
/// as sum(+-W_f u_f), i.e. flux over the face area h^(d-1), so `tol` is a
/// velocity-scale tolerance independent of h. Closed walls get zero normal
/// velocity, Prescribed walls their speed, Open walls a p = 0 condition; faces
/// with W = 0 are set to 0. Closed pressure components are pinned at one cell.
MacField2 pressure_project(const MacField2& f, const FaceWeights2& w, const DomainBc& bc,
                           double tol = 1e-10, ProjectionStats* stats = nullptr);
MacField3 pressure_project(const MacField3& f, const FaceWeights3& w, const DomainBc& bc,
                           double tol = 1e-10, ProjectionStats* stats = nullptr);
MacField2 pressure_project(const MacField2& f, const DomainBc& bc, double tol = 1e-10,
                           ProjectionStats* stats = nullptr);
MacField3 pressure_project(const MacField3& f, const DomainBc& bc, double tol = 1e-10,
                           ProjectionStats* stats = nullptr);

FaceWeights2 unit_weights(const GridDesc2& g);
FaceWeights3 unit_weights(const GridDesc3& g);

/// max over cells of |sum(+-W_f u_f)|; cells without open faces are skipped.
double max_cell_residual(const MacField2& f, const FaceWeights2& w);
double max_cell_residual(const MacField3& f, const FaceWeights3& w);

struct PoissonStats {
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> energy;
};

/// Solves the 5-point (2D) / 7-point (3D) Laplacian  L phi = rhs  at interior
/// nodes with phi = dirichlet on boundary nodes. `tol` is relative (L2).
NodalField2 solve_nodal_poisson(const NodalField2& rhs, const NodalField2& dirichlet,
                                double tol = 1e-10, PoissonStats* stats = nullptr);
NodalField3 solve_nodal_poisson(const NodalField3& rhs, const NodalField3& dirichlet,
                                double tol = 1e-10, PoissonStats* stats = nullptr);

/// Discrete Laplacian of nodal data at interior nodes (0 on the boundary).
NodalField3 nodal_laplacian(const NodalField3& phi);
NodalField2 nodal_laplacian(const NodalField2& phi);

}  // namespace curlflow
