#pragma once

#include <vector>

#include "curlflow/field_io.hpp"
#include "curlflow/grid.hpp"
#include "curlflow/kernel.hpp"
#include "curlflow/levelset.hpp"

namespace curlflow {

enum class NodeKind : unsigned char { Fluid, Solid, Ghost };

/// Constant stream function value shared by one connected group of solid nodes.
struct SolidConstant {
    double psi_c = 0.0;
    int node_count = 0;
    Index2 seed{0, 0};
};

/// Nodal stream function with a copied ghost ring.
struct StreamField2 {
    GridDesc2 desc;
    Lattice2 psi;  // samples at nodes, ghost ring at index -1 and n
    std::vector<int> solid_component;  // per node, -1 for fluid nodes
    std::vector<SolidConstant> constants;
    double closure_residual = 0.0;  // worst unused-edge relation after sweeping

    double node(int i, int j) const { return psi.at(i, j); }
    NodeKind kind(int i, int j) const;
    int component(int i, int j) const {
        return solid_component[static_cast<std::size_t>(j) * (desc.nx + 1) + i];
    }
};

/// Sweeps psi from face velocities: psi(0,0) = 0, column x = x_min upward
/// with psi(0,j+1) = psi(0,j) + h u, then every row in +x with
/// psi(i+1,j) = psi(i,j) - h v, rows in parallel. Throws IntegrabilityError
/// when a cell's discrete divergence exceeds 1e-8 of the velocity scale.
StreamField2 sweep_stream_function(const MacField2& f);

/// Same traversal with every edge flux scaled by its fluid fraction, so fully
/// solid edges carry nothing and solid nodes inherit the boundary value.
/// Records one constant per connected solid-node group and verifies that
/// the group is single-valued.
StreamField2 sweep_stream_function_cut(const MacField2& f, const CutCells2& geom);

/// Wraps arbitrary nodal values (ghost ring copied), for analysis and tests.
StreamField2 stream_field_from_nodal(const NodalField2& psi);

/// Worst |psi_j - psi_i - (signed edge flux)| over every grid edge.
double max_edge_relation_residual(const StreamField2& sf, const MacField2& f,
                                  const FaceWeights2* w = nullptr);

/// psi and its gradient by tensor-product kernel interpolation. Queries more
/// than h/2 outside the domain throw DomainError.
ValueGrad2 eval_psi_grad(const StreamField2& sf, Vec2 x, KernelOrder k);
double eval_psi(const StreamField2& sf, Vec2 x, KernelOrder k);
/// (u, v) = (d psi/dy, -d psi/dx) from analytic kernel derivatives.
Vec2 eval_velocity(const StreamField2& sf, Vec2 x, KernelOrder k);

Dump to_dump(const StreamField2& sf);
StreamField2 stream_field_from_dump(const Dump& d);

namespace serial {
/// Single-threaded reference for sweep_stream_function(_cut); bit-identical.
StreamField2 sweep_stream_function(const MacField2& f);
StreamField2 sweep_stream_function_cut(const MacField2& f, const CutCells2& geom);
}  // namespace serial

}  // namespace curlflow
