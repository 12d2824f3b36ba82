#include "curlflow/vecpot3d.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "curlflow/error.hpp"

namespace curlflow {

const char* gauge_name(GaugeState s) {
    switch (s) {
        case GaugeState::RawSwept: return "raw_swept";
        case GaugeState::BoundaryFixed: return "boundary_fixed";
        case GaugeState::Coulomb: return "coulomb";
    }
    return "?";
}

namespace {

// Face fluxes W h^2 u.
struct Fluxes3 {
    Array3 fu, fv, fw;
    double scale = 0.0;
};

Fluxes3 face_fluxes(const MacField3& f, const FaceWeights3* w) {
    const double a = f.desc.h * f.desc.h;
    Fluxes3 fl{f.u, f.v, f.w, 0.0};
    auto apply = [&](Array3& out, const Array3* wt) {
        for (std::size_t n = 0; n < out.size(); ++n) {
            out.data()[n] *= a * (wt ? wt->data()[n] : 1.0);
            fl.scale = std::max(fl.scale, std::abs(out.data()[n]));
        }
    };
    apply(fl.fu, w ? &w->u : nullptr);
    apply(fl.fv, w ? &w->v : nullptr);
    apply(fl.fw, w ? &w->w : nullptr);
    return fl;
}

void check_integrable(const GridDesc3& g, const Fluxes3& fl) {
    if (fl.scale == 0.0) return;
    double worst = 0.0;
    Index3 at{0, 0, 0};
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                double r = std::abs(fl.fu(i + 1, j, k) - fl.fu(i, j, k) + fl.fv(i, j + 1, k) -
                                    fl.fv(i, j, k) + fl.fw(i, j, k + 1) - fl.fw(i, j, k));
                if (r > worst) {
                    worst = r;
                    at = {i, j, k};
                }
            }
    if (worst > 1e-8 * fl.scale)
        throw IntegrabilityError("velocity not discretely divergence-free: cell (" +
                                     std::to_string(at.i) + "," + std::to_string(at.j) + "," +
                                     std::to_string(at.k) + ") relative residual " +
                                     std::to_string(worst / fl.scale),
                                 worst / fl.scale);
}

void sweep(EdgeField3& p, const Fluxes3& fl, bool parallel) {
    const auto& g = p.desc;
    const double inv_h = 1.0 / g.h;
    p.ex.fill(0.0);
    p.ey.fill(0.0);
    p.ez.fill(0.0);
    // z_min plane: psi_x = 0, psi_y accumulated along x so each w face carries its flux.
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) p.ey(i + 1, j, 0) = p.ey(i, j, 0) + fl.fw(i, j, 0) * inv_h;
    auto column_y = [&](int i, int j) {
        for (int k = 0; k < g.nz; ++k) p.ey(i, j, k + 1) = p.ey(i, j, k) - fl.fu(i, j, k) * inv_h;
    };
    auto column_x = [&](int i, int j) {
        for (int k = 0; k < g.nz; ++k) p.ex(i, j, k + 1) = p.ex(i, j, k) + fl.fv(i, j, k) * inv_h;
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i) {
                if (j < g.ny) column_y(i, j);
                if (i < g.nx) column_x(i, j);
            }
    } else {
        for (int i = 0; i <= g.nx; ++i)
            for (int j = 0; j <= g.ny; ++j) {
                if (j < g.ny) column_y(i, j);
                if (i < g.nx) column_x(i, j);
            }
    }
}

double residual_against(const EdgeField3& psi, const Fluxes3& fl) {
    FaceCirculation3 c = face_circulation(psi);
    double worst = 0.0;
    for (std::size_t n = 0; n < c.u.size(); ++n)
        worst = std::max(worst, std::abs(c.u.data()[n] - fl.fu.data()[n]));
    for (std::size_t n = 0; n < c.v.size(); ++n)
        worst = std::max(worst, std::abs(c.v.data()[n] - fl.fv.data()[n]));
    for (std::size_t n = 0; n < c.w.size(); ++n)
        worst = std::max(worst, std::abs(c.w.data()[n] - fl.fw.data()[n]));
    return worst;
}

VectorPotentialField3 sweep_impl(const MacField3& f, const DomainBc& bc, const FaceWeights3* w,
                                 bool parallel) {
    f.check();
    Fluxes3 fl = face_fluxes(f, w);
    check_integrable(f.desc, fl);
    VectorPotentialField3 out;
    out.edges = EdgeField3(f.desc);
    out.bc = bc;
    sweep(out.edges, fl, parallel);
    out.sweep_residual = residual_against(out.edges, fl);
    const auto& g = f.desc;
    if (out.sweep_residual > 1e-8 * fl.scale * (g.nx + g.ny + g.nz))
        throw IntegrabilityError("sweep does not close: face residual " +
                                     std::to_string(out.sweep_residual),
                                 out.sweep_residual);
    return out;
}

bool side_walls_closed(const DomainBc& bc) {
    for (int wall = 0; wall < 4; ++wall)
        if (bc.walls[wall].kind != WallKind::Closed) return false;
    return true;
}

// Nodal scalar extended from phi_bc by zero, then psi += grad phi.
void add_gradient(EdgeField3& psi, const NodalField3& phi) {
    EdgeField3 g = nodal_gradient(phi);
    for (std::size_t n = 0; n < psi.ex.size(); ++n) psi.ex.data()[n] += g.ex.data()[n];
    for (std::size_t n = 0; n < psi.ey.size(); ++n) psi.ey.data()[n] += g.ey.data()[n];
    for (std::size_t n = 0; n < psi.ez.size(); ++n) psi.ez.data()[n] += g.ez.data()[n];
}

bool on_boundary(const GridDesc3& g, int i, int j, int k) {
    return i == 0 || j == 0 || k == 0 || i == g.nx || j == g.ny || k == g.nz;
}

// Gauge over the graph of fully solid edges: phi chosen per component so
// that psi + grad phi vanishes on every tree edge.
double solid_gauge(EdgeField3& psi, const CutCells3& geom) {
    const auto& g = psi.desc;
    const double h = g.h;
    NodalField3 phi(g);
    std::vector<unsigned char> seen(phi.values.size(), 0);
    auto id = [&](int i, int j, int k) { return phi.values.index(i, j, k); };
    for (int k0 = 0; k0 <= g.nz; ++k0)
        for (int j0 = 0; j0 <= g.ny; ++j0)
            for (int i0 = 0; i0 <= g.nx; ++i0) {
                if (seen[id(i0, j0, k0)]) continue;
                seen[id(i0, j0, k0)] = 1;
                std::deque<Index3> queue{{i0, j0, k0}};
                while (!queue.empty()) {
                    Index3 n = queue.front();
                    queue.pop_front();
                    const double pn = phi.values(n.i, n.j, n.k);
                    auto visit = [&](int i, int j, int k, double value) {
                        if (seen[id(i, j, k)]) return;
                        seen[id(i, j, k)] = 1;
                        phi.values(i, j, k) = value;
                        queue.push_back({i, j, k});
                    };
                    // forward edge a->b: phi_b = phi_a - h psi; backward: phi_a = phi_b + h psi
                    if (n.i < g.nx && geom.edge_x(n.i, n.j, n.k) == 0.0)
                        visit(n.i + 1, n.j, n.k, pn - h * psi.ex(n.i, n.j, n.k));
                    if (n.i > 0 && geom.edge_x(n.i - 1, n.j, n.k) == 0.0)
                        visit(n.i - 1, n.j, n.k, pn + h * psi.ex(n.i - 1, n.j, n.k));
                    if (n.j < g.ny && geom.edge_y(n.i, n.j, n.k) == 0.0)
                        visit(n.i, n.j + 1, n.k, pn - h * psi.ey(n.i, n.j, n.k));
                    if (n.j > 0 && geom.edge_y(n.i, n.j - 1, n.k) == 0.0)
                        visit(n.i, n.j - 1, n.k, pn + h * psi.ey(n.i, n.j - 1, n.k));
                    if (n.k < g.nz && geom.edge_z(n.i, n.j, n.k) == 0.0)
                        visit(n.i, n.j, n.k + 1, pn - h * psi.ez(n.i, n.j, n.k));
                    if (n.k > 0 && geom.edge_z(n.i, n.j, n.k - 1) == 0.0)
                        visit(n.i, n.j, n.k - 1, pn + h * psi.ez(n.i, n.j, n.k - 1));
                }
            }
    add_gradient(psi, phi);
    double worst = 0.0;
    auto zero_solid = [&](Array3& a, const Array3& frac) {
        for (std::size_t n = 0; n < a.size(); ++n)
            if (frac.data()[n] == 0.0) {
                worst = std::max(worst, std::abs(a.data()[n]));
                a.data()[n] = 0.0;
            }
    };
    zero_solid(psi.ex, geom.edge_x);
    zero_solid(psi.ey, geom.edge_y);
    zero_solid(psi.ez, geom.edge_z);
    return worst;
}

}  // namespace

VectorPotentialField3 parallel_sweep_3d(const MacField3& f, const DomainBc& bc) {
    return sweep_impl(f, bc, nullptr, true);
}

namespace serial {
VectorPotentialField3 parallel_sweep_3d(const MacField3& f, const DomainBc& bc) {
    return sweep_impl(f, bc, nullptr, false);
}
}  // namespace serial

NodalField3 build_phi_bc(const VectorPotentialField3& psi) {
    if (psi.state != GaugeState::RawSwept)
        throw Error("build_phi_bc expects a raw swept potential");
    const auto& p = psi.edges;
    const auto& g = p.desc;
    const double h = g.h;
    const int top = g.nz;
    NodalField3 phi(g);
    auto& v = phi.values;
    for (int i = 0; i < g.nx; ++i) v(i + 1, 0, top) = v(i, 0, top) - h * p.ex(i, 0, top);
#pragma omp parallel for schedule(static)
    for (int i = 0; i <= g.nx; ++i)
        for (int j = 0; j < g.ny; ++j) v(i, j + 1, top) = v(i, j, top) - h * p.ey(i, j, top);

    double scale = 0.0, worst = 0.0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) scale = std::max(scale, std::abs(v(i, j, top)));
    for (int j = 1; j <= g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            worst = std::max(worst,
                             std::abs(v(i + 1, j, top) - v(i, j, top) + h * p.ex(i, j, top)));
    scale = std::max(scale, h * p.max_abs());
    if (worst > 1e-10 * std::max(scale, 1e-300))
        throw IntegrabilityError("top-plane traversal inconsistent: residual " +
                                     std::to_string(worst) + " (net flux through z_max?)",
                                 worst);
    if (side_walls_closed(psi.bc)) {
        for (int i = 0; i <= g.nx; ++i) v(i, 0, top) = v(i, g.ny, top) = 0.0;
        for (int j = 0; j <= g.ny; ++j) v(0, j, top) = v(g.nx, j, top) = 0.0;
    }
    return phi;
}

VectorPotentialField3 apply_boundary_gauge(const VectorPotentialField3& psi,
                                           const NodalField3& phi_bc) {
    VectorPotentialField3 out = psi;
    NodalField3 phi(psi.edges.desc);
    const auto& g = phi.desc;
    for (int k = 0; k <= g.nz; ++k)
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                if (on_boundary(g, i, j, k)) phi.values(i, j, k) = phi_bc.values(i, j, k);
    add_gradient(out.edges, phi);
    out.state = GaugeState::BoundaryFixed;
    return out;
}

VectorPotentialField3 gauge_correct(const VectorPotentialField3& psi, const NodalField3& phi_bc,
                                    double tol, PoissonStats* stats) {
    const auto& g = psi.edges.desc;
    if (!(phi_bc.desc == g)) throw DimensionError("phi_BC grid does not match the potential");
    NodalField3 rhs(g);
    rhs.values = nodal_divergence(psi.edges);
    for (double& x : rhs.values.data()) x = -x;
    NodalField3 phi = solve_nodal_poisson(rhs, phi_bc, tol, stats);
    VectorPotentialField3 out = psi;
    add_gradient(out.edges, phi);
    out.state = GaugeState::Coulomb;
    return out;
}

EdgeField3 true_length_values(const EdgeField3& s, const CutCells3& geom) {
    EdgeField3 t = s;
    auto rescale = [](Array3& a, const Array3& frac) {
        for (std::size_t n = 0; n < a.size(); ++n) {
            double f = frac.data()[n];
            a.data()[n] = f == 0.0 ? 0.0 : a.data()[n] / f;
        }
    };
    rescale(t.ex, geom.edge_x);
    rescale(t.ey, geom.edge_y);
    rescale(t.ez, geom.edge_z);
    return t;
}

VectorPotentialField3 sweep_3d_cut(const MacField3& f, const CutCells3& geom, const DomainBc& bc) {
    if (!(geom.desc == f.desc)) throw DimensionError("cut-cell grid does not match field");
    VectorPotentialField3 out = sweep_impl(f, bc, &geom.faces, true);
    out.solid_gauge_residual = solid_gauge(out.edges, geom);
    out.true_length = true_length_values(out.edges, geom);
    out.stretched = true;
    return out;
}

VectorPotentialField3 gauge_correct_cut(const VectorPotentialField3& psi, const CutCells3& geom,
                                        double tol, PoissonStats* stats) {
    if (!(geom.desc == psi.edges.desc)) throw DimensionError("cut-cell grid does not match field");
    NodalField3 phi_bc = build_phi_bc(psi);
    VectorPotentialField3 out = gauge_correct(psi, phi_bc, tol, stats);
    out.true_length = true_length_values(out.edges, geom);
    out.stretched = true;
    return out;
}

double max_face_residual(const EdgeField3& psi, const MacField3& f, const FaceWeights3* w) {
    if (!(psi.desc == f.desc)) throw DimensionError("potential and velocity grids differ");
    Fluxes3 fl = face_fluxes(f, w);
    FaceCirculation3 c = face_circulation(psi);
    double worst = 0.0;
    auto scan = [&](const Array3& circ, const Array3& flux, const Array3* wt) {
        for (std::size_t n = 0; n < circ.size(); ++n) {
            if (wt && wt->data()[n] == 0.0) continue;
            worst = std::max(worst, std::abs(circ.data()[n] - flux.data()[n]));
        }
    };
    scan(c.u, fl.fu, w ? &w->u : nullptr);
    scan(c.v, fl.fv, w ? &w->v : nullptr);
    scan(c.w, fl.fw, w ? &w->w : nullptr);
    return worst;
}

double max_true_length_residual(const EdgeField3& t, const MacField3& f, const CutCells3& geom) {
    EdgeField3 weighted = t;
    for (std::size_t n = 0; n < t.ex.size(); ++n) weighted.ex.data()[n] *= geom.edge_x.data()[n];
    for (std::size_t n = 0; n < t.ey.size(); ++n) weighted.ey.data()[n] *= geom.edge_y.data()[n];
    for (std::size_t n = 0; n < t.ez.size(); ++n) weighted.ez.data()[n] *= geom.edge_z.data()[n];
    return max_face_residual(weighted, f, &geom.faces);
}

double max_wall_tangential(const EdgeField3& p, int wall) {
    const int axis = wall / 2;
    const bool hi = wall % 2 == 1;
    double worst = 0.0;
    auto scan = [&](const Array3& a, int comp) {
        if (comp == axis) return;
        const int fixed = hi ? (axis == 0 ? a.nx() : axis == 1 ? a.ny() : a.nz()) - 1 : 0;
        for (int k = 0; k < a.nz(); ++k)
            for (int j = 0; j < a.ny(); ++j)
                for (int i = 0; i < a.nx(); ++i) {
                    int c = axis == 0 ? i : axis == 1 ? j : k;
                    if (c == fixed) worst = std::max(worst, std::abs(a(i, j, k)));
                }
    };
    scan(p.ex, 0);
    scan(p.ey, 1);
    scan(p.ez, 2);
    return worst;
}

Vec3 curl_of(const Mat3& j) {
    return {j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1]};
}

PotentialInterpolant3::PotentialInterpolant3(const EdgeField3& psi) : desc_(psi.desc) {
    psi.check();
    const auto& g = desc_;
    auto load = [&](Lattice3& l, const Array3& a, Stagger3 s) {
        l = Lattice3(a.nx(), a.ny(), a.nz(), g.origin + stagger_offset(s) * g.h, g.h);
        for (int k = 0; k < a.nz(); ++k)
            for (int j = 0; j < a.ny(); ++j)
                for (int i = 0; i < a.nx(); ++i) l.at(i, j, k) = a(i, j, k);
        l.fill_ghost_copy();
    };
    load(lx_, psi.ex, Stagger3::EdgeX);
    load(ly_, psi.ey, Stagger3::EdgeY);
    load(lz_, psi.ez, Stagger3::EdgeZ);
}

PotentialSample3 PotentialInterpolant3::sample(Vec3 x, KernelOrder k) const {
    if (!desc_.bounds().contains(x, 0.5 * desc_.h))
        throw DomainError("query (" + std::to_string(x.x) + "," + std::to_string(x.y) + "," +
                          std::to_string(x.z) + ") outside the vector potential support");
    PotentialSample3 s;
    const Lattice3* ls[3] = {&lx_, &ly_, &lz_};
    for (int a = 0; a < 3; ++a) {
        ValueGrad3 r = ls[a]->eval(x, k);
        s.value[a] = r.value;
        for (int b = 0; b < 3; ++b) s.jac[a][b] = r.grad[b];
    }
    return s;
}

Vec3 eval_velocity_3d(const PotentialInterpolant3& psi, Vec3 x, KernelOrder k) {
    return psi.velocity(x, k);
}

}  // namespace curlflow
