#include "curlflow/streamfunc2d.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "curlflow/error.hpp"

namespace curlflow {

namespace {

// Edge fluxes in psi units: fu(i,j) = h W u through the vertical edge
// node(i,j)-node(i,j+1), fv(i,j) = h W v through the horizontal edge.
struct Fluxes2 {
    Array2 fu, fv;
};

Fluxes2 edge_fluxes(const MacField2& f, const FaceWeights2* w) {
    const auto& g = f.desc;
    Fluxes2 fl{Array2(g.nx + 1, g.ny), Array2(g.nx, g.ny + 1)};
    for (std::size_t n = 0; n < fl.fu.size(); ++n)
        fl.fu.data()[n] = g.h * (w ? w->u.data()[n] : 1.0) * f.u.data()[n];
    for (std::size_t n = 0; n < fl.fv.size(); ++n)
        fl.fv.data()[n] = g.h * (w ? w->v.data()[n] : 1.0) * f.v.data()[n];
    return fl;
}

void check_integrable(const MacField2& f, const Fluxes2& fl) {
    const auto& g = f.desc;
    double scale = 0.0;
    for (double x : fl.fu.data()) scale = std::max(scale, std::abs(x));
    for (double x : fl.fv.data()) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return;
    double worst = 0.0;
    int wi = 0, wj = 0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double r = std::abs(fl.fu(i + 1, j) - fl.fu(i, j) + fl.fv(i, j + 1) - fl.fv(i, j));
            if (r > worst) {
                worst = r;
                wi = i;
                wj = j;
            }
        }
    if (worst > 1e-8 * scale)
        throw IntegrabilityError("velocity not discretely divergence-free: cell (" +
                                     std::to_string(wi) + "," + std::to_string(wj) +
                                     ") relative residual " + std::to_string(worst / scale),
                                 worst / scale);
}

StreamField2 empty_field(const GridDesc2& g) {
    StreamField2 sf;
    sf.desc = g;
    sf.psi = Lattice2(g.nx + 1, g.ny + 1, g.origin, g.h);
    sf.solid_component.assign(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1), -1);
    return sf;
}

void sweep(StreamField2& sf, const Fluxes2& fl, bool parallel) {
    const auto& g = sf.desc;
    auto& p = sf.psi;
    p.at(0, 0) = 0.0;
    for (int j = 0; j < g.ny; ++j) p.at(0, j + 1) = p.at(0, j) + fl.fu(0, j);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) p.at(i + 1, j) = p.at(i, j) - fl.fv(i, j);
    } else {
        for (int i = 0; i < g.nx; ++i)
            for (int j = 0; j <= g.ny; ++j) p.at(i + 1, j) = p.at(i, j) - fl.fv(i, j);
    }
}

double closure(const StreamField2& sf, const Fluxes2& fl) {
    const auto& g = sf.desc;
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i)
            worst = std::max(worst, std::abs(sf.node(i, j + 1) - sf.node(i, j) - fl.fu(i, j)));
    return worst;
}

void label_solids(StreamField2& sf, const CutCells2& geom) {
    const auto& g = sf.desc;
    const int sx = g.nx + 1;
    auto id = [&](int i, int j) { return static_cast<std::size_t>(j) * sx + i; };
    double scale = 0.0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) scale = std::max(scale, std::abs(sf.node(i, j)));
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            if (!geom.solid_node(i, j) || sf.solid_component[id(i, j)] >= 0) continue;
            const int c = static_cast<int>(sf.constants.size());
            SolidConstant sc;
            sc.seed = {i, j};
            sc.psi_c = sf.node(i, j);
            double lo = sc.psi_c, hi = sc.psi_c;
            std::deque<Index2> queue{{i, j}};
            sf.solid_component[id(i, j)] = c;
            while (!queue.empty()) {
                Index2 n = queue.front();
                queue.pop_front();
                ++sc.node_count;
                lo = std::min(lo, sf.node(n.i, n.j));
                hi = std::max(hi, sf.node(n.i, n.j));
                const Index2 nb[4] = {{n.i - 1, n.j}, {n.i + 1, n.j}, {n.i, n.j - 1}, {n.i, n.j + 1}};
                for (Index2 m : nb) {
                    if (m.i < 0 || m.j < 0 || m.i > g.nx || m.j > g.ny) continue;
                    if (!geom.solid_node(m.i, m.j) || sf.solid_component[id(m.i, m.j)] >= 0) continue;
                    sf.solid_component[id(m.i, m.j)] = c;
                    queue.push_back(m);
                }
            }
            if (hi - lo > 1e-8 * std::max(scale, 1e-300))
                throw IntegrabilityError("stream function not constant on solid " +
                                             std::to_string(c) + " (spread " +
                                             std::to_string(hi - lo) + ")",
                                         hi - lo);
            sf.constants.push_back(sc);
        }
}

StreamField2 sweep_impl(const MacField2& f, const CutCells2* geom, bool parallel) {
    f.check();
    const FaceWeights2* w = nullptr;
    if (geom) {
        if (!(geom->desc == f.desc)) throw DimensionError("cut-cell grid does not match field");
        w = &geom->faces;
    }
    Fluxes2 fl = edge_fluxes(f, w);
    check_integrable(f, fl);
    StreamField2 sf = empty_field(f.desc);
    sweep(sf, fl, parallel);
    sf.closure_residual = closure(sf, fl);
    double scale = std::max(fl.fu.max_abs(), fl.fv.max_abs());
    if (sf.closure_residual > 1e-8 * scale * (f.desc.nx + 1))
        throw IntegrabilityError("sweep does not close: residual " +
                                     std::to_string(sf.closure_residual),
                                 sf.closure_residual);
    if (geom) label_solids(sf, *geom);
    sf.psi.fill_ghost_copy();
    return sf;
}

}  // namespace

NodeKind StreamField2::kind(int i, int j) const {
    if (i < 0 || j < 0 || i > desc.nx || j > desc.ny) return NodeKind::Ghost;
    return component(i, j) >= 0 ? NodeKind::Solid : NodeKind::Fluid;
}

StreamField2 sweep_stream_function(const MacField2& f) { return sweep_impl(f, nullptr, true); }

StreamField2 sweep_stream_function_cut(const MacField2& f, const CutCells2& geom) {
    return sweep_impl(f, &geom, true);
}

namespace serial {
StreamField2 sweep_stream_function(const MacField2& f) { return sweep_impl(f, nullptr, false); }
StreamField2 sweep_stream_function_cut(const MacField2& f, const CutCells2& geom) {
    return sweep_impl(f, &geom, false);
}
}  // namespace serial

StreamField2 stream_field_from_nodal(const NodalField2& psi) {
    const auto& g = psi.desc;
    if (psi.values.nx() != g.nx + 1 || psi.values.ny() != g.ny + 1)
        throw DimensionError("nodal stream function has wrong extent");
    StreamField2 sf = empty_field(g);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) sf.psi.at(i, j) = psi.values(i, j);
    sf.psi.fill_ghost_copy();
    return sf;
}

double max_edge_relation_residual(const StreamField2& sf, const MacField2& f,
                                  const FaceWeights2* w) {
    Fluxes2 fl = edge_fluxes(f, w);
    const auto& g = sf.desc;
    double worst = 0.0;
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            if (j < g.ny)
                worst = std::max(worst, std::abs(sf.node(i, j + 1) - sf.node(i, j) - fl.fu(i, j)));
            if (i < g.nx)
                worst = std::max(worst, std::abs(sf.node(i + 1, j) - sf.node(i, j) + fl.fv(i, j)));
        }
    return worst;
}

ValueGrad2 eval_psi_grad(const StreamField2& sf, Vec2 x, KernelOrder k) {
    Box2 b = sf.desc.bounds();
    if (!b.contains(x, 0.5 * sf.desc.h))
        throw DomainError("query (" + std::to_string(x.x) + "," + std::to_string(x.y) +
                          ") outside the stream function support");
    return sf.psi.eval(x, k);
}

double eval_psi(const StreamField2& sf, Vec2 x, KernelOrder k) {
    return eval_psi_grad(sf, x, k).value;
}

Vec2 eval_velocity(const StreamField2& sf, Vec2 x, KernelOrder k) {
    ValueGrad2 r = eval_psi_grad(sf, x, k);
    return {r.grad.y, -r.grad.x};
}

Dump to_dump(const StreamField2& sf) {
    Dump d;
    d.kind = "NODAL2";
    d.dim = 2;
    d.nx = sf.desc.nx;
    d.ny = sf.desc.ny;
    d.h = sf.desc.h;
    d.origin[0] = sf.desc.origin.x;
    d.origin[1] = sf.desc.origin.y;
    d.ghost = 1;
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(sf.desc.nx + 3) * (sf.desc.ny + 3));
    for (int j = -1; j <= sf.desc.ny + 1; ++j)
        for (int i = -1; i <= sf.desc.nx + 1; ++i) v.push_back(sf.psi.at(i, j));
    d.blocks = {{"", std::move(v)}};
    return d;
}

StreamField2 stream_field_from_dump(const Dump& d) {
    if (d.kind != "NODAL2" || d.ghost != 1)
        throw ConfigError("expected NODAL2 dump with ghost ring");
    GridDesc2 g = grid2_of(d);
    StreamField2 sf = empty_field(g);
    const auto& v = d.blocks.at(0).second;
    if (v.size() != static_cast<std::size_t>(g.nx + 3) * (g.ny + 3))
        throw DimensionError("stream function dump has wrong sample count");
    std::size_t n = 0;
    for (int j = -1; j <= g.ny + 1; ++j)
        for (int i = -1; i <= g.nx + 1; ++i) sf.psi.at(i, j) = v[n++];
    return sf;
}

}  // namespace curlflow
