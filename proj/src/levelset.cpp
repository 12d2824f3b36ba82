#include "curlflow/levelset.hpp"

#include <cmath>
#include <limits>

#include "curlflow/error.hpp"

namespace curlflow {

namespace {

constexpr double kTiny = 1e-300;

// Distance to a point treated as a degenerate sphere; Hessian (I - n n^T)/r.
template <class V, class M>
void point_distance(const V& x, const V& c, double& d, V& grad, M& hess) {
    V v = x - c;
    double r = norm(v);
    d = r;
    if (r > kTiny) {
        grad = v / r;
        hess = (M::identity() - outer(grad, grad)) * (1.0 / r);
    } else {
        grad = V{};
        hess = M{};
    }
}

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

double clamp_fraction(double f) {
    if (f < kFractionClamp) return 0.0;
    if (f > 1.0 - kFractionClamp) return 1.0;
    return f;
}

}  // namespace

// ---- analytic shapes ------------------------------------------------------

DistanceSample2 Circle::sample(Vec2 x) const {
    DistanceSample2 s;
    point_distance(x, c_, s.d, s.grad, s.hess);
    s.d -= r_;
    return s;
}

DistanceSample2 Rect::sample(Vec2 x) const {
    DistanceSample2 s;
    Vec2 c = (lo_ + hi_) * 0.5, e = (hi_ - lo_) * 0.5, p = x - c;
    Vec2 q{std::abs(p.x) - e.x, std::abs(p.y) - e.y};
    if (q.x > 0.0 || q.y > 0.0) {
        Vec2 qo{std::max(q.x, 0.0), std::max(q.y, 0.0)};
        s.d = norm(qo);
        s.grad = {sgn(p.x) * qo.x / s.d, sgn(p.y) * qo.y / s.d};
        if (q.x > 0.0 && q.y > 0.0) s.hess = (Mat2::identity() - outer(s.grad, s.grad)) * (1.0 / s.d);
    } else {
        int a = q.x >= q.y ? 0 : 1;
        s.d = q[a];
        s.grad[a] = sgn(p[a]);
    }
    return s;
}

DistanceSample2 Polyline::sample(Vec2 x) const {
    DistanceSample2 best;
    best.d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < pts_.size(); ++k) {
        Vec2 a = pts_[k], b = pts_[k + 1], ab = b - a;
        double len2 = dot(ab, ab);
        double t = len2 > 0.0 ? std::clamp(dot(x - a, ab) / len2, 0.0, 1.0) : 0.0;
        Vec2 q = a + ab * t;
        DistanceSample2 s;
        point_distance(x, q, s.d, s.grad, s.hess);
        if (t > 0.0 && t < 1.0) s.hess = Mat2{};
        if (s.d < best.d) best = s;
    }
    best.d -= half_;
    return best;
}

DistanceSample2 Union2::sample(Vec2 x) const {
    if (parts_.empty()) throw Error("empty solid union");
    DistanceSample2 best = parts_[0]->sample(x);
    best.solid_id = 0;
    for (std::size_t k = 1; k < parts_.size(); ++k) {
        DistanceSample2 s = parts_[k]->sample(x);
        if (s.d < best.d) {
            best = s;
            best.solid_id = static_cast<int>(k);
        }
    }
    return best;
}

DistanceSample2 Union2::sample_solid(int id, Vec2 x) const {
    if (id < 0 || id >= solid_count()) throw DomainError("solid id out of range");
    DistanceSample2 s = parts_[static_cast<std::size_t>(id)]->sample(x);
    s.solid_id = id;
    return s;
}

DistanceSample3 Sphere::sample(Vec3 x) const {
    DistanceSample3 s;
    point_distance(x, c_, s.d, s.grad, s.hess);
    s.d -= r_;
    return s;
}

DistanceSample3 Cuboid::sample(Vec3 x) const {
    DistanceSample3 s;
    Vec3 c = (lo_ + hi_) * 0.5, e = (hi_ - lo_) * 0.5, p = x - c;
    Vec3 q{std::abs(p.x) - e.x, std::abs(p.y) - e.y, std::abs(p.z) - e.z};
    int positive = (q.x > 0.0) + (q.y > 0.0) + (q.z > 0.0);
    if (positive > 0) {
        Vec3 qo{std::max(q.x, 0.0), std::max(q.y, 0.0), std::max(q.z, 0.0)};
        s.d = norm(qo);
        for (int a = 0; a < 3; ++a) s.grad[a] = sgn(p[a]) * qo[a] / s.d;
        if (positive >= 2) {
            Mat3 proj = Mat3::identity();
            for (int a = 0; a < 3; ++a)
                if (q[a] <= 0.0) proj[a][a] = 0.0;
            s.hess = (proj - outer(s.grad, s.grad)) * (1.0 / s.d);
        }
    } else {
        int a = 0;
        for (int b = 1; b < 3; ++b)
            if (q[b] > q[a]) a = b;
        s.d = q[a];
        s.grad[a] = sgn(p[a]);
    }
    return s;
}

DistanceSample3 HalfSpace3::sample(Vec3 x) const {
    DistanceSample3 s;
    s.d = dot(n_, x) - off_;
    s.grad = n_;
    return s;
}

DistanceSample3 Union3::sample(Vec3 x) const {
    if (parts_.empty()) throw Error("empty solid union");
    DistanceSample3 best = parts_[0]->sample(x);
    best.solid_id = 0;
    for (std::size_t k = 1; k < parts_.size(); ++k) {
        DistanceSample3 s = parts_[k]->sample(x);
        if (s.d < best.d) {
            best = s;
            best.solid_id = static_cast<int>(k);
        }
    }
    return best;
}

DistanceSample3 Union3::sample_solid(int id, Vec3 x) const {
    if (id < 0 || id >= solid_count()) throw DomainError("solid id out of range");
    DistanceSample3 s = parts_[static_cast<std::size_t>(id)]->sample(x);
    s.solid_id = id;
    return s;
}

// ---- nodal level sets -----------------------------------------------------

LevelSet2 LevelSet2::from_solid(const GridDesc2& g, const SolidField2& s) {
    LevelSet2 ls{NodalField2(g)};
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) ls.phi.values(i, j) = s.sample(g.node_position(i, j)).d;
    return ls;
}

LevelSet2 LevelSet2::all_fluid(const GridDesc2& g) { return {NodalField2(g, 1.0)}; }

LevelSet3 LevelSet3::from_solid(const GridDesc3& g, const SolidField3& s) {
    LevelSet3 ls{NodalField3(g)};
#pragma omp parallel for schedule(static)
    for (int k = 0; k <= g.nz; ++k)
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                ls.phi.values(i, j, k) = s.sample(g.node_position(i, j, k)).d;
    return ls;
}

LevelSet3 LevelSet3::all_fluid(const GridDesc3& g) { return {NodalField3(g, 1.0)}; }

namespace {

double central(const Array2& a, int i, int j, int axis, double h) {
    int n = axis == 0 ? a.nx() : a.ny();
    int c = axis == 0 ? i : j;
    auto at = [&](int o) { return axis == 0 ? a(o, j) : a(i, o); };
    if (n == 1) return 0.0;
    if (c == 0) return (at(1) - at(0)) / h;
    if (c == n - 1) return (at(n - 1) - at(n - 2)) / h;
    return (at(c + 1) - at(c - 1)) / (2.0 * h);
}

double central(const Array3& a, int i, int j, int k, int axis, double h) {
    int n = axis == 0 ? a.nx() : axis == 1 ? a.ny() : a.nz();
    int c = axis == 0 ? i : axis == 1 ? j : k;
    auto at = [&](int o) {
        return axis == 0 ? a(o, j, k) : axis == 1 ? a(i, o, k) : a(i, j, o);
    };
    if (n == 1) return 0.0;
    if (c == 0) return (at(1) - at(0)) / h;
    if (c == n - 1) return (at(n - 1) - at(n - 2)) / h;
    return (at(c + 1) - at(c - 1)) / (2.0 * h);
}

struct Cell1 {
    int i;
    double f;
};

Cell1 locate(double s, int ncells) {
    int i = static_cast<int>(std::floor(s));
    i = std::clamp(i, 0, ncells - 1);
    return {i, s - i};
}

}  // namespace

GridSolid2::GridSolid2(LevelSet2 ls) : ls_(std::move(ls)) {
    const auto& g = ls_.phi.desc;
    const auto& v = ls_.phi.values;
    gx_ = Array2(g.nx + 1, g.ny + 1);
    gy_ = Array2(g.nx + 1, g.ny + 1);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            gx_(i, j) = central(v, i, j, 0, g.h);
            gy_(i, j) = central(v, i, j, 1, g.h);
        }
}

DistanceSample2 GridSolid2::sample(Vec2 x) const {
    const auto& g = ls_.phi.desc;
    Cell1 cx = locate((x.x - g.origin.x) / g.h, g.nx);
    Cell1 cy = locate((x.y - g.origin.y) / g.h, g.ny);
    auto bil = [&](const Array2& a) {
        double a0 = a(cx.i, cy.i) * (1 - cx.f) + a(cx.i + 1, cy.i) * cx.f;
        double a1 = a(cx.i, cy.i + 1) * (1 - cx.f) + a(cx.i + 1, cy.i + 1) * cx.f;
        return a0 * (1 - cy.f) + a1 * cy.f;
    };
    DistanceSample2 s;
    s.d = bil(ls_.phi.values);
    s.grad = {bil(gx_), bil(gy_)};
    return s;
}

GridSolid3::GridSolid3(LevelSet3 ls) : ls_(std::move(ls)) {
    const auto& g = ls_.phi.desc;
    const auto& v = ls_.phi.values;
    gx_ = Array3(g.nx + 1, g.ny + 1, g.nz + 1);
    gy_ = gx_;
    gz_ = gx_;
    for (int k = 0; k <= g.nz; ++k)
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i) {
                gx_(i, j, k) = central(v, i, j, k, 0, g.h);
                gy_(i, j, k) = central(v, i, j, k, 1, g.h);
                gz_(i, j, k) = central(v, i, j, k, 2, g.h);
            }
}

DistanceSample3 GridSolid3::sample(Vec3 x) const {
    const auto& g = ls_.phi.desc;
    Cell1 cx = locate((x.x - g.origin.x) / g.h, g.nx);
    Cell1 cy = locate((x.y - g.origin.y) / g.h, g.ny);
    Cell1 cz = locate((x.z - g.origin.z) / g.h, g.nz);
    auto tril = [&](const Array3& a) {
        double r = 0.0;
        for (int dk = 0; dk < 2; ++dk)
            for (int dj = 0; dj < 2; ++dj)
                for (int di = 0; di < 2; ++di) {
                    double w = (di ? cx.f : 1 - cx.f) * (dj ? cy.f : 1 - cy.f) *
                               (dk ? cz.f : 1 - cz.f);
                    r += w * a(cx.i + di, cy.i + dj, cz.i + dk);
                }
        return r;
    };
    DistanceSample3 s;
    s.d = tril(ls_.phi.values);
    s.grad = {tril(gx_), tril(gy_), tril(gz_)};
    return s;
}

// ---- closest points -------------------------------------------------------

ClosestPoint2 closest_point(const SolidField2& s, Vec2 x) {
    DistanceSample2 ds = s.sample(x);
    ClosestPoint2 r;
    r.dist = std::abs(ds.d);
    r.solid_id = ds.solid_id;
    double g = norm(ds.grad);
    if (g < 1e-10) {
        r.degenerate = true;
        r.normal = {1.0, 0.0};
        r.cp = x - r.normal * ds.d;
        return r;
    }
    r.normal = ds.grad / g;
    r.cp = x - r.normal * ds.d;
    DistanceSample2 s2 = s.sample_solid(ds.solid_id, r.cp);
    double g2 = dot(s2.grad, s2.grad);
    if (g2 > 1e-20) r.cp -= s2.grad * (s2.d / g2);
    return r;
}

ClosestPoint3 closest_point(const SolidField3& s, Vec3 x) {
    DistanceSample3 ds = s.sample(x);
    ClosestPoint3 r;
    r.dist = std::abs(ds.d);
    r.solid_id = ds.solid_id;
    double g = norm(ds.grad);
    if (g < 1e-10) {
        r.degenerate = true;
        r.normal = {1.0, 0.0, 0.0};
        r.cp = x - r.normal * ds.d;
        return r;
    }
    r.normal = ds.grad / g;
    r.cp = x - r.normal * ds.d;
    DistanceSample3 s2 = s.sample_solid(ds.solid_id, r.cp);
    double g2 = dot(s2.grad, s2.grad);
    if (g2 > 1e-20) r.cp -= s2.grad * (s2.d / g2);
    return r;
}

// ---- cut cells ------------------------------------------------------------

double edge_fluid_fraction(double da, double db) {
    bool fa = da >= 0.0, fb = db >= 0.0;
    if (fa && fb) return 1.0;
    if (!fa && !fb) return 0.0;
    double t = da / (da - db);
    return clamp_fraction(fa ? t : 1.0 - t);
}

namespace {

const Vec2 kCorner[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};

Vec2 crossing(const double* d, int a) {
    int b = (a + 1) % 4;
    double t = d[a] / (d[a] - d[b]);
    return kCorner[a] + (kCorner[b] - kCorner[a]) * t;
}

double shoelace(const Vec2* p, int n) {
    double s = 0.0;
    for (int k = 0; k < n; ++k) {
        const Vec2& a = p[k];
        const Vec2& b = p[(k + 1) % n];
        s += a.x * b.y - b.x * a.y;
    }
    return 0.5 * s;
}

struct SquareCut {
    double area = 0.0;
    int nseg = 0;
    Vec2 seg[2][2];
};

// Marching squares on the unit square; corners CCW from (0,0).
SquareCut cut_square(const double* d) {
    SquareCut r;
    bool fluid[4];
    int count = 0;
    for (int k = 0; k < 4; ++k) count += (fluid[k] = d[k] >= 0.0);
    if (count == 0) return r;
    if (count == 4) {
        r.area = 1.0;
        return r;
    }
    bool saddle = count == 2 && fluid[0] == fluid[2];
    if (saddle) {
        double avg = 0.25 * (d[0] + d[1] + d[2] + d[3]);
        bool center_fluid = avg >= 0.0;
        if (!center_fluid) {
            for (int k = 0; k < 4; ++k) {
                if (!fluid[k]) continue;
                int prev = (k + 3) % 4;
                Vec2 tri[3] = {kCorner[k], crossing(d, k), crossing(d, prev)};
                r.area += shoelace(tri, 3);
                r.seg[r.nseg][0] = crossing(d, prev);
                r.seg[r.nseg][1] = crossing(d, k);
                ++r.nseg;
            }
            return r;
        }
        for (int k = 0; k < 4; ++k) {
            if (fluid[k]) continue;
            int prev = (k + 3) % 4;
            r.seg[r.nseg][0] = crossing(d, prev);
            r.seg[r.nseg][1] = crossing(d, k);
            ++r.nseg;
        }
    }
    Vec2 poly[8];
    int n = 0;
    for (int k = 0; k < 4; ++k) {
        if (fluid[k]) poly[n++] = kCorner[k];
        if (fluid[k] != fluid[(k + 1) % 4]) poly[n++] = crossing(d, k);
    }
    r.area = shoelace(poly, n);
    if (!saddle) {
        Vec2 pts[2];
        int m = 0;
        for (int k = 0; k < 4; ++k)
            if (fluid[k] != fluid[(k + 1) % 4]) pts[m++] = crossing(d, k);
        r.seg[0][0] = pts[0];
        r.seg[0][1] = pts[1];
        r.nseg = 1;
    }
    return r;
}

}  // namespace

double square_fluid_fraction(double d00, double d10, double d11, double d01) {
    double d[4] = {d00, d10, d11, d01};
    return clamp_fraction(cut_square(d).area);
}

CutCells2 build_cut_cells(const LevelSet2& ls) {
    const GridDesc2& g = ls.phi.desc;
    const Array2& p = ls.phi.values;
    CutCells2 cc;
    cc.desc = g;
    cc.faces.u = Array2(g.nx + 1, g.ny);
    cc.faces.v = Array2(g.nx, g.ny + 1);
    cc.cell_frac = Array2(g.nx, g.ny);
    cc.node_solid.assign(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1), 0);
    for (int j = 0; j <= g.ny; ++j)
        for (int i = 0; i <= g.nx; ++i) {
            cc.node_solid[static_cast<std::size_t>(j) * (g.nx + 1) + i] = p(i, j) < 0.0;
            if (j < g.ny) cc.faces.u(i, j) = edge_fluid_fraction(p(i, j), p(i, j + 1));
            if (i < g.nx) cc.faces.v(i, j) = edge_fluid_fraction(p(i, j), p(i + 1, j));
        }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            double d[4] = {p(i, j), p(i + 1, j), p(i + 1, j + 1), p(i, j + 1)};
            SquareCut sc = cut_square(d);
            cc.cell_frac(i, j) = clamp_fraction(sc.area);
            Vec2 base = g.node_position(i, j);
            for (int s = 0; s < sc.nseg; ++s) {
                CutEdge2 e;
                e.a = base + sc.seg[s][0] * g.h;
                e.b = base + sc.seg[s][1] * g.h;
                e.length = norm(e.b - e.a);
                if (e.length <= 0.0) continue;
                e.tangent = (e.b - e.a) / e.length;
                e.normal = perp(e.tangent);
                Vec2 m = (sc.seg[s][0] + sc.seg[s][1]) * 0.5;
                Vec2 grad{(d[1] - d[0]) * (1 - m.y) + (d[2] - d[3]) * m.y,
                          (d[3] - d[0]) * (1 - m.x) + (d[2] - d[1]) * m.x};
                if (dot(grad, e.normal) < 0.0) e.normal = -e.normal;
                cc.cut_edges.push_back(e);
            }
        }
    return cc;
}

CutCells3 build_cut_cells(const LevelSet3& ls) {
    const GridDesc3& g = ls.phi.desc;
    const Array3& p = ls.phi.values;
    CutCells3 cc;
    cc.desc = g;
    cc.faces.u = Array3(g.nx + 1, g.ny, g.nz);
    cc.faces.v = Array3(g.nx, g.ny + 1, g.nz);
    cc.faces.w = Array3(g.nx, g.ny, g.nz + 1);
    cc.edge_x = Array3(g.nx, g.ny + 1, g.nz + 1);
    cc.edge_y = Array3(g.nx + 1, g.ny, g.nz + 1);
    cc.edge_z = Array3(g.nx + 1, g.ny + 1, g.nz);
    cc.node_solid.assign(static_cast<std::size_t>(g.nx + 1) * (g.ny + 1) * (g.nz + 1), 0);
#pragma omp parallel for schedule(static)
    for (int k = 0; k <= g.nz; ++k)
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i) {
                cc.node_solid[(static_cast<std::size_t>(k) * (g.ny + 1) + j) * (g.nx + 1) + i] =
                    p(i, j, k) < 0.0;
                if (i < g.nx) cc.edge_x(i, j, k) = edge_fluid_fraction(p(i, j, k), p(i + 1, j, k));
                if (j < g.ny) cc.edge_y(i, j, k) = edge_fluid_fraction(p(i, j, k), p(i, j + 1, k));
                if (k < g.nz) cc.edge_z(i, j, k) = edge_fluid_fraction(p(i, j, k), p(i, j, k + 1));
                if (j < g.ny && k < g.nz)
                    cc.faces.u(i, j, k) = square_fluid_fraction(p(i, j, k), p(i, j + 1, k),
                                                                p(i, j + 1, k + 1), p(i, j, k + 1));
                if (i < g.nx && k < g.nz)
                    cc.faces.v(i, j, k) = square_fluid_fraction(p(i, j, k), p(i + 1, j, k),
                                                                p(i + 1, j, k + 1), p(i, j, k + 1));
                if (i < g.nx && j < g.ny)
                    cc.faces.w(i, j, k) = square_fluid_fraction(p(i, j, k), p(i + 1, j, k),
                                                                p(i + 1, j + 1, k), p(i, j + 1, k));
            }
    return cc;
}

CutCells2 all_fluid_cells(const GridDesc2& g) { return build_cut_cells(LevelSet2::all_fluid(g)); }
CutCells3 all_fluid_cells(const GridDesc3& g) { return build_cut_cells(LevelSet3::all_fluid(g)); }

}  // namespace curlflow
