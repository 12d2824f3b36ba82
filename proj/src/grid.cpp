#include "curlflow/grid.hpp"

#include <cmath>
#include <string>

#include "curlflow/error.hpp"

namespace curlflow {

namespace {

std::string extent_str(int a, int b) { return std::to_string(a) + "x" + std::to_string(b); }
std::string extent_str(int a, int b, int c) {
    return extent_str(a, b) + "x" + std::to_string(c);
}

void require_shape(const Array2& a, int nx, int ny, const char* name) {
    if (a.nx() != nx || a.ny() != ny)
        throw DimensionError(std::string(name) + " has extent " + extent_str(a.nx(), a.ny()) +
                             ", expected " + extent_str(nx, ny));
}

void require_shape(const Array3& a, int nx, int ny, int nz, const char* name) {
    if (a.nx() != nx || a.ny() != ny || a.nz() != nz)
        throw DimensionError(std::string(name) + " has extent " +
                             extent_str(a.nx(), a.ny(), a.nz()) + ", expected " +
                             extent_str(nx, ny, nz));
}

}  // namespace

void GridDesc2::validate() const {
    if (nx < 1) throw DimensionError("nx must be >= 1");
    if (ny < 1) throw DimensionError("ny must be >= 1");
    if (!(h > 0.0)) throw DimensionError("h must be positive");
}

void GridDesc3::validate() const {
    if (nx < 1) throw DimensionError("nx must be >= 1");
    if (ny < 1) throw DimensionError("ny must be >= 1");
    if (nz < 1) throw DimensionError("nz must be >= 1");
    if (!(h > 0.0)) throw DimensionError("h must be positive");
}

Vec2 GridDesc2::node_position(int i, int j) const {
    return lattice_position(*this, Stagger2::Node, {i, j});
}
Vec2 GridDesc2::u_face(int i, int j) const {
    return lattice_position(*this, Stagger2::UFace, {i, j});
}
Vec2 GridDesc2::v_face(int i, int j) const {
    return lattice_position(*this, Stagger2::VFace, {i, j});
}
Vec2 GridDesc2::cell_center(int i, int j) const {
    return lattice_position(*this, Stagger2::Cell, {i, j});
}

Vec3 GridDesc3::node_position(int i, int j, int k) const {
    return lattice_position(*this, Stagger3::Node, {i, j, k});
}
Vec3 GridDesc3::u_face(int i, int j, int k) const {
    return lattice_position(*this, Stagger3::UFace, {i, j, k});
}
Vec3 GridDesc3::v_face(int i, int j, int k) const {
    return lattice_position(*this, Stagger3::VFace, {i, j, k});
}
Vec3 GridDesc3::w_face(int i, int j, int k) const {
    return lattice_position(*this, Stagger3::WFace, {i, j, k});
}
Vec3 GridDesc3::ex_edge(int i, int j, int k) const {
    return lattice_position(*this, Stagger3::EdgeX, {i, j, k});
}
Vec3 GridDesc3::ey_edge(int i, int j, int k) const {
    return lattice_position(*this, Stagger3::EdgeY, {i, j, k});
}
Vec3 GridDesc3::ez_edge(int i, int j, int k) const {
    return lattice_position(*this, Stagger3::EdgeZ, {i, j, k});
}
Vec3 GridDesc3::cell_center(int i, int j, int k) const {
    return lattice_position(*this, Stagger3::Cell, {i, j, k});
}

// ---- arrays ---------------------------------------------------------------

Array2::Array2(int nx, int ny, double fill)
    : nx_(nx), ny_(ny), data_(static_cast<std::size_t>(nx) * ny, fill) {
    if (nx < 0 || ny < 0) throw DimensionError("negative array extent");
}

double Array2::at(int i, int j) const {
    if (!in_range(i, j))
        throw DomainError("index (" + std::to_string(i) + "," + std::to_string(j) +
                          ") outside " + extent_str(nx_, ny_));
    return (*this)(i, j);
}

void Array2::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double Array2::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

Array3::Array3(int nx, int ny, int nz, double fill)
    : nx_(nx), ny_(ny), nz_(nz), data_(static_cast<std::size_t>(nx) * ny * nz, fill) {
    if (nx < 0 || ny < 0 || nz < 0) throw DimensionError("negative array extent");
}

double Array3::at(int i, int j, int k) const {
    if (!in_range(i, j, k))
        throw DomainError("index (" + std::to_string(i) + "," + std::to_string(j) + "," +
                          std::to_string(k) + ") outside " + extent_str(nx_, ny_, nz_));
    return (*this)(i, j, k);
}

void Array3::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

double Array3::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

// ---- fields ---------------------------------------------------------------

MacField2::MacField2(const GridDesc2& d)
    : desc(d), u(d.nx + 1, d.ny), v(d.nx, d.ny + 1) {
    d.validate();
}

void MacField2::check() const {
    desc.validate();
    require_shape(u, desc.nx + 1, desc.ny, "u");
    require_shape(v, desc.nx, desc.ny + 1, "v");
}

double MacField2::max_abs() const { return std::max(u.max_abs(), v.max_abs()); }

MacField3::MacField3(const GridDesc3& d)
    : desc(d),
      u(d.nx + 1, d.ny, d.nz),
      v(d.nx, d.ny + 1, d.nz),
      w(d.nx, d.ny, d.nz + 1) {
    d.validate();
}

void MacField3::check() const {
    desc.validate();
    require_shape(u, desc.nx + 1, desc.ny, desc.nz, "u");
    require_shape(v, desc.nx, desc.ny + 1, desc.nz, "v");
    require_shape(w, desc.nx, desc.ny, desc.nz + 1, "w");
}

double MacField3::max_abs() const {
    return std::max({u.max_abs(), v.max_abs(), w.max_abs()});
}

NodalField2::NodalField2(const GridDesc2& d, double fill)
    : desc(d), values(d.nx + 1, d.ny + 1, fill) {
    d.validate();
}

NodalField3::NodalField3(const GridDesc3& d, double fill)
    : desc(d), values(d.nx + 1, d.ny + 1, d.nz + 1, fill) {
    d.validate();
}

EdgeField3::EdgeField3(const GridDesc3& d)
    : desc(d),
      ex(d.nx, d.ny + 1, d.nz + 1),
      ey(d.nx + 1, d.ny, d.nz + 1),
      ez(d.nx + 1, d.ny + 1, d.nz) {
    d.validate();
}

void EdgeField3::check() const {
    desc.validate();
    require_shape(ex, desc.nx, desc.ny + 1, desc.nz + 1, "ex");
    require_shape(ey, desc.nx + 1, desc.ny, desc.nz + 1, "ey");
    require_shape(ez, desc.nx + 1, desc.ny + 1, desc.nz, "ez");
}

double EdgeField3::max_abs() const {
    return std::max({ex.max_abs(), ey.max_abs(), ez.max_abs()});
}

// ---- operators ------------------------------------------------------------

Array2 discrete_divergence(const MacField2& f, const FaceWeights2* wts) {
    f.check();
    const auto& d = f.desc;
    if (wts) {
        require_shape(wts->u, d.nx + 1, d.ny, "u weights");
        require_shape(wts->v, d.nx, d.ny + 1, "v weights");
    }
    auto wu = [&](int i, int j) { return wts ? wts->u(i, j) : 1.0; };
    auto wv = [&](int i, int j) { return wts ? wts->v(i, j) : 1.0; };
    Array2 div(d.nx, d.ny);
    const double inv_h = 1.0 / d.h;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) {
            double s = wu(i + 1, j) * f.u(i + 1, j) - wu(i, j) * f.u(i, j) +
                       wv(i, j + 1) * f.v(i, j + 1) - wv(i, j) * f.v(i, j);
            div(i, j) = s * inv_h;
        }
    return div;
}

Array3 discrete_divergence(const MacField3& f, const FaceWeights3* wts) {
    f.check();
    const auto& d = f.desc;
    if (wts) {
        require_shape(wts->u, d.nx + 1, d.ny, d.nz, "u weights");
        require_shape(wts->v, d.nx, d.ny + 1, d.nz, "v weights");
        require_shape(wts->w, d.nx, d.ny, d.nz + 1, "w weights");
    }
    Array3 div(d.nx, d.ny, d.nz);
    const double inv_h = 1.0 / d.h;
#pragma omp parallel for schedule(static)
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                double s;
                if (wts) {
                    s = wts->u(i + 1, j, k) * f.u(i + 1, j, k) - wts->u(i, j, k) * f.u(i, j, k) +
                        wts->v(i, j + 1, k) * f.v(i, j + 1, k) - wts->v(i, j, k) * f.v(i, j, k) +
                        wts->w(i, j, k + 1) * f.w(i, j, k + 1) - wts->w(i, j, k) * f.w(i, j, k);
                } else {
                    s = f.u(i + 1, j, k) - f.u(i, j, k) + f.v(i, j + 1, k) - f.v(i, j, k) +
                        f.w(i, j, k + 1) - f.w(i, j, k);
                }
                div(i, j, k) = s * inv_h;
            }
    return div;
}

FaceCirculation3 face_circulation(const EdgeField3& p) {
    p.check();
    const auto& d = p.desc;
    const double h = d.h;
    FaceCirculation3 c{Array3(d.nx + 1, d.ny, d.nz), Array3(d.nx, d.ny + 1, d.nz),
                       Array3(d.nx, d.ny, d.nz + 1)};
#pragma omp parallel for schedule(static)
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i <= d.nx; ++i)
                c.u(i, j, k) = h * (p.ey(i, j, k) + p.ez(i, j + 1, k) - p.ey(i, j, k + 1) -
                                    p.ez(i, j, k));
#pragma omp parallel for schedule(static)
    for (int k = 0; k < d.nz; ++k)
        for (int j = 0; j <= d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                c.v(i, j, k) = h * (p.ez(i, j, k) + p.ex(i, j, k + 1) - p.ez(i + 1, j, k) -
                                    p.ex(i, j, k));
#pragma omp parallel for schedule(static)
    for (int k = 0; k <= d.nz; ++k)
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i)
                c.w(i, j, k) = h * (p.ex(i, j, k) + p.ey(i + 1, j, k) - p.ex(i, j + 1, k) -
                                    p.ey(i, j, k));
    return c;
}

MacField3 curl_flux(const EdgeField3& psi) {
    auto c = face_circulation(psi);
    MacField3 f(psi.desc);
    const double inv_a = 1.0 / (psi.desc.h * psi.desc.h);
    auto scale = [&](const Array3& src, Array3& dst) {
        for (std::size_t n = 0; n < src.size(); ++n) dst.data()[n] = src.data()[n] * inv_a;
    };
    scale(c.u, f.u);
    scale(c.v, f.v);
    scale(c.w, f.w);
    return f;
}

Array3 nodal_divergence(const EdgeField3& p) {
    p.check();
    const auto& d = p.desc;
    Array3 div(d.nx + 1, d.ny + 1, d.nz + 1);
    const double inv_h = 1.0 / d.h;
#pragma omp parallel for schedule(static)
    for (int k = 1; k < d.nz; ++k)
        for (int j = 1; j < d.ny; ++j)
            for (int i = 1; i < d.nx; ++i)
                div(i, j, k) = (p.ex(i, j, k) - p.ex(i - 1, j, k) + p.ey(i, j, k) -
                                p.ey(i, j - 1, k) + p.ez(i, j, k) - p.ez(i, j, k - 1)) *
                               inv_h;
    return div;
}

EdgeField3 nodal_gradient(const NodalField3& phi) {
    const auto& d = phi.desc;
    require_shape(phi.values, d.nx + 1, d.ny + 1, d.nz + 1, "phi");
    EdgeField3 g(d);
    const double inv_h = 1.0 / d.h;
    const auto& v = phi.values;
#pragma omp parallel for schedule(static)
    for (int k = 0; k <= d.nz; ++k)
        for (int j = 0; j <= d.ny; ++j)
            for (int i = 0; i <= d.nx; ++i) {
                if (i < d.nx) g.ex(i, j, k) = (v(i + 1, j, k) - v(i, j, k)) * inv_h;
                if (j < d.ny) g.ey(i, j, k) = (v(i, j + 1, k) - v(i, j, k)) * inv_h;
                if (k < d.nz) g.ez(i, j, k) = (v(i, j, k + 1) - v(i, j, k)) * inv_h;
            }
    return g;
}

// ---- index maps -----------------------------------------------------------

Vec2 stagger_offset(Stagger2 s) {
    switch (s) {
        case Stagger2::Node: return {0.0, 0.0};
        case Stagger2::UFace: return {0.0, 0.5};
        case Stagger2::VFace: return {0.5, 0.0};
        case Stagger2::Cell: return {0.5, 0.5};
    }
    return {};
}

Vec3 stagger_offset(Stagger3 s) {
    switch (s) {
        case Stagger3::Node: return {0.0, 0.0, 0.0};
        case Stagger3::UFace: return {0.0, 0.5, 0.5};
        case Stagger3::VFace: return {0.5, 0.0, 0.5};
        case Stagger3::WFace: return {0.5, 0.5, 0.0};
        case Stagger3::EdgeX: return {0.5, 0.0, 0.0};
        case Stagger3::EdgeY: return {0.0, 0.5, 0.0};
        case Stagger3::EdgeZ: return {0.0, 0.0, 0.5};
        case Stagger3::Cell: return {0.5, 0.5, 0.5};
    }
    return {};
}

Index2 lattice_extent(const GridDesc2& d, Stagger2 s) {
    Vec2 o = stagger_offset(s);
    return {d.nx + (o.x == 0.0 ? 1 : 0), d.ny + (o.y == 0.0 ? 1 : 0)};
}

Index3 lattice_extent(const GridDesc3& d, Stagger3 s) {
    Vec3 o = stagger_offset(s);
    return {d.nx + (o.x == 0.0 ? 1 : 0), d.ny + (o.y == 0.0 ? 1 : 0),
            d.nz + (o.z == 0.0 ? 1 : 0)};
}

Vec2 lattice_position(const GridDesc2& d, Stagger2 s, Index2 idx) {
    Index2 n = lattice_extent(d, s);
    if (idx.i < 0 || idx.j < 0 || idx.i >= n.i || idx.j >= n.j)
        throw DomainError("index (" + std::to_string(idx.i) + "," + std::to_string(idx.j) +
                          ") outside lattice " + extent_str(n.i, n.j));
    Vec2 o = stagger_offset(s);
    return d.origin + Vec2{(idx.i + o.x) * d.h, (idx.j + o.y) * d.h};
}

Vec3 lattice_position(const GridDesc3& d, Stagger3 s, Index3 idx) {
    Index3 n = lattice_extent(d, s);
    if (idx.i < 0 || idx.j < 0 || idx.k < 0 || idx.i >= n.i || idx.j >= n.j || idx.k >= n.k)
        throw DomainError("index (" + std::to_string(idx.i) + "," + std::to_string(idx.j) + "," +
                          std::to_string(idx.k) + ") outside lattice " +
                          extent_str(n.i, n.j, n.k));
    Vec3 o = stagger_offset(s);
    return d.origin + Vec3{(idx.i + o.x) * d.h, (idx.j + o.y) * d.h, (idx.k + o.z) * d.h};
}

Index2 nearest_index(const GridDesc2& d, Stagger2 s, Vec2 p) {
    Vec2 o = stagger_offset(s);
    Index2 n = lattice_extent(d, s);
    Index2 r{static_cast<int>(std::lround((p.x - d.origin.x) / d.h - o.x)),
             static_cast<int>(std::lround((p.y - d.origin.y) / d.h - o.y))};
    r.i = std::clamp(r.i, 0, n.i - 1);
    r.j = std::clamp(r.j, 0, n.j - 1);
    return r;
}

Index3 nearest_index(const GridDesc3& d, Stagger3 s, Vec3 p) {
    Vec3 o = stagger_offset(s);
    Index3 n = lattice_extent(d, s);
    Index3 r{static_cast<int>(std::lround((p.x - d.origin.x) / d.h - o.x)),
             static_cast<int>(std::lround((p.y - d.origin.y) / d.h - o.y)),
             static_cast<int>(std::lround((p.z - d.origin.z) / d.h - o.z))};
    r.i = std::clamp(r.i, 0, n.i - 1);
    r.j = std::clamp(r.j, 0, n.j - 1);
    r.k = std::clamp(r.k, 0, n.k - 1);
    return r;
}

}  // namespace curlflow
