#include "curlflow/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace curlflow {

const char* kernel_name(KernelOrder k) { return k == KernelOrder::Linear ? "linear" : "quadratic"; }

Stencil1 kernel_stencil(KernelOrder k, double s) {
    Stencil1 st;
    if (k == KernelOrder::Linear) {
        double b = std::floor(s);
        double f = s - b;
        st.base = static_cast<int>(b);
        st.count = 2;
        st.w[0] = 1.0 - f;
        st.w[1] = f;
        st.dw[0] = -1.0;
        st.dw[1] = 1.0;
        return st;
    }
    double b = std::floor(s - 0.5);
    double f = s - b;  // in [0.5, 1.5)
    st.base = static_cast<int>(b);
    st.count = 3;
    double a0 = 1.5 - f, a1 = f - 1.0, a2 = f - 0.5;
    st.w[0] = 0.5 * a0 * a0;
    st.w[1] = 0.75 - a1 * a1;
    st.w[2] = 0.5 * a2 * a2;
    st.dw[0] = -a0;
    st.dw[1] = -2.0 * a1;
    st.dw[2] = a2;
    return st;
}

namespace {

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

}  // namespace

Lattice2::Lattice2(int nx, int ny, Vec2 origin, double h)
    : nx_(nx), ny_(ny), origin_(origin), h_(h),
      data_(static_cast<std::size_t>(nx + 2) * (ny + 2), 0.0) {}

void Lattice2::fill_ghost_copy() {
    for (int j = -1; j <= ny_; ++j)
        for (int i = -1; i <= nx_; ++i) {
            if (i >= 0 && j >= 0 && i < nx_ && j < ny_) continue;
            at(i, j) = at(clampi(i, 0, nx_ - 1), clampi(j, 0, ny_ - 1));
        }
}

ValueGrad2 Lattice2::eval(Vec2 x, KernelOrder k) const {
    const double inv_h = 1.0 / h_;
    Stencil1 sx = kernel_stencil(k, (x.x - origin_.x) * inv_h);
    Stencil1 sy = kernel_stencil(k, (x.y - origin_.y) * inv_h);
    ValueGrad2 r;
    for (int b = 0; b < sy.count; ++b) {
        int j = clampi(sy.base + b, -1, ny_);
        double row_v = 0.0, row_d = 0.0;
        for (int a = 0; a < sx.count; ++a) {
            double v = at(clampi(sx.base + a, -1, nx_), j);
            row_v += sx.w[a] * v;
            row_d += sx.dw[a] * v;
        }
        r.value += sy.w[b] * row_v;
        r.grad.x += sy.w[b] * row_d;
        r.grad.y += sy.dw[b] * row_v;
    }
    r.grad *= inv_h;
    return r;
}

Lattice3::Lattice3(int nx, int ny, int nz, Vec3 origin, double h)
    : nx_(nx), ny_(ny), nz_(nz), origin_(origin), h_(h),
      data_(static_cast<std::size_t>(nx + 2) * (ny + 2) * (nz + 2), 0.0) {}

void Lattice3::fill_ghost_copy() {
    for (int k = -1; k <= nz_; ++k)
        for (int j = -1; j <= ny_; ++j)
            for (int i = -1; i <= nx_; ++i) {
                if (i >= 0 && j >= 0 && k >= 0 && i < nx_ && j < ny_ && k < nz_) continue;
                at(i, j, k) =
                    at(clampi(i, 0, nx_ - 1), clampi(j, 0, ny_ - 1), clampi(k, 0, nz_ - 1));
            }
}

ValueGrad3 Lattice3::eval(Vec3 x, KernelOrder kord) const {
    const double inv_h = 1.0 / h_;
    Stencil1 sx = kernel_stencil(kord, (x.x - origin_.x) * inv_h);
    Stencil1 sy = kernel_stencil(kord, (x.y - origin_.y) * inv_h);
    Stencil1 sz = kernel_stencil(kord, (x.z - origin_.z) * inv_h);
    int ix[3], iy[3];
    for (int a = 0; a < sx.count; ++a) ix[a] = clampi(sx.base + a, -1, nx_);
    for (int b = 0; b < sy.count; ++b) iy[b] = clampi(sy.base + b, -1, ny_);
    ValueGrad3 r;
    for (int c = 0; c < sz.count; ++c) {
        int kk = clampi(sz.base + c, -1, nz_);
        double pv = 0.0, pdx = 0.0, pdy = 0.0;
        for (int b = 0; b < sy.count; ++b) {
            double rv = 0.0, rd = 0.0;
            for (int a = 0; a < sx.count; ++a) {
                double v = at(ix[a], iy[b], kk);
                rv += sx.w[a] * v;
                rd += sx.dw[a] * v;
            }
            pv += sy.w[b] * rv;
            pdx += sy.w[b] * rd;
            pdy += sy.dw[b] * rv;
        }
        r.value += sz.w[c] * pv;
        r.grad.x += sz.w[c] * pdx;
        r.grad.y += sz.w[c] * pdy;
        r.grad.z += sz.dw[c] * pv;
    }
    r.grad *= inv_h;
    return r;
}

}  // namespace curlflow
