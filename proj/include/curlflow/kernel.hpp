#pragma once

#include <vector>

#include "curlflow/vec.hpp"

namespace curlflow {

enum class KernelOrder { Linear, Quadratic };

const char* kernel_name(KernelOrder k);

/// 1D interpolation stencil at lattice coordinate s (sample i sits at s = i).
/// `dw` are derivatives with respect to s.
struct Stencil1 {
    int base = 0;
    int count = 0;
    double w[3] = {0, 0, 0};
    double dw[3] = {0, 0, 0};
};

/// Linear hat (support 1) or quadratic B-spline (support 1.5, C1).
Stencil1 kernel_stencil(KernelOrder k, double s);

struct ValueGrad2 {
    double value = 0.0;
    Vec2 grad{};
};

struct ValueGrad3 {
    double value = 0.0;
    Vec3 grad{};
};

/// Scalar samples on a regular lattice with a one-sample ghost ring.
/// Sample (i, j) sits at origin + (i, j) h for i in [-1, nx], j in [-1, ny].
class Lattice2 {
public:
    Lattice2() = default;
    Lattice2(int nx, int ny, Vec2 origin, double h);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double h() const { return h_; }
    Vec2 origin() const { return origin_; }

    double& at(int i, int j) { return data_[index(i, j)]; }
    double at(int i, int j) const { return data_[index(i, j)]; }
    /// Copies the nearest interior sample into every ghost sample.
    void fill_ghost_copy();
    const std::vector<double>& raw() const { return data_; }

    ValueGrad2 eval(Vec2 x, KernelOrder k) const;

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(j + 1) * (nx_ + 2) + (i + 1);
    }
    int nx_ = 0, ny_ = 0;
    Vec2 origin_{};
    double h_ = 1.0;
    std::vector<double> data_;
};

class Lattice3 {
public:
    Lattice3() = default;
    Lattice3(int nx, int ny, int nz, Vec3 origin, double h);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    int nz() const { return nz_; }
    double h() const { return h_; }
    Vec3 origin() const { return origin_; }

    double& at(int i, int j, int k) { return data_[index(i, j, k)]; }
    double at(int i, int j, int k) const { return data_[index(i, j, k)]; }
    void fill_ghost_copy();

    ValueGrad3 eval(Vec3 x, KernelOrder k) const;

private:
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(k + 1) * (ny_ + 2) + (j + 1)) * (nx_ + 2) + (i + 1);
    }
    int nx_ = 0, ny_ = 0, nz_ = 0;
    Vec3 origin_{};
    double h_ = 1.0;
    std::vector<double> data_;
};

}  // namespace curlflow
