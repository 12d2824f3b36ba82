#pragma once

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "curlflow/field_io.hpp"
#include "curlflow/levelset.hpp"
#include "curlflow/poisson.hpp"

namespace curlflow {

struct RbfParams {
    double sigma = 1.2;
    double cutoff = 3.6;
    int nu = 3;

    /// sigma = 1.2 h, C = 3 sigma, nu = 3.
    static RbfParams for_spacing(double h);
    void validate() const;
};

/// {grad grad^T - laplacian I} applied to exp(-r^2/sigma^2) ((1 - r^2/C^2)_+)^nu.
/// Zero for |dx| >= C.
Mat3 matrix_kernel(Vec3 dx, const RbfParams& p);

/// Uniform bucket grid of cell size C over the centers.
class CenterHash {
public:
    CenterHash() = default;
    CenterHash(const std::vector<Vec3>& pts, double cell);
    void insert(Vec3 x, int index);
    /// Calls f(index) for every point within `radius` <= cell of x.
    template <class F>
    void for_near(Vec3 x, double radius, const std::vector<Vec3>& pts, F&& f) const;

private:
    static long long key(long long i, long long j, long long k) {
        constexpr long long off = 1LL << 20;
        return ((i + off) << 42) | ((j + off) << 21) | (k + off);
    }
    double cell_ = 1.0;
    std::unordered_map<long long, std::vector<int>> buckets_;
};

struct RbfFitStats {
    int iterations = 0;
    double residual = 0.0;
    std::size_t nonzeros = 0;
};

struct RbfModel {
    RbfParams params;
    std::vector<Vec3> centers;
    std::vector<Vec3> coeffs;
    CenterHash hash;

    /// sum over centers within C of Phi(x - x_j) c_j.
    Vec3 eval(Vec3 x) const;
    /// Rebuilds the bucket grid after centers change.
    void rebuild_hash();
};

/// Solves the 3N x 3N block system by Jacobi-preconditioned CG to relative
/// residual `tol`. Throws Error naming pairs of centers closer than 1e-6 sigma.
RbfModel fit(const std::vector<Vec3>& centers, const std::vector<Vec3>& targets,
             const RbfParams& p, double tol = 1e-10, RbfFitStats* stats = nullptr);

/// Crossing points of the level set on grid edges, welded within `weld` and
/// projected onto the surface of `solid`.
std::vector<Vec3> surface_vertices(const LevelSet3& ls, const SolidField3& solid, double weld);

/// Text dump: header `CURLFLOW RBF <N> <sigma> <C> <nu>`, then one line per
/// center with x y z cx cy cz.
void save_rbf(const std::string& path, const RbfModel& m);
RbfModel load_rbf(const std::string& path);

template <class F>
void CenterHash::for_near(Vec3 x, double radius, const std::vector<Vec3>& pts, F&& f) const {
    const long long ci = static_cast<long long>(std::floor(x.x / cell_));
    const long long cj = static_cast<long long>(std::floor(x.y / cell_));
    const long long ck = static_cast<long long>(std::floor(x.z / cell_));
    const double r2 = radius * radius;
    for (long long k = ck - 1; k <= ck + 1; ++k)
        for (long long j = cj - 1; j <= cj + 1; ++j)
            for (long long i = ci - 1; i <= ci + 1; ++i) {
                auto it = buckets_.find(key(i, j, k));
                if (it == buckets_.end()) continue;
                for (int n : it->second) {
                    Vec3 d = x - pts[static_cast<std::size_t>(n)];
                    if (dot(d, d) < r2) f(n);
                }
            }
}

}  // namespace curlflow
