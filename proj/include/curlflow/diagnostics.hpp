#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "curlflow/advection.hpp"
#include "curlflow/sampler.hpp"

namespace curlflow {

constexpr int kHistogramBins = 32;

/// Pointwise divergence statistics of |div u| h / max|u|.
struct DivergenceReport {
    std::size_t samples = 0;
    double eps = 0.0;
    double h = 0.0;
    double max_speed = 0.0;  // max |u| over the sample points, used for scaling
    double max = 0.0, mean = 0.0, rms = 0.0;
    std::array<long long, kHistogramBins> histogram{};  // log10 bins over [1e-16, 1)
    std::uint64_t seed = 0;
    std::vector<double> worst_point;
};

struct DivergenceOptions {
    double eps_over_h = 1e-4;
    /// Skip points within this many eps of a multiple of h/2 on any axis,
    /// where piecewise-polynomial interpolants have derivative kinks.
    double kink_margin = 2.0;
};

/// Points uniform in the domain (eps inside walls, eps outside `solid`),
/// central differences per component. Throws ConfigError for n = 0.
DivergenceReport sample_divergence(const VelocitySampler2& s, double h, std::size_t n,
                                   std::uint64_t seed, const SolidField2* solid = nullptr,
                                   DivergenceOptions opt = {});
DivergenceReport sample_divergence(const VelocitySampler3& s, double h, std::size_t n,
                                   std::uint64_t seed, const SolidField3* solid = nullptr,
                                   DivergenceOptions opt = {});

/// Histogram bin of a nondimensional value.
int histogram_bin(double value);

struct UniformityReport {
    std::size_t particles = 0;
    double bandwidth = 0.0;
    double mean_density = 0.0;
    double density_cov = 0.0;     // std / mean of per-particle KDE densities
    double empty_fraction = 0.0;  // analysis cells without any particle
    int analysis_cells = 0;
};

/// Gaussian KDE (bandwidth 2h); each estimate is divided by the mass of the
/// kernel centred there that lies inside the domain box; empty-cell fraction on the grid refined `refine`
/// times per axis, ignoring cells whose center lies inside `solid`.
UniformityReport uniformity(const ParticleSet2& ps, const GridDesc2& g, int refine = 1,
                            const SolidField2* solid = nullptr);
UniformityReport uniformity(const ParticleSet3& ps, const GridDesc3& g, int refine = 1,
                            const SolidField3* solid = nullptr);

struct FluxScan {
    std::size_t samples = 0;
    double max = 0.0, mean = 0.0;
    std::vector<double> worst_point;
};

/// |u.n| at random points on one axis wall (0..5 in 3D, 0..3 in 2D).
FluxScan wall_flux_scan(const VelocitySampler3& s, int wall, std::size_t n, std::uint64_t seed);
FluxScan wall_flux_scan(const VelocitySampler2& s, int wall, std::size_t n, std::uint64_t seed);
/// Random points in `box` projected onto the solid surface; n = unit gradient there.
FluxScan solid_flux_scan(const VelocitySampler3& s, const SolidField3& solid, const Box3& box,
                         std::size_t n, std::uint64_t seed);
FluxScan solid_flux_scan(const VelocitySampler2& s, const SolidField2& solid, const Box2& box,
                         std::size_t n, std::uint64_t seed);
/// |(u - u_ref).t| at the points the flux scans above visit, t the unit
/// tangent; measures what a boundary correction does to free-slip speed.
FluxScan wall_tangential_error(const VelocitySampler2& s, const VelocitySampler2& ref, int wall,
                               std::size_t n, std::uint64_t seed);
FluxScan solid_tangential_error(const VelocitySampler2& s, const VelocitySampler2& ref,
                                const SolidField2& solid, const Box2& box, std::size_t n,
                                std::uint64_t seed);

/// `key=value` pairs joined by single spaces.
std::string summary_line(const std::vector<std::pair<std::string, std::string>>& kv);
std::vector<std::pair<std::string, std::string>> summary_fields(const std::string& label,
                                                                const DivergenceReport& r);
std::vector<std::pair<std::string, std::string>> summary_fields(const std::string& label,
                                                                const UniformityReport& r);

/// `bin_lo,bin_hi,count` rows.
void write_histogram_csv(std::ostream& os, const DivergenceReport& r);

namespace serial {
DivergenceReport sample_divergence(const VelocitySampler2& s, double h, std::size_t n,
                                   std::uint64_t seed, const SolidField2* solid = nullptr,
                                   DivergenceOptions opt = {});
DivergenceReport sample_divergence(const VelocitySampler3& s, double h, std::size_t n,
                                   std::uint64_t seed, const SolidField3* solid = nullptr,
                                   DivergenceOptions opt = {});
}  // namespace serial

}  // namespace curlflow
