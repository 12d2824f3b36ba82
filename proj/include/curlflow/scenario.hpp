#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "curlflow/advection.hpp"
#include "curlflow/diagnostics.hpp"
#include "curlflow/poisson.hpp"
#include "curlflow/ramp.hpp"
#include "curlflow/rbf.hpp"

namespace curlflow {

struct SolidSpec {
    std::string type;  // circle rect polyline levelset | sphere cuboid halfspace levelset
    std::vector<double> center, lo, hi, normal;
    double radius = 0.0, thickness = 0.0, offset = 0.0;
    std::vector<Vec2> points;
    std::string file;
};

struct SamplerSpec {
    std::string label;
    std::string scheme = "curlflow";  // direct_linear, direct_monotonic_cubic, curlflow
    KernelOrder kernel = KernelOrder::Quadratic;
    bool ramp = false;  // 2D: psi ramp on closed walls and solids; 3D: tangential wall ramp
    RampParams ramp_params;
    bool velocity_ramp = false;  // 3D normal-velocity ramp toward solids
    RampParams velocity_ramp_params;
    bool rbf = false;
    double rbf_sigma_over_h = 1.2, rbf_cutoff_over_sigma = 3.0;
    int rbf_nu = 3;
};

struct ForceSpec {
    std::vector<double> lo, hi;  // region
    std::vector<double> accel;
    int start = 0, every = 1, duration = 1;  // active when (frame - start) % every < duration
};

struct ScenarioConfig {
    std::string name = "scenario";
    int dimension = 2;
    int nx = 1, ny = 1, nz = 1;
    double h = 1.0;
    std::vector<double> origin;
    DomainBc bc;
    std::vector<SolidSpec> solids;

    std::string velocity_source = "random";  // random, uniform, dump
    double velocity_amplitude = 1.0;
    std::vector<double> velocity_value;
    std::string velocity_file;
    double projection_tol = 1e-10;  // L1 cell-residual stop

    bool simulate = false;
    double sim_dt = 0.0;  // 0: use the particle step
    std::vector<ForceSpec> forces;

    std::string seeding = "lattice";  // lattice, plane_x
    int per_axis = 4;
    double plane_x = 0.0;
    int plane_n = 16;
    double plane_margin = 0.0;
    std::vector<double> seed_lo, seed_hi;  // lattice seeding restricted to this box
    bool inflow = false;  // 2D: keep feeding particles through the x- inflow wall
    CollisionPolicy policy = CollisionPolicy::Freeze;
    double dt = 0.0;   // explicit step, or
    double cfl = 1.0;  // dt = cfl h / max face speed
    int frames = 300;
    int substeps = 1;  // RK3 steps per frame, each dt / substeps

    std::vector<SamplerSpec> samplers;

    int dump_every = 0;  // 0: first and last frame only
    std::size_t divergence_samples = 10000;
    bool report_divergence = true;
    bool report_uniformity = true;
    int uniformity_every = 100;
    int uniformity_refine = 1;
    std::vector<double> uniformity_lo, uniformity_hi;  // analysis region, snapped to cells; empty: domain
    bool report_flux = true;
    bool report_tangential = false;  // 2D: ramped vs unramped tangential speed on boundaries

    std::uint64_t seed = 1;
    std::string base_dir;  // relative file references resolve against this
};

/// Parses a config document. With `violations`, every problem is appended
/// and parsing continues; without, the collected problems are thrown as one
/// ConfigError. Throws ConfigError for unparseable JSON either way. Relative
/// file references resolve against `base_dir`.
ScenarioConfig parse_config(const std::string& json_text, std::vector<std::string>* violations = nullptr,
                            const std::string& base_dir = {});
ScenarioConfig load_config(const std::string& path, std::vector<std::string>* violations = nullptr);
/// Invariant violations of a config file; empty when valid.
std::vector<std::string> validate_config_file(const std::string& path);
/// Post-parse checks (ranges, files, mass balance); appends to `out`.
void check_config(const ScenarioConfig& c, std::vector<std::string>& out);

/// Net inflow through prescribed walls; zero is required when no wall is open.
double net_prescribed_inflow(const DomainBc& bc, const GridDesc3& g, int dim);

struct SamplerOutcome {
    std::string label;
    std::optional<DivergenceReport> divergence;
    std::vector<std::pair<int, UniformityReport>> uniformity;
    long long penetrations = 0;
    std::size_t frozen = 0;
    std::size_t particles = 0;
    std::vector<std::pair<std::string, FluxScan>> flux;
    std::vector<std::pair<std::string, FluxScan>> tangential;
    long long ramp_degenerate = 0;
};

struct RunResult {
    std::string name;
    std::uint64_t seed = 0;
    int frames = 0;
    double dt = 0.0;
    std::vector<SamplerOutcome> samplers;
    std::vector<std::pair<std::string, std::string>> summary;

    const SamplerOutcome& outcome(const std::string& label) const;
};

/// Runs the configured pipeline. With a non-empty `out_dir` writes
/// fields/*.dump, particles/*.csv, reports/*.csv and summary.txt there.
RunResult run_scenario(const ScenarioConfig& c, const std::string& out_dir = {});

/// Lines of `<run-dir>/summary.txt`.
std::vector<std::string> read_summary(const std::string& run_dir);

/// Caps OpenMP threads from CURLFLOW_THREADS when set; returns the cap or 0.
int apply_thread_limit();

/// Uniform random face values in [-amplitude, amplitude], pressure projected
/// under `bc` (and `weights` when given) to `tol`.
MacField2 random_divergence_free(const GridDesc2& g, const DomainBc& bc, std::uint64_t seed,
                                 double tol = 1e-12, const FaceWeights2* weights = nullptr,
                                 double amplitude = 1.0);
MacField3 random_divergence_free(const GridDesc3& g, const DomainBc& bc, std::uint64_t seed,
                                 double tol = 1e-12, const FaceWeights3* weights = nullptr,
                                 double amplitude = 1.0);

}  // namespace curlflow
