#include "curlflow/scenario.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

#include "curlflow/error.hpp"
#include "curlflow/field_io.hpp"

namespace curlflow {

namespace fs = std::filesystem;
using json = nlohmann::json;

// ---- random fields --------------------------------------------------------

MacField2 random_divergence_free(const GridDesc2& g, const DomainBc& bc, std::uint64_t seed,
                                 double tol, const FaceWeights2* weights, double amplitude) {
    MacField2 f(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-amplitude, amplitude);
    for (auto& x : f.u.data()) x = d(rng);
    for (auto& x : f.v.data()) x = d(rng);
    return weights ? pressure_project(f, *weights, bc, tol) : pressure_project(f, bc, tol);
}

MacField3 random_divergence_free(const GridDesc3& g, const DomainBc& bc, std::uint64_t seed,
                                 double tol, const FaceWeights3* weights, double amplitude) {
    MacField3 f(g);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-amplitude, amplitude);
    for (auto& x : f.u.data()) x = d(rng);
    for (auto& x : f.v.data()) x = d(rng);
    for (auto& x : f.w.data()) x = d(rng);
    return weights ? pressure_project(f, *weights, bc, tol) : pressure_project(f, bc, tol);
}

double net_prescribed_inflow(const DomainBc& bc, const GridDesc3& g, int dim) {
    const double ext[3] = {g.nx * g.h, g.ny * g.h, dim == 3 ? g.nz * g.h : 1.0};
    double net = 0.0;
    for (int w = 0; w < 2 * dim; ++w) {
        if (bc.walls[w].kind != WallKind::Prescribed) continue;
        const int axis = w / 2;
        double area = 1.0;
        for (int a = 0; a < dim; ++a)
            if (a != axis) area *= ext[a];
        net += (w % 2 == 0 ? 1.0 : -1.0) * bc.walls[w].speed * area;
    }
    return net;
}

// ---- config parsing -------------------------------------------------------

namespace {

const char* kWallKeys[6] = {"x-", "x+", "y-", "y+", "z-", "z+"};

struct Reader {
    std::vector<std::string>& out;

    template <class T>
    bool get(const json& obj, const char* key, const std::string& path, T& dst) {
        if (!obj.is_object() || !obj.contains(key)) return false;
        try {
            dst = obj.at(key).get<T>();
            return true;
        } catch (const json::exception&) {
            out.push_back(path + key + ": wrong type");
            return false;
        }
    }

    void unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
        if (!obj.is_object()) return;
        for (const auto& item : obj.items()) {
            bool ok = false;
            for (const char* k : known) ok = ok || item.key() == k;
            if (!ok) out.push_back(path + item.key() + ": unknown key");
        }
    }
};

KernelOrder parse_kernel(const std::string& s, const std::string& path, std::vector<std::string>& out) {
    if (s == "linear") return KernelOrder::Linear;
    if (s == "quadratic") return KernelOrder::Quadratic;
    out.push_back(path + ": unknown kernel '" + s + "'");
    return KernelOrder::Quadratic;
}

void parse_ramp(Reader& r, const json& j, const std::string& path, bool& on, RampParams& p) {
    if (j.is_boolean()) {
        on = j.get<bool>();
        return;
    }
    if (!j.is_object()) {
        r.out.push_back(path + ": expected object or boolean");
        return;
    }
    on = true;
    r.get(j, "enabled", path + ".", on);
    r.get(j, "d0", path + ".", p.d0);
    std::string s;
    try {
        if (r.get(j, "profile", path + ".", s)) p.profile = parse_profile(s);
        if (r.get(j, "mode", path + ".", s)) p.mode = parse_mode(s);
    } catch (const ConfigError& e) {
        r.out.push_back(path + ": " + e.what());
    }
    r.unknown_keys(j, path + ".", {"enabled", "d0", "profile", "mode"});
}

void parse_walls(Reader& r, const json& j, ScenarioConfig& c) {
    if (j.is_string()) {
        if (j.get<std::string>() != "closed") r.out.push_back("walls: expected \"closed\" or an object");
        c.bc = DomainBc::closed();
        return;
    }
    if (!j.is_object()) {
        r.out.push_back("walls: expected object");
        return;
    }
    double speed = 0.0;
    if (r.get(j, "wind_tunnel", "walls.", speed)) c.bc = DomainBc::wind_tunnel(speed);
    for (int w = 0; w < 6; ++w) {
        if (!j.contains(kWallKeys[w])) continue;
        const json& e = j.at(kWallKeys[w]);
        const std::string path = std::string("walls.") + kWallKeys[w];
        if (e.is_string()) {
            const auto s = e.get<std::string>();
            if (s == "closed") c.bc.walls[w] = {WallKind::Closed, 0.0};
            else if (s == "open") c.bc.walls[w] = {WallKind::Open, 0.0};
            else r.out.push_back(path + ": unknown wall kind '" + s + "'");
        } else if (e.is_object() && e.contains("prescribed")) {
            double v = 0.0;
            r.get(e, "prescribed", path + ".", v);
            c.bc.walls[w] = {WallKind::Prescribed, v};
        } else {
            r.out.push_back(path + ": expected \"closed\", \"open\" or {\"prescribed\": speed}");
        }
    }
    r.unknown_keys(j, "walls.", {"wind_tunnel", "x-", "x+", "y-", "y+", "z-", "z+"});
}

void parse_solid(Reader& r, const json& j, const std::string& path, SolidSpec& s) {
    if (!j.is_object()) {
        r.out.push_back(path + ": expected object");
        return;
    }
    if (!r.get(j, "type", path + ".", s.type)) r.out.push_back(path + ".type: missing");
    r.get(j, "center", path + ".", s.center);
    r.get(j, "lo", path + ".", s.lo);
    r.get(j, "hi", path + ".", s.hi);
    r.get(j, "normal", path + ".", s.normal);
    r.get(j, "radius", path + ".", s.radius);
    r.get(j, "thickness", path + ".", s.thickness);
    r.get(j, "offset", path + ".", s.offset);
    r.get(j, "file", path + ".", s.file);
    std::vector<std::vector<double>> pts;
    if (r.get(j, "points", path + ".", pts))
        for (const auto& p : pts) {
            if (p.size() != 2) r.out.push_back(path + ".points: expected [x, y] pairs");
            else s.points.push_back({p[0], p[1]});
        }
    r.unknown_keys(j, path + ".",
                   {"type", "center", "lo", "hi", "normal", "radius", "thickness", "offset", "file",
                    "points"});
}

void parse_sampler(Reader& r, const json& j, const std::string& path, SamplerSpec& s) {
    if (j.is_string()) {
        s.scheme = j.get<std::string>();
        s.label = s.scheme;
        return;
    }
    if (!j.is_object()) {
        r.out.push_back(path + ": expected object or string");
        return;
    }
    r.get(j, "scheme", path + ".", s.scheme);
    s.label = s.scheme;
    r.get(j, "label", path + ".", s.label);
    std::string k;
    if (r.get(j, "kernel", path + ".", k)) s.kernel = parse_kernel(k, path + ".kernel", r.out);
    if (j.contains("ramp")) parse_ramp(r, j.at("ramp"), path + ".ramp", s.ramp, s.ramp_params);
    if (j.contains("velocity_ramp"))
        parse_ramp(r, j.at("velocity_ramp"), path + ".velocity_ramp", s.velocity_ramp,
                   s.velocity_ramp_params);
    if (j.contains("rbf")) {
        const json& e = j.at("rbf");
        if (e.is_boolean()) {
            s.rbf = e.get<bool>();
        } else if (e.is_object()) {
            s.rbf = true;
            r.get(e, "enabled", path + ".rbf.", s.rbf);
            r.get(e, "sigma_over_h", path + ".rbf.", s.rbf_sigma_over_h);
            r.get(e, "cutoff_over_sigma", path + ".rbf.", s.rbf_cutoff_over_sigma);
            r.get(e, "nu", path + ".rbf.", s.rbf_nu);
            r.unknown_keys(e, path + ".rbf.", {"enabled", "sigma_over_h", "cutoff_over_sigma", "nu"});
        } else {
            r.out.push_back(path + ".rbf: expected object or boolean");
        }
    }
    r.unknown_keys(j, path + ".", {"scheme", "label", "kernel", "ramp", "velocity_ramp", "rbf"});
}

std::string resolve(const ScenarioConfig& c, const std::string& file) {
    if (file.empty() || fs::path(file).is_absolute() || c.base_dir.empty()) return file;
    return (fs::path(c.base_dir) / file).string();
}

}  // namespace

void check_config(const ScenarioConfig& c, std::vector<std::string>& out) {
    if (c.dimension != 2 && c.dimension != 3) out.push_back("dimension: must be 2 or 3");
    if (c.nx < 1) out.push_back("grid.nx: must be >= 1 (got " + std::to_string(c.nx) + ")");
    if (c.ny < 1) out.push_back("grid.ny: must be >= 1 (got " + std::to_string(c.ny) + ")");
    if (c.dimension == 3 && c.nz < 1)
        out.push_back("grid.nz: must be >= 1 (got " + std::to_string(c.nz) + ")");
    if (!(c.h > 0.0)) out.push_back("grid.h: must be positive");
    if (!c.origin.empty() && static_cast<int>(c.origin.size()) != c.dimension)
        out.push_back("grid.origin: expected " + std::to_string(c.dimension) + " values");

    const bool dims_ok = c.nx >= 1 && c.ny >= 1 && (c.dimension != 3 || c.nz >= 1) && c.h > 0.0;
    if (dims_ok && !c.bc.any_open(c.dimension)) {
        GridDesc3 g{c.nx, c.ny, c.dimension == 3 ? c.nz : 1, c.h, {}};
        const double net = net_prescribed_inflow(c.bc, g, c.dimension);
        double scale = 0.0;
        for (const auto& w : c.bc.walls) scale = std::max(scale, std::abs(w.speed));
        if (std::abs(net) > 1e-12 * std::max(scale, 1.0) * std::pow(std::max({c.nx, c.ny, c.nz}) * c.h, c.dimension - 1))
            out.push_back("walls: net prescribed inflow " + format_double(net) +
                          " must be 0 when no wall is open (solvability)");
    }

    for (std::size_t n = 0; n < c.solids.size(); ++n) {
        const auto& s = c.solids[n];
        const std::string path = "solids[" + std::to_string(n) + "]";
        const std::size_t d = static_cast<std::size_t>(c.dimension);
        auto need = [&](const std::vector<double>& v, const char* key) {
            if (v.size() != d) out.push_back(path + "." + key + ": expected " + std::to_string(d) + " values");
        };
        if (s.type == "levelset") {
            if (s.file.empty()) out.push_back(path + ".file: missing");
            else if (!fs::exists(resolve(c, s.file))) out.push_back(path + ".file: '" + s.file + "' does not exist");
        } else if (c.dimension == 2 && s.type == "circle") {
            need(s.center, "center");
            if (!(s.radius > 0.0)) out.push_back(path + ".radius: must be positive");
        } else if (c.dimension == 2 && s.type == "rect") {
            need(s.lo, "lo");
            need(s.hi, "hi");
        } else if (c.dimension == 2 && s.type == "polyline") {
            if (s.points.size() < 2) out.push_back(path + ".points: need at least 2 points");
            if (!(s.thickness > 0.0)) out.push_back(path + ".thickness: must be positive");
        } else if (c.dimension == 3 && s.type == "sphere") {
            need(s.center, "center");
            if (!(s.radius > 0.0)) out.push_back(path + ".radius: must be positive");
        } else if (c.dimension == 3 && s.type == "cuboid") {
            need(s.lo, "lo");
            need(s.hi, "hi");
        } else if (c.dimension == 3 && s.type == "halfspace") {
            need(s.normal, "normal");
        } else {
            out.push_back(path + ".type: '" + s.type + "' is not a " + std::to_string(c.dimension) + "D solid");
        }
    }

    if (c.velocity_source == "uniform") {
        if (static_cast<int>(c.velocity_value.size()) != c.dimension)
            out.push_back("velocity.value: expected " + std::to_string(c.dimension) + " values");
    } else if (c.velocity_source == "dump") {
        if (c.velocity_file.empty()) out.push_back("velocity.file: missing");
        else if (!fs::exists(resolve(c, c.velocity_file)))
            out.push_back("velocity.file: '" + c.velocity_file + "' does not exist");
    } else if (c.velocity_source != "random") {
        out.push_back("velocity.source: unknown source '" + c.velocity_source + "'");
    }
    if (!(c.projection_tol > 0.0)) out.push_back("velocity.projection_tol: must be positive");

    if (c.sim_dt < 0.0) out.push_back("dynamics.dt: must be >= 0");
    for (std::size_t n = 0; n < c.forces.size(); ++n) {
        const auto& f = c.forces[n];
        const std::string path = "dynamics.forces[" + std::to_string(n) + "]";
        const std::size_t d = static_cast<std::size_t>(c.dimension);
        if (f.lo.size() != d || f.hi.size() != d || f.accel.size() != d)
            out.push_back(path + ": lo, hi and accel need " + std::to_string(d) + " values");
        if (f.every < 1) out.push_back(path + ".every: must be >= 1");
        if (f.duration < 0) out.push_back(path + ".duration: must be >= 0");
    }
    if (!c.simulate && !c.forces.empty()) out.push_back("dynamics.forces: only used with mode \"simulate\"");

    if (c.seeding == "lattice") {
        if (c.per_axis < 1) out.push_back("particles.per_axis: must be >= 1");
    } else if (c.seeding == "plane_x") {
        if (c.dimension != 3) out.push_back("particles.seeding: plane_x needs dimension 3");
        if (c.plane_n < 1) out.push_back("particles.n: must be >= 1");
        if (c.plane_margin < 0.0) out.push_back("particles.margin: must be >= 0");
    } else {
        out.push_back("particles.seeding: unknown seeding '" + c.seeding + "'");
    }
    if (!c.seed_lo.empty() || !c.seed_hi.empty()) {
        const std::size_t d = static_cast<std::size_t>(c.dimension);
        if (c.seeding != "lattice") out.push_back("particles.region: needs lattice seeding");
        if (c.seed_lo.size() != d || c.seed_hi.size() != d)
            out.push_back("particles.region: lo and hi need " + std::to_string(d) + " values");
        else
            for (std::size_t a = 0; a < d; ++a)
                if (!(c.seed_lo[a] < c.seed_hi[a])) {
                    out.push_back("particles.region: needs lo < hi");
                    break;
                }
    }
    if (c.inflow) {
        if (c.dimension != 2) out.push_back("particles.inflow: 2D only");
        if (c.seeding != "lattice") out.push_back("particles.inflow: needs lattice seeding");
        if (c.bc.walls[0].kind != WallKind::Prescribed || !(c.bc.walls[0].speed > 0.0))
            out.push_back("particles.inflow: needs a prescribed positive inflow on wall x-");
    }
    if (c.dt < 0.0) out.push_back("particles.dt: must be >= 0");
    if (c.dt == 0.0 && !(c.cfl > 0.0)) out.push_back("particles.cfl: must be positive");
    if (c.frames < 0) out.push_back("particles.frames: must be >= 0");
    if (c.substeps < 1) out.push_back("particles.substeps: must be >= 1");

    if (c.samplers.empty()) out.push_back("samplers: at least one sampler is required");
    std::set<std::string> labels;
    for (std::size_t n = 0; n < c.samplers.size(); ++n) {
        const auto& s = c.samplers[n];
        const std::string path = "samplers[" + std::to_string(n) + "]";
        if (!labels.insert(s.label).second) out.push_back(path + ".label: duplicate '" + s.label + "'");
        if (s.label.empty() || s.label.find_first_of(" =/\\") != std::string::npos)
            out.push_back(path + ".label: must be non-empty without spaces, '=' or slashes");
        const bool direct = s.scheme == "direct_linear" || s.scheme == "direct_monotonic_cubic";
        if (!direct && s.scheme != "curlflow")
            out.push_back(path + ".scheme: unknown scheme '" + s.scheme + "'");
        if (direct && (s.ramp || s.velocity_ramp || s.rbf))
            out.push_back(path + ": ramps and rbf apply to the curlflow scheme only");
        if (s.ramp && !(s.ramp_params.d0 > 0.0)) out.push_back(path + ".ramp.d0: must be positive");
        if (s.velocity_ramp) {
            if (c.dimension != 3) out.push_back(path + ".velocity_ramp: 3D only");
            if (!(s.velocity_ramp_params.d0 > 0.0)) out.push_back(path + ".velocity_ramp.d0: must be positive");
            if (s.velocity_ramp_params.mode != RampMode::Additive)
                out.push_back(path + ".velocity_ramp.mode: only additive is defined for velocities");
        }
        if (s.rbf) {
            if (c.dimension != 3) out.push_back(path + ".rbf: 3D only");
            if (c.solids.empty()) out.push_back(path + ".rbf: needs a solid");
            if (!(s.rbf_sigma_over_h > 0.0) || !(s.rbf_cutoff_over_sigma > 0.0) || s.rbf_nu < 2)
                out.push_back(path + ".rbf: sigma_over_h, cutoff_over_sigma > 0 and nu >= 2 required");
        }
        if (s.ramp && c.dimension == 3 && !c.bc.fully_closed(3))
            out.push_back(path + ".ramp: tangential wall ramps need every wall closed");
    }

    if (c.report_divergence && c.divergence_samples == 0)
        out.push_back("outputs.divergence_samples: must be positive");
    if (!c.uniformity_lo.empty() || !c.uniformity_hi.empty()) {
        const std::size_t d = static_cast<std::size_t>(c.dimension);
        if (c.uniformity_lo.size() != d || c.uniformity_hi.size() != d) {
            out.push_back("outputs.uniformity_region: lo and hi need " + std::to_string(d) + " values");
        } else {
            const int n[3] = {c.nx, c.ny, c.nz};
            for (std::size_t a = 0; a < d; ++a) {
                const double o = c.origin.size() == d ? c.origin[a] : 0.0;
                if (!(c.uniformity_lo[a] < c.uniformity_hi[a]) || c.uniformity_lo[a] < o ||
                    c.uniformity_hi[a] > o + n[a] * c.h) {
                    out.push_back("outputs.uniformity_region: needs lo < hi inside the domain");
                    break;
                }
            }
        }
    }
    if (c.report_tangential && c.dimension != 2) out.push_back("outputs.tangential: 2D only");
    if (c.uniformity_every < 1) out.push_back("outputs.uniformity_every: must be >= 1");
    if (c.uniformity_refine < 1) out.push_back("outputs.uniformity_refine: must be >= 1");
    if (c.dump_every < 0) out.push_back("outputs.dump_every: must be >= 0");
}

ScenarioConfig parse_config(const std::string& json_text, std::vector<std::string>* violations,
                            const std::string& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    std::vector<std::string> local;
    std::vector<std::string>& out = violations ? *violations : local;
    Reader r{out};
    ScenarioConfig c;
    c.base_dir = base_dir;
    if (!j.is_object()) {
        out.push_back("config: expected a JSON object");
    } else {
        r.get(j, "name", "", c.name);
        r.get(j, "dimension", "", c.dimension);
        r.get(j, "seed", "", c.seed);
        if (j.contains("grid")) {
            const json& g = j.at("grid");
            r.get(g, "nx", "grid.", c.nx);
            r.get(g, "ny", "grid.", c.ny);
            r.get(g, "nz", "grid.", c.nz);
            r.get(g, "h", "grid.", c.h);
            r.get(g, "origin", "grid.", c.origin);
            r.unknown_keys(g, "grid.", {"nx", "ny", "nz", "h", "origin"});
        } else {
            out.push_back("grid: missing");
        }
        if (j.contains("walls")) parse_walls(r, j.at("walls"), c);
        if (j.contains("solids")) {
            if (!j.at("solids").is_array()) out.push_back("solids: expected array");
            else
                for (std::size_t n = 0; n < j.at("solids").size(); ++n) {
                    c.solids.emplace_back();
                    parse_solid(r, j.at("solids")[n], "solids[" + std::to_string(n) + "]", c.solids.back());
                }
        }
        if (j.contains("velocity")) {
            const json& v = j.at("velocity");
            r.get(v, "source", "velocity.", c.velocity_source);
            r.get(v, "amplitude", "velocity.", c.velocity_amplitude);
            r.get(v, "value", "velocity.", c.velocity_value);
            r.get(v, "file", "velocity.", c.velocity_file);
            r.get(v, "projection_tol", "velocity.", c.projection_tol);
            r.unknown_keys(v, "velocity.", {"source", "amplitude", "value", "file", "projection_tol"});
        }
        if (j.contains("dynamics")) {
            const json& d = j.at("dynamics");
            std::string mode = "static";
            r.get(d, "mode", "dynamics.", mode);
            if (mode == "simulate") c.simulate = true;
            else if (mode != "static") out.push_back("dynamics.mode: unknown mode '" + mode + "'");
            r.get(d, "dt", "dynamics.", c.sim_dt);
            if (d.is_object() && d.contains("forces")) {
                const json& fa = d.at("forces");
                for (std::size_t n = 0; fa.is_array() && n < fa.size(); ++n) {
                    ForceSpec f;
                    const std::string path = "dynamics.forces[" + std::to_string(n) + "].";
                    r.get(fa[n], "lo", path, f.lo);
                    r.get(fa[n], "hi", path, f.hi);
                    r.get(fa[n], "accel", path, f.accel);
                    r.get(fa[n], "start", path, f.start);
                    r.get(fa[n], "every", path, f.every);
                    r.get(fa[n], "duration", path, f.duration);
                    r.unknown_keys(fa[n], path, {"lo", "hi", "accel", "start", "every", "duration"});
                    c.forces.push_back(f);
                }
            }
            r.unknown_keys(d, "dynamics.", {"mode", "dt", "forces"});
        }
        if (j.contains("particles")) {
            const json& p = j.at("particles");
            r.get(p, "seeding", "particles.", c.seeding);
            r.get(p, "per_axis", "particles.", c.per_axis);
            r.get(p, "x", "particles.", c.plane_x);
            r.get(p, "n", "particles.", c.plane_n);
            r.get(p, "margin", "particles.", c.plane_margin);
            r.get(p, "dt", "particles.", c.dt);
            r.get(p, "cfl", "particles.", c.cfl);
            r.get(p, "frames", "particles.", c.frames);
            r.get(p, "substeps", "particles.", c.substeps);
            r.get(p, "inflow", "particles.", c.inflow);
            if (p.is_object() && p.contains("region")) {
                const json& b = p.at("region");
                r.get(b, "lo", "particles.region.", c.seed_lo);
                r.get(b, "hi", "particles.region.", c.seed_hi);
                r.unknown_keys(b, "particles.region.", {"lo", "hi"});
            }
            std::string pol;
            if (r.get(p, "policy", "particles.", pol)) {
                if (pol == "freeze") c.policy = CollisionPolicy::Freeze;
                else if (pol == "project") c.policy = CollisionPolicy::Project;
                else if (pol == "none") c.policy = CollisionPolicy::None;
                else out.push_back("particles.policy: unknown policy '" + pol + "'");
            }
            r.unknown_keys(p, "particles.",
                           {"seeding", "per_axis", "x", "n", "margin", "dt", "cfl", "frames", "substeps", "policy",
                            "inflow", "region"});
        }
        if (j.contains("samplers")) {
            const json& s = j.at("samplers");
            if (!s.is_array()) out.push_back("samplers: expected array");
            else
                for (std::size_t n = 0; n < s.size(); ++n) {
                    c.samplers.emplace_back();
                    parse_sampler(r, s[n], "samplers[" + std::to_string(n) + "]", c.samplers.back());
                }
        }
        if (j.contains("outputs")) {
            const json& o = j.at("outputs");
            r.get(o, "dump_every", "outputs.", c.dump_every);
            r.get(o, "divergence", "outputs.", c.report_divergence);
            r.get(o, "divergence_samples", "outputs.", c.divergence_samples);
            r.get(o, "uniformity", "outputs.", c.report_uniformity);
            r.get(o, "uniformity_every", "outputs.", c.uniformity_every);
            r.get(o, "uniformity_refine", "outputs.", c.uniformity_refine);
            r.get(o, "flux", "outputs.", c.report_flux);
            r.get(o, "tangential", "outputs.", c.report_tangential);
            if (o.is_object() && o.contains("uniformity_region")) {
                const json& u = o.at("uniformity_region");
                r.get(u, "lo", "outputs.uniformity_region.", c.uniformity_lo);
                r.get(u, "hi", "outputs.uniformity_region.", c.uniformity_hi);
                r.unknown_keys(u, "outputs.uniformity_region.", {"lo", "hi"});
            }
            r.unknown_keys(o, "outputs.",
                           {"dump_every", "divergence", "divergence_samples", "uniformity",
                            "uniformity_every", "uniformity_refine", "uniformity_region", "flux",
                            "tangential"});
        }
        r.unknown_keys(j, "", {"name", "dimension", "seed", "grid", "walls", "solids", "velocity",
                               "dynamics", "particles", "samplers", "outputs"});
    }
    if (c.dimension == 2) c.nz = 1;
    check_config(c, out);
    if (!violations && !out.empty()) {
        std::string msg = "invalid config:";
        for (const auto& v : out) msg += "\n  " + v;
        throw ConfigError(msg);
    }
    return c;
}

ScenarioConfig load_config(const std::string& path, std::vector<std::string>* violations) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), violations, fs::path(path).parent_path().string());
}

std::vector<std::string> validate_config_file(const std::string& path) {
    std::vector<std::string> v;
    load_config(path, &v);
    return v;
}

// ---- running --------------------------------------------------------------

int apply_thread_limit() {
    const char* env = std::getenv("CURLFLOW_THREADS");
    if (!env || !*env) return 0;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1) throw ConfigError(std::string("CURLFLOW_THREADS must be a positive integer, got '") + env + "'");
    omp_set_num_threads(static_cast<int>(n));
    return static_cast<int>(n);
}

const SamplerOutcome& RunResult::outcome(const std::string& label) const {
    for (const auto& s : samplers)
        if (s.label == label) return s;
    throw ConfigError("no sampler labelled '" + label + "' in run '" + name + "'");
}

namespace {

Vec2 vec2_of(const std::vector<double>& v) { return v.size() >= 2 ? Vec2{v[0], v[1]} : Vec2{}; }
Vec3 vec3_of(const std::vector<double>& v) {
    return v.size() >= 3 ? Vec3{v[0], v[1], v[2]} : Vec3{};
}

std::shared_ptr<const SolidField2> build_solids(const ScenarioConfig& c, const GridDesc2& g) {
    if (c.solids.empty()) return nullptr;
    auto u = std::make_shared<Union2>();
    for (const auto& s : c.solids) {
        if (s.type == "circle") u->add(std::make_shared<Circle>(vec2_of(s.center), s.radius));
        else if (s.type == "rect") u->add(std::make_shared<Rect>(vec2_of(s.lo), vec2_of(s.hi)));
        else if (s.type == "polyline") u->add(std::make_shared<Polyline>(s.points, s.thickness));
        else if (s.type == "levelset") {
            LevelSet2 ls{nodal2_from_dump(load_dump(resolve(c, s.file)))};
            if (!(ls.phi.desc == g)) throw DimensionError("level set '" + s.file + "' does not match the grid");
            u->add(std::make_shared<GridSolid2>(std::move(ls)));
        }
    }
    return u;
}

std::shared_ptr<const SolidField3> build_solids(const ScenarioConfig& c, const GridDesc3& g) {
    if (c.solids.empty()) return nullptr;
    auto u = std::make_shared<Union3>();
    for (const auto& s : c.solids) {
        if (s.type == "sphere") u->add(std::make_shared<Sphere>(vec3_of(s.center), s.radius));
        else if (s.type == "cuboid") u->add(std::make_shared<Cuboid>(vec3_of(s.lo), vec3_of(s.hi)));
        else if (s.type == "halfspace") u->add(std::make_shared<HalfSpace3>(vec3_of(s.normal), s.offset));
        else if (s.type == "levelset") {
            LevelSet3 ls{nodal3_from_dump(load_dump(resolve(c, s.file)))};
            if (!(ls.phi.desc == g)) throw DimensionError("level set '" + s.file + "' does not match the grid");
            u->add(std::make_shared<GridSolid3>(std::move(ls)));
        }
    }
    return u;
}

template <class Mac, class Weights>
Mac initial_field(const ScenarioConfig& c, const typename std::remove_cvref_t<decltype(Mac{}.desc)>& g,
                  const Weights& w) {
    if (c.velocity_source == "random")
        return random_divergence_free(g, c.bc, c.seed, c.projection_tol, &w, c.velocity_amplitude);
    if (c.velocity_source == "dump") {
        Dump d = load_dump(resolve(c, c.velocity_file));
        Mac f;
        if constexpr (std::is_same_v<Mac, MacField2>) f = mac2_from_dump(d);
        else f = mac3_from_dump(d);
        if (!(f.desc == g)) throw DimensionError("velocity dump does not match the grid");
        return f;
    }
    Mac f(g);
    f.u.fill(c.velocity_value[0]);
    f.v.fill(c.velocity_value[1]);
    if constexpr (std::is_same_v<Mac, MacField3>) f.w.fill(c.velocity_value[2]);
    return pressure_project(f, w, c.bc, c.projection_tol);
}

bool force_active(const ForceSpec& f, int frame) {
    if (frame < f.start) return false;
    return (frame - f.start) % f.every < f.duration;
}

MacField2 simulate_step(const MacField2& u, double dt, const ScenarioConfig& c, int frame,
                        const FaceWeights2& w) {
    MacField2 a = semi_lagrangian_advect(u, dt);
    const auto& g = a.desc;
    for (const auto& f : c.forces) {
        if (!force_active(f, frame)) continue;
        const Box2 box{vec2_of(f.lo), vec2_of(f.hi)};
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i <= g.nx; ++i)
                if (box.contains(g.u_face(i, j))) a.u(i, j) += f.accel[0] * dt;
        for (int j = 0; j <= g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                if (box.contains(g.v_face(i, j))) a.v(i, j) += f.accel[1] * dt;
    }
    return pressure_project(a, w, c.bc, c.projection_tol);
}

MacField3 simulate_step(const MacField3& u, double dt, const ScenarioConfig& c, int frame,
                        const FaceWeights3& w) {
    MacField3 a = semi_lagrangian_advect(u, dt);
    const auto& g = a.desc;
    for (const auto& f : c.forces) {
        if (!force_active(f, frame)) continue;
        const Box3 box{vec3_of(f.lo), vec3_of(f.hi)};
        for (int k = 0; k <= g.nz; ++k)
            for (int j = 0; j <= g.ny; ++j)
                for (int i = 0; i <= g.nx; ++i) {
                    if (j < g.ny && k < g.nz && box.contains(g.u_face(i, j, k))) a.u(i, j, k) += f.accel[0] * dt;
                    if (i < g.nx && k < g.nz && box.contains(g.v_face(i, j, k))) a.v(i, j, k) += f.accel[1] * dt;
                    if (i < g.nx && j < g.ny && box.contains(g.w_face(i, j, k))) a.w(i, j, k) += f.accel[2] * dt;
                }
    }
    return pressure_project(a, w, c.bc, c.projection_tol);
}

DirectScheme direct_scheme(const std::string& s) {
    return s == "direct_linear" ? DirectScheme::Linear : DirectScheme::MonotoneCubic;
}

/// Per-run output sink; every method is a no-op without a directory.
class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir) {
        if (dir_.empty()) return;
        for (const char* sub : {"fields", "particles", "reports"}) fs::create_directories(fs::path(dir_) / sub);
    }
    bool enabled() const { return !dir_.empty(); }
    std::string path(const std::string& rel) const { return (fs::path(dir_) / rel).string(); }
    std::ofstream open(const std::string& rel) const {
        std::ofstream os(path(rel));
        if (!os) throw Error("cannot write '" + path(rel) + "'");
        return os;
    }

private:
    std::string dir_;
};

std::string frame_tag(int frame) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d", frame);
    return buf;
}

struct Reports {
    std::ofstream uniformity, leakage, divergence, flux, tangential;
};

Reports open_reports(const Output& out) {
    Reports r;
    if (!out.enabled()) return r;
    r.uniformity = out.open("reports/uniformity.csv");
    r.uniformity << "sampler,frame,particles,mean_density,density_cov,empty_fraction,analysis_cells\n";
    r.leakage = out.open("reports/leakage.csv");
    r.leakage << "sampler,frame,penetrations,frozen_total\n";
    r.divergence = out.open("reports/divergence.csv");
    r.divergence << "sampler,samples,eps,max_speed,max,mean,rms,seed\n";
    r.flux = out.open("reports/flux.csv");
    r.flux << "sampler,surface,samples,max,mean,worst\n";
    r.tangential = out.open("reports/tangential.csv");
    r.tangential << "sampler,surface,samples,max,mean,worst\n";
    return r;
}

std::string point_string(const std::vector<double>& p) {
    std::string s;
    for (double v : p) s += (s.empty() ? "" : " ") + format_double(v);
    return s;
}

void record_divergence(Reports& rep, const Output& out, SamplerOutcome& o, const DivergenceReport& d) {
    o.divergence = d;
    if (!out.enabled()) return;
    rep.divergence << o.label << ',' << d.samples << ',' << format_double(d.eps) << ','
                   << format_double(d.max_speed) << ',' << format_double(d.max) << ','
                   << format_double(d.mean) << ',' << format_double(d.rms) << ',' << d.seed << '\n';
    auto os = out.open("reports/divergence_hist_" + o.label + ".csv");
    write_histogram_csv(os, d);
}

void record_flux(Reports& rep, const Output& out, SamplerOutcome& o, const std::string& surface,
                 const FluxScan& f) {
    o.flux.emplace_back(surface, f);
    if (!out.enabled()) return;
    rep.flux << o.label << ',' << surface << ',' << f.samples << ',' << format_double(f.max) << ','
             << format_double(f.mean) << ',' << point_string(f.worst_point) << '\n';
}

void record_tangential(Reports& rep, const Output& out, SamplerOutcome& o, const std::string& surface,
                       const FluxScan& f) {
    o.tangential.emplace_back(surface, f);
    if (!out.enabled()) return;
    rep.tangential << o.label << ',' << surface << ',' << f.samples << ',' << format_double(f.max) << ','
                   << format_double(f.mean) << ',' << point_string(f.worst_point) << '\n';
}

void record_uniformity(Reports& rep, const Output& out, SamplerOutcome& o, int frame,
                       const UniformityReport& u) {
    o.uniformity.emplace_back(frame, u);
    if (!out.enabled()) return;
    rep.uniformity << o.label << ',' << frame << ',' << u.particles << ','
                   << format_double(u.mean_density) << ',' << format_double(u.density_cov) << ','
                   << format_double(u.empty_fraction) << ',' << u.analysis_cells << '\n';
}

std::vector<std::pair<std::string, std::string>> build_summary(const ScenarioConfig& c,
                                                               const RunResult& r) {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"scenario", c.name}, {"dimension", std::to_string(c.dimension)},
        {"seed", std::to_string(r.seed)}, {"frames", std::to_string(r.frames)},
        {"dt", format_double(r.dt)}};
    for (const auto& o : r.samplers) {
        if (o.divergence) {
            auto f = summary_fields(o.label, *o.divergence);
            kv.insert(kv.end(), f.begin(), f.end());
        }
        if (!o.uniformity.empty()) {
            const auto& [frame, u] = o.uniformity.back();
            kv.emplace_back(o.label + ".uniformity_frame", std::to_string(frame));
            auto f = summary_fields(o.label, u);
            kv.insert(kv.end(), f.begin(), f.end());
        }
        kv.emplace_back(o.label + ".penetrations", std::to_string(o.penetrations));
        kv.emplace_back(o.label + ".frozen", std::to_string(o.frozen));
        double flux = 0.0;
        for (const auto& [name, f] : o.flux) flux = std::max(flux, f.max);
        if (!o.flux.empty()) kv.emplace_back(o.label + ".flux_max", format_double(flux));
        if (!o.tangential.empty()) {
            double mx = 0.0, mean = 0.0;
            std::size_t n = 0;
            for (const auto& [name, f] : o.tangential) {
                mx = std::max(mx, f.max);
                mean += f.mean * f.samples;
                n += f.samples;
            }
            kv.emplace_back(o.label + ".tangent_err_max", format_double(mx));
            kv.emplace_back(o.label + ".tangent_err_mean", format_double(n ? mean / n : 0.0));
        }
        if (o.ramp_degenerate) kv.emplace_back(o.label + ".ramp_degenerate", std::to_string(o.ramp_degenerate));
    }
    return kv;
}

bool dump_frame(const ScenarioConfig& c, int frame) {
    if (frame == 0 || frame == c.frames) return true;
    return c.dump_every > 0 && frame % c.dump_every == 0;
}

bool uniformity_frame(const ScenarioConfig& c, int frame) {
    return frame == 0 || frame == c.frames || frame % c.uniformity_every == 0;
}

template <class Mac>
double max_face_speed(const Mac& f) {
    return f.max_abs();
}

template <class V>
ParticleSet<V> keep_seed_region(ParticleSet<V> ps, const ScenarioConfig& c) {
    if (c.seed_lo.empty()) return ps;
    constexpr int dim = sizeof(V) / sizeof(double);
    ParticleSet<V> out;
    for (const V& x : ps.pos) {
        bool in = true;
        for (int a = 0; a < dim; ++a) in = in && x[a] >= c.seed_lo[a] && x[a] <= c.seed_hi[a];
        if (in) out.add(x);
    }
    return out;
}

template <class V, class Desc, class Solid>
UniformityReport region_uniformity(const ParticleSet<V>& ps, const Desc& g, const ScenarioConfig& c,
                                   const Solid* solid) {
    if (c.uniformity_lo.empty()) return uniformity(ps, g, c.uniformity_refine, solid);
    constexpr int dim = sizeof(V) / sizeof(double);
    Desc sub = g;
    int* n[3] = {&sub.nx, &sub.ny, nullptr};
    if constexpr (dim == 3) n[2] = &sub.nz;
    for (int a = 0; a < dim; ++a) {
        const int i0 = static_cast<int>(std::floor((c.uniformity_lo[a] - g.origin[a]) / g.h + 1e-9));
        const int i1 = static_cast<int>(std::ceil((c.uniformity_hi[a] - g.origin[a]) / g.h - 1e-9));
        sub.origin[a] = g.origin[a] + i0 * g.h;
        *n[a] = std::max(i1 - i0, 1);
    }
    const auto box = sub.bounds();
    ParticleSet<V> inside;
    for (std::size_t p = 0; p < ps.size(); ++p)
        if (ps.status[p] == ParticleStatus::Active && box.contains(ps.pos[p])) inside.add(ps.pos[p]);
    return uniformity(inside, sub, c.uniformity_refine, solid);
}

// ---- 2D -------------------------------------------------------------------

RunResult run_2d(const ScenarioConfig& c, const Output& out) {
    GridDesc2 g{c.nx, c.ny, c.h, vec2_of(c.origin)};
    g.validate();
    auto solid = build_solids(c, g);
    const CutCells2 geom = solid ? build_cut_cells(LevelSet2::from_solid(g, *solid)) : all_fluid_cells(g);
    MacField2 u = initial_field<MacField2>(c, g, geom.faces);

    RunResult res;
    res.name = c.name;
    res.seed = c.seed;
    res.frames = c.frames;
    const double speed = max_face_speed(u);
    res.dt = c.dt > 0.0 ? c.dt : (speed > 0.0 ? c.cfl * c.h / speed : c.h);
    const double sim_dt = c.sim_dt > 0.0 ? c.sim_dt : res.dt;

    const std::size_t ns = c.samplers.size();
    res.samplers.resize(ns);
    std::vector<ParticleSet2> ps(ns);
    std::vector<RampCounters> counters(ns);
    const ParticleSet2 seeded = keep_seed_region(seed_particles(g, c.per_axis, c.seed, solid.get()), c);
    for (std::size_t s = 0; s < ns; ++s) {
        res.samplers[s].label = c.samplers[s].label;
        ps[s] = seeded;
        res.samplers[s].particles = seeded.size();
    }
    Reports rep = open_reports(out);
    std::vector<std::ofstream> pcsv;
    if (out.enabled())
        for (std::size_t s = 0; s < ns; ++s) pcsv.push_back(out.open("particles/" + c.samplers[s].label + ".csv"));

    const bool any_curl = std::any_of(c.samplers.begin(), c.samplers.end(),
                                      [](const SamplerSpec& s) { return s.scheme == "curlflow"; });
    std::vector<std::shared_ptr<const VelocitySampler2>> samplers(ns);
    std::shared_ptr<const StreamField2> sf;
    auto build = [&](const MacField2& f) {
        sf.reset();
        if (any_curl)
            sf = std::make_shared<StreamField2>(solid ? sweep_stream_function_cut(f, geom)
                                                      : sweep_stream_function(f));
        for (std::size_t s = 0; s < ns; ++s) {
            const auto& spec = c.samplers[s];
            if (spec.scheme == "curlflow") {
                auto cs = std::make_shared<CurlFlowSampler2>(sf, spec.kernel);
                if (spec.ramp) cs->enable_ramp(ramp_boundaries_2d(*sf, c.bc, solid), spec.ramp_params, &counters[s]);
                samplers[s] = cs;
            } else {
                samplers[s] = std::make_shared<DirectSampler2>(f, direct_scheme(spec.scheme),
                                                               solid ? &geom : nullptr);
            }
        }
    };

    auto dump_state = [&](int frame, const MacField2& f) {
        if (!out.enabled() || !dump_frame(c, frame)) return;
        save_dump(out.path("fields/velocity_" + frame_tag(frame) + ".dump"), to_dump(f));
        if (sf) save_dump(out.path("fields/psi_" + frame_tag(frame) + ".dump"), to_dump(*sf));
        for (std::size_t s = 0; s < ns; ++s) write_particles_csv(pcsv[s], frame, ps[s], frame == 0);
    };

    build(u);
    for (std::size_t s = 0; s < ns; ++s) {
        auto& o = res.samplers[s];
        if (c.report_divergence)
            record_divergence(rep, out, o, sample_divergence(*samplers[s], c.h, c.divergence_samples, c.seed, solid.get()));
        if (c.report_flux) {
            for (int w = 0; w < 4; ++w)
                if (c.bc.walls[w].kind == WallKind::Closed)
                    record_flux(rep, out, o, wall_name(w), wall_flux_scan(*samplers[s], w, 2000, c.seed + w));
            if (solid)
                record_flux(rep, out, o, "solids", solid_flux_scan(*samplers[s], *solid, g.bounds(), 2000, c.seed));
        }
        const auto& spec = c.samplers[s];
        if (c.report_tangential && spec.scheme == "curlflow" && spec.ramp) {
            const CurlFlowSampler2 ref(sf, spec.kernel);
            for (int w = 0; w < 4; ++w)
                if (c.bc.walls[w].kind == WallKind::Closed)
                    record_tangential(rep, out, o, wall_name(w),
                                      wall_tangential_error(*samplers[s], ref, w, 2000, c.seed + w));
            if (solid)
                record_tangential(rep, out, o, "solids",
                                  solid_tangential_error(*samplers[s], ref, *solid, g.bounds(), 2000, c.seed));
        }
        if (c.report_uniformity)
            record_uniformity(rep, out, o, 0, region_uniformity(ps[s], g, c, solid.get()));
    }
    dump_state(0, u);

    std::vector<InflowEmitter2> emitters;
    if (c.inflow)
        for (std::size_t s = 0; s < ns; ++s) emitters.emplace_back(g, c.per_axis, c.bc.walls[0].speed, c.seed + 1);
    for (int frame = 1; frame <= c.frames; ++frame) {
        if (c.simulate) {
            u = simulate_step(u, sim_dt, c, frame, geom.faces);
            build(u);
        }
        for (std::size_t s = 0; s < ns; ++s) {
            auto& o = res.samplers[s];
            if (c.inflow) emitters[s].emit(ps[s], res.dt, frame, solid.get());
            long long pen = 0;
            for (int sub = 0; sub < c.substeps; ++sub)
                pen += advect_particles(ps[s], *samplers[s], solid.get(), res.dt / c.substeps, c.policy)
                           .penetrations;
            o.penetrations += pen;
            if (out.enabled() && pen > 0)
                rep.leakage << o.label << ',' << frame << ',' << pen << ','
                            << ps[s].count(ParticleStatus::Frozen) << '\n';
            if (c.report_uniformity && uniformity_frame(c, frame))
                record_uniformity(rep, out, o, frame, region_uniformity(ps[s], g, c, solid.get()));
        }
        dump_state(frame, u);
    }
    for (std::size_t s = 0; s < ns; ++s) {
        res.samplers[s].frozen = ps[s].count(ParticleStatus::Frozen);
        res.samplers[s].particles = ps[s].size();
        res.samplers[s].ramp_degenerate = counters[s].degenerate;
    }
    return res;
}

// ---- 3D -------------------------------------------------------------------

std::shared_ptr<const RbfModel> fit_rbf(const SamplerSpec& spec, const VelocitySampler3& base,
                                        const GridDesc3& g, const SolidField3& solid) {
    RbfParams p;
    p.sigma = spec.rbf_sigma_over_h * g.h;
    p.cutoff = spec.rbf_cutoff_over_sigma * p.sigma;
    p.nu = spec.rbf_nu;
    p.validate();
    const auto centers = surface_vertices(LevelSet3::from_solid(g, solid), solid, 0.25 * g.h);
    std::vector<Vec3> targets(centers.size());
    for (std::size_t n = 0; n < centers.size(); ++n) {
        const auto ds = solid.sample(centers[n]);
        const double gn = norm(ds.grad);
        const Vec3 nrm = gn > 0.0 ? ds.grad * (1.0 / gn) : Vec3{};
        targets[n] = nrm * -dot(base.velocity(centers[n]), nrm);
    }
    return std::make_shared<RbfModel>(fit(centers, targets, p));
}

RunResult run_3d(const ScenarioConfig& c, const Output& out) {
    GridDesc3 g{c.nx, c.ny, c.nz, c.h, vec3_of(c.origin)};
    g.validate();
    auto solid = build_solids(c, g);
    const CutCells3 geom = solid ? build_cut_cells(LevelSet3::from_solid(g, *solid)) : all_fluid_cells(g);
    MacField3 u = initial_field<MacField3>(c, g, geom.faces);

    RunResult res;
    res.name = c.name;
    res.seed = c.seed;
    res.frames = c.frames;
    const double speed = max_face_speed(u);
    res.dt = c.dt > 0.0 ? c.dt : (speed > 0.0 ? c.cfl * c.h / speed : c.h);
    const double sim_dt = c.sim_dt > 0.0 ? c.sim_dt : res.dt;

    const std::size_t ns = c.samplers.size();
    res.samplers.resize(ns);
    std::vector<ParticleSet3> ps(ns);
    std::vector<RampCounters> counters(ns);
    const ParticleSet3 seeded =
        c.seeding == "plane_x" ? seed_plane_x(g.bounds(), c.plane_x, c.plane_n, c.plane_margin, c.seed, solid.get())
                               : keep_seed_region(seed_particles(g, c.per_axis, c.seed, solid.get()), c);
    for (std::size_t s = 0; s < ns; ++s) {
        res.samplers[s].label = c.samplers[s].label;
        ps[s] = seeded;
        res.samplers[s].particles = seeded.size();
    }
    Reports rep = open_reports(out);
    std::vector<std::ofstream> pcsv;
    if (out.enabled())
        for (std::size_t s = 0; s < ns; ++s) pcsv.push_back(out.open("particles/" + c.samplers[s].label + ".csv"));

    const bool any_curl = std::any_of(c.samplers.begin(), c.samplers.end(),
                                      [](const SamplerSpec& s) { return s.scheme == "curlflow"; });
    std::vector<std::shared_ptr<const VelocitySampler3>> samplers(ns);
    std::shared_ptr<const PotentialInterpolant3> interp;
    EdgeField3 psi_edges;
    auto build = [&](const MacField3& f) {
        interp.reset();
        if (any_curl) {
            VectorPotentialField3 vp;
            if (solid) {
                vp = gauge_correct_cut(sweep_3d_cut(f, geom, c.bc), geom, 1e-10);
            } else {
                vp = parallel_sweep_3d(f, c.bc);
                vp = gauge_correct(vp, build_phi_bc(vp), 1e-10);
            }
            psi_edges = vp.edges;
            interp = std::make_shared<PotentialInterpolant3>(vp.edges);
        }
        for (std::size_t s = 0; s < ns; ++s) {
            const auto& spec = c.samplers[s];
            if (spec.scheme != "curlflow") {
                samplers[s] = std::make_shared<DirectSampler3>(f, direct_scheme(spec.scheme),
                                                               solid ? &geom : nullptr);
                continue;
            }
            auto cs = std::make_shared<CurlFlowSampler3>(interp, spec.kernel);
            if (spec.ramp) cs->enable_wall_ramp({0, 1, 2, 3, 4, 5}, spec.ramp_params);
            std::shared_ptr<const VelocitySampler3> sm = cs;
            if (spec.rbf && solid) sm = std::make_shared<RbfAugmentedSampler3>(sm, fit_rbf(spec, *sm, g, *solid));
            if (spec.velocity_ramp && solid)
                sm = std::make_shared<VelocityRampSampler3>(sm, solid, spec.velocity_ramp_params, Vec3{},
                                                            &counters[s]);
            samplers[s] = sm;
        }
    };

    auto dump_state = [&](int frame, const MacField3& f) {
        if (!out.enabled() || !dump_frame(c, frame)) return;
        save_dump(out.path("fields/velocity_" + frame_tag(frame) + ".dump"), to_dump(f));
        if (interp) save_dump(out.path("fields/psi_" + frame_tag(frame) + ".dump"), to_dump(psi_edges));
        for (std::size_t s = 0; s < ns; ++s) write_particles_csv(pcsv[s], frame, ps[s], frame == 0);
    };

    build(u);
    for (std::size_t s = 0; s < ns; ++s) {
        auto& o = res.samplers[s];
        if (c.report_divergence)
            record_divergence(rep, out, o, sample_divergence(*samplers[s], c.h, c.divergence_samples, c.seed, solid.get()));
        if (c.report_flux) {
            for (int w = 0; w < 6; ++w)
                if (c.bc.walls[w].kind == WallKind::Closed)
                    record_flux(rep, out, o, wall_name(w), wall_flux_scan(*samplers[s], w, 2000, c.seed + w));
            if (solid)
                record_flux(rep, out, o, "solids", solid_flux_scan(*samplers[s], *solid, g.bounds(), 2000, c.seed));
        }
        if (c.report_uniformity)
            record_uniformity(rep, out, o, 0, region_uniformity(ps[s], g, c, solid.get()));
    }
    dump_state(0, u);

    for (int frame = 1; frame <= c.frames; ++frame) {
        if (c.simulate) {
            u = simulate_step(u, sim_dt, c, frame, geom.faces);
            build(u);
        }
        for (std::size_t s = 0; s < ns; ++s) {
            auto& o = res.samplers[s];
            long long pen = 0;
            for (int sub = 0; sub < c.substeps; ++sub)
                pen += advect_particles(ps[s], *samplers[s], solid.get(), res.dt / c.substeps, c.policy)
                           .penetrations;
            o.penetrations += pen;
            if (out.enabled() && pen > 0)
                rep.leakage << o.label << ',' << frame << ',' << pen << ','
                            << ps[s].count(ParticleStatus::Frozen) << '\n';
            if (c.report_uniformity && uniformity_frame(c, frame))
                record_uniformity(rep, out, o, frame, region_uniformity(ps[s], g, c, solid.get()));
        }
        dump_state(frame, u);
    }
    for (std::size_t s = 0; s < ns; ++s) {
        res.samplers[s].frozen = ps[s].count(ParticleStatus::Frozen);
        res.samplers[s].particles = ps[s].size();
        res.samplers[s].ramp_degenerate = counters[s].degenerate;
    }
    return res;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& c, const std::string& out_dir) {
    {
        std::vector<std::string> v;
        check_config(c, v);
        if (!v.empty()) {
            std::string msg = "scenario '" + c.name + "' is invalid:";
            for (const auto& s : v) msg += "\n  " + s;
            throw ConfigError(msg);
        }
    }
    const Output out(out_dir);
    RunResult r;
    try {
        r = c.dimension == 2 ? run_2d(c, out) : run_3d(c, out);
    } catch (const IntegrabilityError& e) {
        throw IntegrabilityError("scenario '" + c.name + "': " + e.what(), e.residual());
    } catch (const ConvergenceError& e) {
        throw ConvergenceError("scenario '" + c.name + "': " + e.what(), e.residual(), e.iterations());
    } catch (const DimensionError& e) {
        throw DimensionError("scenario '" + c.name + "': " + e.what());
    } catch (const DomainError& e) {
        throw DomainError("scenario '" + c.name + "': " + e.what());
    } catch (const ConfigError& e) {
        throw ConfigError("scenario '" + c.name + "': " + e.what());
    }
    r.summary = build_summary(c, r);
    if (out.enabled()) {
        auto os = out.open("summary.txt");
        os << summary_line(r.summary) << '\n';
    }
    return r;
}

std::vector<std::string> read_summary(const std::string& run_dir) {
    const auto path = fs::path(run_dir) / "summary.txt";
    std::ifstream in(path);
    if (!in) throw ConfigError("no summary.txt in '" + run_dir + "'");
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);)
        if (!line.empty()) lines.push_back(line);
    return lines;
}

}  // namespace curlflow
