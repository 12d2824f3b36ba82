#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <string>

#include "curlflow/error.hpp"
#include "curlflow/scenario.hpp"
#include "doctest.h"
#include "json.hpp"

#ifndef CURLFLOW_PRESET_DIR
#define CURLFLOW_PRESET_DIR "presets"
#endif

namespace fs = std::filesystem;
using namespace curlflow;
using nlohmann::json;

namespace {

json base_config() {
    return json::parse(R"({
      "name": "t", "dimension": 2, "seed": 2,
      "grid": {"nx": 6, "ny": 4, "h": 1.0},
      "walls": "closed",
      "velocity": {"source": "random"},
      "particles": {"per_axis": 2, "frames": 4},
      "samplers": ["direct_linear", {"scheme": "curlflow", "label": "cf", "ramp": true}],
      "outputs": {"divergence_samples": 500, "uniformity_every": 2}
    })");
}

std::vector<std::string> violations(const json& j) {
    std::vector<std::string> v;
    parse_config(j.dump(), &v);
    return v;
}

fs::path scratch(const std::string& tag) {
    return fs::temp_directory_path() / ("curlflow_" + tag + "_" + std::to_string(::getpid()));
}

}  // namespace

TEST_SUITE("scenarios_cli") {

TEST_CASE("a valid config has no violations") { CHECK(violations(base_config()).empty()); }

TEST_CASE("nx = 0 gives exactly one violation naming the field") {
    json j = base_config();
    j["grid"]["nx"] = 0;
    const auto v = violations(j);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("grid.nx") != std::string::npos);
    CHECK_THROWS_AS(parse_config(j.dump()), ConfigError);
}

TEST_CASE("unbalanced prescribed walls violate solvability") {
    json j = base_config();
    j["walls"] = {{"x-", {{"prescribed", 1.0}}}};
    const auto v = violations(j);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("walls") == 0);
    CHECK(v[0].find("inflow") != std::string::npos);
}

TEST_CASE("unknown keys and malformed json are reported") {
    json j = base_config();
    j["grid"]["nq"] = 3;
    const auto v = violations(j);
    REQUIRE(v.size() == 1);
    CHECK(v[0].find("grid.nq") != std::string::npos);
    std::vector<std::string> out;
    CHECK_THROWS_AS(parse_config("{ not json", &out), ConfigError);
}

TEST_CASE("several problems are all collected") {
    json j = base_config();
    j["grid"]["ny"] = -1;
    j["particles"]["substeps"] = 0;
    j["samplers"] = json::array({"direct_linear", "direct_linear"});
    CHECK(violations(j).size() == 3);
}

TEST_CASE("every shipped preset validates") {
    for (const auto& e : fs::directory_iterator(CURLFLOW_PRESET_DIR)) {
        if (e.path().extension() != ".json") continue;
        CAPTURE(e.path().string());
        CHECK(validate_config_file(e.path().string()).empty());
    }
}

TEST_CASE("net inflow integrates prescribed speeds over wall area") {
    DomainBc bc;
    bc.walls[0] = {WallKind::Prescribed, 2.0};
    bc.walls[1] = {WallKind::Prescribed, 1.0};
    GridDesc3 g{4, 3, 1, 0.5, {}};
    CHECK(net_prescribed_inflow(bc, g, 2) == doctest::Approx((2.0 - 1.0) * 1.5));
    CHECK(net_prescribed_inflow(DomainBc::wind_tunnel(3.0), g, 2) == doctest::Approx(0.0));
}

TEST_CASE("runs are deterministic and write the documented layout") {
    const ScenarioConfig c = parse_config(base_config().dump());
    const fs::path a = scratch("run_a"), b = scratch("run_b");
    const RunResult ra = run_scenario(c, a.string());
    const RunResult rb = run_scenario(c, b.string());
    CHECK(ra.summary == rb.summary);
    CHECK(fs::exists(a / "summary.txt"));
    CHECK(fs::exists(a / "reports"));
    CHECK(fs::exists(a / "particles"));
    CHECK(fs::exists(a / "fields"));
    const auto lines = read_summary(a.string());
    REQUIRE_FALSE(lines.empty());
    CHECK(lines[0].find("scenario=t") == 0);
    CHECK(ra.outcome("cf").divergence->max < 1e-6);
    CHECK(ra.outcome("direct_linear").divergence->max > 1e-3);
    CHECK_THROWS(ra.outcome("missing"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("random divergence-free fields respect the boundary") {
    GridDesc2 g{7, 5, 1.0, {}};
    const MacField2 f = random_divergence_free(g, DomainBc::wind_tunnel(0.5), 3, 1e-12);
    CHECK(discrete_divergence(f).max_abs() < 1e-11);
    for (int j = 0; j < g.ny; ++j) CHECK(f.u(0, j) == doctest::Approx(0.5));
}

}
