#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "curlflow/error.hpp"
#include "curlflow/scenario.hpp"

int main(int argc, char** argv) {
    CLI::App app{"curlflow: divergence-free velocity interpolation scenarios"};
    app.require_subcommand(1);

    std::string config, out_dir = "out", run_dir;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "run a scenario and write fields, particles and reports");
    run->add_option("config", config, "scenario JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "override the config seed");

    auto* validate = app.add_subcommand("validate", "list config problems without running");
    validate->add_option("config", config, "scenario JSON file")->required();

    auto* report = app.add_subcommand("report", "print the summary lines of a finished run");
    report->add_option("run_dir", run_dir, "directory given to run --out")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        curlflow::apply_thread_limit();
        if (*run) {
            auto cfg = curlflow::load_config(config);
            if (seed) cfg.seed = *seed;
            const auto result = curlflow::run_scenario(cfg, out_dir);
            std::cout << curlflow::summary_line(result.summary) << '\n';
            return 0;
        }
        if (*validate) {
            const auto problems = curlflow::validate_config_file(config);
            for (const auto& p : problems) std::cout << p << '\n';
            if (problems.empty()) std::cout << "ok\n";
            return problems.empty() ? 0 : 1;
        }
        for (const auto& line : curlflow::read_summary(run_dir)) std::cout << line << '\n';
        return 0;
    } catch (const curlflow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const curlflow::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
