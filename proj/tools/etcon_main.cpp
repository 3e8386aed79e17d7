#include "etcon/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Event-triggered multi-agent consensus experiment runner"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    std::string output_dir;
    bool quiet = false;
    app.add_option("--output-dir", output_dir, "Override the output directory from the config");
    app.add_flag("--quiet", quiet, "Suppress the summary table");

    std::string config;
    auto* run = app.add_subcommand("run", "Simulate one experiment or a parameter sweep");
    run->add_option("config", config, "Experiment config file")->required();

    std::string metrics;
    std::string bounds_config;
    auto* bounds = app.add_subcommand("bounds", "Compare a finished run against the theoretical bounds");
    bounds->add_option("metrics", metrics, "metrics.csv written by run")->required();
    bounds->add_option("config", bounds_config, "Experiment config used for the run")->required();

    std::string linear_config;
    auto* linear = app.add_subcommand("linear-et", "Single-plant event-triggered linear control");
    linear->add_option("config", linear_config, "Linear system config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : etcon::kExitValidation;
    }

    etcon::RunOptions opts;
    if (!output_dir.empty()) opts.output_dir = output_dir;
    opts.quiet = quiet;

    if (*run) return etcon::run_command(config, opts, std::cout, std::cerr);
    if (*bounds) return etcon::bounds_command(metrics, bounds_config, std::cout, std::cerr);
    return etcon::linear_et_command(linear_config, opts, std::cout, std::cerr);
}
