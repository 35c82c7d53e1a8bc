#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dwell/app.hpp"
#include "dwell/validation.hpp"

int main(int argc, char** argv) {
    using namespace dwell::cli;
    CLI::App app{"Atomic excitation times of a single photon crossing a two-level medium"};
    app.require_subcommand(1);

    std::string config;
    auto* run = app.add_subcommand("run", "Evaluate one scenario and write its delay report as CSV");
    run->add_option("config", config, "Scenario file")->required();

    std::string figure, out;
    auto* fig = app.add_subcommand("figure", "Write a figure dataset as CSV");
    fig->add_option("name", figure, "fig2, fig3a, fig3b, fig4, figF1 or figG1")->required();
    fig->add_option("out", out, "Output path, - for stdout")->required();

    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep described by a config file");
    sweep->add_option("config", config, "Sweep file")->required();

    std::string profile = "fast";
    std::optional<std::size_t> intervals;
    auto* validate = app.add_subcommand("validate", "Run the self-checks; exit 0 iff all pass");
    validate->add_option("--profile", profile, "fast skips the brute-force oracle")
        ->check(CLI::IsMember({"fast", "full"}));
    validate->add_option("--frequency-intervals", intervals,
                         "Use a fixed frequency grid for the spectral checks instead of adaptive refinement")
        ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 24));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : config_error;
    }

    if (*run) return run_command(config, std::cerr);
    if (*fig) return figure_command(figure, out, std::cerr);
    if (*sweep) return sweep_command(config, std::cerr);
    return validate_command(profile, intervals, std::cout, std::cerr);
}
