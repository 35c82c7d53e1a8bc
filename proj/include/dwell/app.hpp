#pragma once

#include <exception>
#include <iosfwd>
#include <string>
#include <vector>

#include "dwell/config.hpp"

// Subcommand bodies shared by the executable and the tests.

namespace dwell::cli {

enum ExitCode : int { ok = 0, check_failed = 1, config_error = 2, numeric_error = 3, precondition_error = 4 };

// Maps a library exception to the process exit code.
int exit_code_for(const std::exception& e);

// One report per engine (spectral first). Writes the optional time-domain
// trace/history files named in the scenario.
std::vector<DelayReport> run_scenario(const Scenario& s);

void write_reports(std::ostream& out, const Scenario& s, const std::vector<DelayReport>& reports);

// Same medium with its coupling rescaled to the given resonant optical depth.
MediumProfile with_od0(const MediumProfile& m, double od0);

std::vector<double> sweep_values(const SweepSpec& sw);
// Scenario at one sweep coordinate.
Scenario sweep_point(const SweepSpec& sw, double value);

// Runs every point concurrently; rows are written in sweep order.
void run_sweep(std::ostream& out, const SweepSpec& sw);

// Entry points returning exit codes; diagnostics go to `err`.
int run_command(const std::string& config_path, std::ostream& err);
int sweep_command(const std::string& config_path, std::ostream& err);
int figure_command(const std::string& name, const std::string& out_path, std::ostream& err);

}  // namespace dwell::cli
