#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "dwell/domain.hpp"
#include "dwell/quadrature.hpp"
#include "dwell/timedomain.hpp"

// Scenario and sweep files: `key = value` lines grouped under `[section]`
// headers, `#` starts a comment. Unknown sections or keys are errors.
// See README.md for the schema.

namespace dwell::cli {

enum class Engine { spectral, timedomain, both };

struct Scenario {
    PulseSpec pulse = make_gaussian_pulse(1.0);
    MediumProfile medium = make_uniform_medium(0.0, 1.0);
    Engine engine = Engine::spectral;
    QuadratureOptions quadrature;
    timedomain::GridOptions grid;
    double epsilon = 1.0;
    std::string output = "-";      // "-" writes to stdout
    std::string trace_output;      // time-domain weak trace and norm, optional
    std::string history_output;    // time-domain field slices, optional
    std::size_t history_stride = 10;
};

enum class Axis { od0, od_eff, detuning, sigma };

struct SweepSpec {
    Axis axis = Axis::od0;
    double from = 0.0;
    double to = 1.0;
    std::size_t count = 2;
    bool log_spacing = false;
    Scenario base;
};

const char* to_string(Axis a);
const char* to_string(Engine e);

// section -> key -> value
using ConfigTable = std::map<std::string, std::map<std::string, std::string>>;

// Throws ConfigError on malformed lines or repeated keys.
ConfigTable parse_config(const std::string& text);

// Relative data-file paths resolve against `base_dir`. Syntax, schema and number
// errors throw ConfigError; physically invalid values throw InvalidParameter.
Scenario scenario_from_table(const ConfigTable& table, const std::string& base_dir = ".", bool allow_sweep = false);
SweepSpec sweep_from_table(const ConfigTable& table, const std::string& base_dir = ".");

Scenario load_scenario(const std::string& path);
SweepSpec load_sweep(const std::string& path);

}  // namespace dwell::cli
