#include "dwell/config.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "dwell/csv.hpp"

namespace dwell::cli {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
    static const std::map<std::string, std::set<std::string>> s = {
        {"pulse", {"kind", "sigma", "detuning", "file", "normalize"}},
        {"medium", {"profile", "od0", "length", "gamma", "file"}},
        {"engine", {"method"}},
        {"grid",
         {"frequency_intervals", "max_frequency_intervals", "adaptive", "medium_cells", "samples_per_sigma", "refine",
          "max_steps"}},
        {"tolerance", {"quadrature", "tail", "truncation"}},
        {"probe", {"epsilon"}},
        {"output", {"path", "trace", "history", "history_stride"}},
        {"sweep", {"axis", "from", "to", "count", "spacing"}},
    };
    return s;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Typed lookups on one table; every accessor reports the key on failure.
class Reader {
public:
    Reader(const ConfigTable& t, std::string base) : t_(t), base_(std::move(base)) {}

    const std::string* raw(const std::string& sec, const std::string& key) const {
        auto s = t_.find(sec);
        if (s == t_.end()) return nullptr;
        auto k = s->second.find(key);
        return k == s->second.end() ? nullptr : &k->second;
    }
    bool has(const std::string& sec, const std::string& key) const { return raw(sec, key) != nullptr; }

    std::string text(const std::string& sec, const std::string& key, const std::string& def) const {
        auto v = raw(sec, key);
        return v ? *v : def;
    }
    std::string required(const std::string& sec, const std::string& key) const {
        auto v = raw(sec, key);
        if (!v) throw ConfigError("missing required key [" + sec + "] " + key);
        return *v;
    }
    double number(const std::string& sec, const std::string& key, double def) const {
        auto v = raw(sec, key);
        return v ? parse_number(sec, key, *v) : def;
    }
    double required_number(const std::string& sec, const std::string& key) const {
        return parse_number(sec, key, required(sec, key));
    }
    std::size_t count(const std::string& sec, const std::string& key, std::size_t def) const {
        auto v = raw(sec, key);
        if (!v) return def;
        const double x = parse_number(sec, key, *v);
        if (x < 0 || x != std::floor(x) || x > 1e15) throw ConfigError("[" + sec + "] " + key + " must be a non-negative integer");
        return std::size_t(x);
    }
    bool flag(const std::string& sec, const std::string& key, bool def) const {
        auto v = raw(sec, key);
        if (!v) return def;
        if (*v == "true" || *v == "yes" || *v == "1") return true;
        if (*v == "false" || *v == "no" || *v == "0") return false;
        throw ConfigError("[" + sec + "] " + key + " must be true or false");
    }
    std::string path(const std::string& sec, const std::string& key) const {
        const std::filesystem::path p(required(sec, key));
        return p.is_absolute() ? p.string() : (std::filesystem::path(base_) / p).string();
    }

private:
    static double parse_number(const std::string& sec, const std::string& key, const std::string& s) {
        char* end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
            throw ConfigError("[" + sec + "] " + key + ": '" + s + "' is not a finite number");
        return v;
    }

    const ConfigTable& t_;
    std::string base_;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string parent_dir(const std::string& path) {
    const auto p = std::filesystem::path(path).parent_path();
    return p.empty() ? "." : p.string();
}

}  // namespace

const char* to_string(Axis a) {
    switch (a) {
        case Axis::od0: return "od0";
        case Axis::od_eff: return "od_eff";
        case Axis::detuning: return "detuning";
        case Axis::sigma: return "sigma";
    }
    return "?";
}

const char* to_string(Engine e) {
    switch (e) {
        case Engine::spectral: return "spectral";
        case Engine::timedomain: return "timedomain";
        case Engine::both: return "both";
    }
    return "?";
}

ConfigTable parse_config(const std::string& text) {
    ConfigTable table;
    std::istringstream in(text);
    std::string line, section;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!schema().count(section)) throw ConfigError(where + "unknown section [" + section + "]");
            table[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
        if (section.empty()) throw ConfigError(where + "key outside any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!schema().at(section).count(key)) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
        if (value.empty()) throw ConfigError(where + "empty value for '" + key + "'");
        if (!table[section].emplace(key, value).second) throw ConfigError(where + "repeated key '" + key + "'");
    }
    return table;
}

Scenario scenario_from_table(const ConfigTable& table, const std::string& base_dir, bool allow_sweep) {
    if (!allow_sweep && table.count("sweep")) throw ConfigError("[sweep] is only valid for the sweep command");
    const Reader r(table, base_dir);
    Scenario s;

    const AtomParams atom(r.number("medium", "gamma", 1.0));
    const std::string profile = r.text("medium", "profile", "uniform");
    const double length = r.number("medium", "length", 1.0);
    if (profile == "uniform") {
        if (r.has("medium", "file")) throw ConfigError("[medium] file needs profile = tabulated");
        s.medium = make_uniform_medium(r.required_number("medium", "od0"), length, atom);
    } else if (profile == "tabulated") {
        if (r.has("medium", "od0") || r.has("medium", "length"))
            throw ConfigError("[medium] od0/length come from the file when profile = tabulated");
        auto cols = read_columns(r.path("medium", "file"), 2);
        s.medium = make_tabulated_medium(std::move(cols[0]), std::move(cols[1]), atom);
    } else {
        throw ConfigError("[medium] profile must be uniform or tabulated");
    }

    const std::string kind = r.required("pulse", "kind");
    const double detuning = r.number("pulse", "detuning", 0.0);
    if (kind == "gaussian") {
        s.pulse = make_gaussian_pulse(r.required_number("pulse", "sigma"), detuning);
    } else if (kind == "narrowband") {
        if (r.has("pulse", "sigma")) throw ConfigError("[pulse] sigma is meaningless for a narrow-band pulse");
        s.pulse = make_narrowband_pulse(detuning);
    } else if (kind == "tabulated") {
        if (r.has("pulse", "sigma") || r.has("pulse", "detuning"))
            throw ConfigError("[pulse] sigma/detuning come from the file for a tabulated pulse");
        auto cols = read_columns(r.path("pulse", "file"), 3);
        Eigen::ArrayXcd amp(cols[1].size());
        amp.real() = cols[1];
        amp.imag() = cols[2];
        s.pulse = make_tabulated_pulse(std::move(cols[0]), std::move(amp), r.flag("pulse", "normalize", true));
    } else {
        throw ConfigError("[pulse] kind must be gaussian, narrowband or tabulated");
    }
    if (kind != "tabulated" && (r.has("pulse", "file") || r.has("pulse", "normalize")))
        throw ConfigError("[pulse] file/normalize need kind = tabulated");

    const std::string method = r.text("engine", "method", "spectral");
    if (method == "spectral") s.engine = Engine::spectral;
    else if (method == "timedomain") s.engine = Engine::timedomain;
    else if (method == "both") s.engine = Engine::both;
    else throw ConfigError("[engine] method must be spectral, timedomain or both");

    s.quadrature.initial_intervals = r.count("grid", "frequency_intervals", s.quadrature.initial_intervals);
    s.quadrature.max_intervals = r.count("grid", "max_frequency_intervals", s.quadrature.max_intervals);
    s.quadrature.refine = r.flag("grid", "adaptive", true);
    s.quadrature.rel_tol = r.number("tolerance", "quadrature", s.quadrature.rel_tol);
    s.grid.min_medium_cells = r.count("grid", "medium_cells", s.grid.min_medium_cells);
    s.grid.samples_per_sigma = r.number("grid", "samples_per_sigma", s.grid.samples_per_sigma);
    s.grid.refine = r.number("grid", "refine", s.grid.refine);
    s.grid.max_steps = r.count("grid", "max_steps", s.grid.max_steps);
    s.grid.tail_tolerance = r.number("tolerance", "tail", s.grid.tail_tolerance);
    s.grid.truncation = r.number("tolerance", "truncation", s.grid.truncation);
    if (!(s.quadrature.rel_tol > 0.0) || !(s.grid.tail_tolerance > 0.0) || !(s.grid.truncation > 0.0))
        throw ConfigError("tolerances must be positive");
    s.epsilon = WeakProbeConfig(r.number("probe", "epsilon", 1.0)).epsilon;

    s.output = r.text("output", "path", "-");
    if (r.has("output", "trace")) s.trace_output = r.path("output", "trace");
    if (r.has("output", "history")) s.history_output = r.path("output", "history");
    s.history_stride = r.count("output", "history_stride", s.history_stride);
    if (s.history_stride == 0) throw ConfigError("[output] history_stride must be >= 1");
    if (s.output != "-") s.output = r.path("output", "path");
    if ((!s.trace_output.empty() || !s.history_output.empty()) && s.engine == Engine::spectral)
        throw ConfigError("[output] trace/history need the timedomain engine");
    return s;
}

SweepSpec sweep_from_table(const ConfigTable& table, const std::string& base_dir) {
    const Reader r(table, base_dir);
    SweepSpec sw;
    sw.base = scenario_from_table(table, base_dir, true);
    const std::string axis = r.required("sweep", "axis");
    if (axis == "od0") sw.axis = Axis::od0;
    else if (axis == "od_eff") sw.axis = Axis::od_eff;
    else if (axis == "detuning") sw.axis = Axis::detuning;
    else if (axis == "sigma") sw.axis = Axis::sigma;
    else throw ConfigError("[sweep] axis must be od0, od_eff, detuning or sigma");
    sw.from = r.required_number("sweep", "from");
    sw.to = r.required_number("sweep", "to");
    sw.count = r.count("sweep", "count", 0);
    const std::string spacing = r.text("sweep", "spacing", "linear");
    if (spacing != "linear" && spacing != "log") throw ConfigError("[sweep] spacing must be linear or log");
    sw.log_spacing = spacing == "log";
    if (!(sw.from < sw.to)) throw ConfigError("[sweep] needs from < to");
    if (sw.count < 2) throw ConfigError("[sweep] count must be >= 2");
    if (sw.log_spacing && !(sw.from > 0.0)) throw ConfigError("[sweep] log spacing needs from > 0");
    if (!sw.base.trace_output.empty() || !sw.base.history_output.empty())
        throw ConfigError("[output] trace/history are not available for sweeps");
    return sw;
}

Scenario load_scenario(const std::string& path) {
    return scenario_from_table(parse_config(read_file(path)), parent_dir(path));
}

SweepSpec load_sweep(const std::string& path) {
    return sweep_from_table(parse_config(read_file(path)), parent_dir(path));
}

}  // namespace dwell::cli
