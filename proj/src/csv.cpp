#include "dwell/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace dwell::cli {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

void CsvWriter::comment(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out_ << "# " << line << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_number(v));
    row(cells);
}

std::vector<std::string> report_header() {
    return {"method", "P_T", "P_S", "tau_0", "tau_T", "tau_S", "t_g", "t_W", "t_S", "od_eff"};
}

std::vector<std::string> report_cells(const DelayReport& r) {
    auto opt = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    return {to_string(r.method), format_number(r.p_t),   format_number(r.p_s), format_number(r.tau_0),
            format_number(r.tau_T), format_number(r.tau_S), opt(r.t_g),          opt(r.t_W),
            opt(r.t_S),             format_number(r.od_eff)};
}

std::vector<Eigen::ArrayXd> read_columns(const std::string& path, std::size_t columns) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open data file '" + path + "'");
    std::vector<std::vector<double>> cols(columns);
    std::string line;
    bool header_allowed = true;
    for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> vals;
        bool numeric = true;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || cell.find_first_not_of(" \t\r", std::size_t(end - cell.c_str())) != std::string::npos)
                numeric = false;
            vals.push_back(v);
        }
        if (!numeric && header_allowed) {
            header_allowed = false;
            continue;
        }
        if (!numeric || vals.size() != columns)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                              " numeric columns");
        header_allowed = false;
        for (std::size_t c = 0; c < columns; ++c) cols[c].push_back(vals[c]);
    }
    std::vector<Eigen::ArrayXd> out;
    for (auto& c : cols) out.push_back(Eigen::Map<Eigen::ArrayXd>(c.data(), Eigen::Index(c.size())));
    return out;
}

}  // namespace dwell::cli
