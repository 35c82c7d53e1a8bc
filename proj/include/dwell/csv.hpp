#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "dwell/domain.hpp"

namespace dwell::cli {

// 12 significant digits, "nan"/"inf" spelled out.
std::string format_number(double v);

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out) : out_(out) {}
    void comment(const std::string& text);  // one "# ..." line per input line
    void row(const std::vector<std::string>& cells);
    void row(const std::vector<double>& values);

private:
    std::ostream& out_;
};

std::vector<std::string> report_header();
// Narrow-band-only fields are left empty when absent.
std::vector<std::string> report_cells(const DelayReport& r);

// Numeric table with exactly `columns` comma-separated values per line.
// Blank lines, '#' comments and one non-numeric header line are skipped.
// Throws ConfigError on anything else.
std::vector<Eigen::ArrayXd> read_columns(const std::string& path, std::size_t columns);

}  // namespace dwell::cli
