#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

// Datasets behind the published figures, in units gamma = 1.

namespace dwell::cli {

struct Dataset {
    std::vector<std::string> provenance;  // written as '#' comment lines
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

const std::vector<std::string>& figure_names();

// Throws InvalidParameter for an unknown name.
Dataset make_figure(const std::string& name);

void write_dataset(std::ostream& out, const Dataset& d);

// Narrow-band pulses are tagged with sigma = inf in the datasets.
inline constexpr double narrowband_sigma = std::numeric_limits<double>::infinity();

}  // namespace dwell::cli
