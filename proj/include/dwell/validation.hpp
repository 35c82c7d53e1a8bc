#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

// Self-checks behind `dwell validate` and the acceptance binary.

namespace dwell::cli {

enum class CheckStatus { pass, fail, skip };

struct CheckResult {
    std::string name;
    double measured;
    std::string bound;  // human-readable condition on `measured`
    CheckStatus status;
};

const char* to_string(CheckStatus s);

struct ValidationOptions {
    bool full = false;  // fast skips the brute-force oracle
    // Fixed frequency grid for the spectral checks instead of adaptive refinement.
    std::optional<std::size_t> frequency_intervals;
};

inline constexpr int criterion_count = 11;

// Checks for one acceptance criterion, 1..criterion_count.
std::vector<CheckResult> criterion(int n, const ValidationOptions& opt = {});
// Module-level invariants not covered by the criteria.
std::vector<CheckResult> invariants(const ValidationOptions& opt = {});

// "name,measured,bound,status" per line.
void write_checks(std::ostream& out, const std::vector<CheckResult>& checks);
bool all_passed(const std::vector<CheckResult>& checks);

// Runs everything; exit 0 iff nothing failed. Failing check names go to `err`.
int validate_command(const std::string& profile, std::optional<std::size_t> frequency_intervals, std::ostream& out,
                     std::ostream& err);

}  // namespace dwell::cli
