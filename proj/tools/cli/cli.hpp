#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "wfmgf/multi_index.hpp"

namespace wfmgf::cli {

/// Exit codes besides CLI11's own parse-error codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitComparisonFailed = 2;

/// Runs the tool on argv-style arguments (without the program name).
/// Tables go to --out, or to `out` when --out is absent or "-".
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "0.5", "1e-3" or "start:stop:step" (stop included when on the grid).
std::vector<double> parse_times(const std::vector<std::string>& tokens);
std::vector<int> parse_generations(const std::vector<std::string>& tokens);

/// "3" for one component, "1/0/2" (or "(1,0,2)") for several.
MultiIndex parse_multi_index(std::string_view text, int dimension);
std::string format_multi_index(const MultiIndex& alpha);

}  // namespace wfmgf::cli
