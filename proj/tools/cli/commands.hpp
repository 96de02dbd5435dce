#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scenario.hpp"

namespace lvlab::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunOptions {
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  bool timestamp = true;
};

struct RunResult {
  int exit_code = 0;  // 0 success, 2 undecided verdict, 1 error
  std::string verdict;
  Json report;
  std::filesystem::path report_path;
};

/// Executes one scenario, writes <out>/<experiment>_report.json plus CSV
/// series, and prints a one-line verdict to `log`.
RunResult run_scenario(const Scenario& s, const RunOptions& opts, std::ostream& log);

/// Loads `config_path` (may be empty for pure defaults), applies overrides
/// in order, runs it. Errors are printed to `err` and give exit code 1.
int run(const std::string& config_path, const std::vector<std::string>& overrides,
        const RunOptions& opts, std::ostream& log, std::ostream& err);

/// Sampled field as CSV "x,<column>" with 17 significant digits.
void write_field_csv(const std::filesystem::path& path, const std::string& column,
                     const Field& f);

}  // namespace lvlab::cli
