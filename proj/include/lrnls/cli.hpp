#pragma once

// Command-line front end: solve, study-temporal, study-spatial, diagnostics
// and selftest subcommands.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lrnls/harness.hpp"

namespace lrnls::cli {

// Parsed and validated parameters of one subcommand.
struct RunConfig {
  std::string command;
  SchemeParams params;
  InitialDataSpec initial;
  InitMode init_mode = InitMode::truncated;
  ReferenceScheme scheme = ReferenceScheme::lowreg_fine;
  StudySpec study;
  std::vector<double> snapshot_times;
  std::optional<std::filesystem::path> out;
  std::filesystem::path input;
  bool table = false;
};

// "2^-k", "2^k" or a decimal literal; throws std::invalid_argument.
double parse_number(const std::string& text);
// Comma-separated list of parse_number values.
std::vector<double> parse_number_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

// Runs the quick invariant suite, one PASS/FAIL line per check.
bool selftest(std::ostream& out);

// Exit status: 0 on success, 1 on runtime failure or blow-up, 2 on usage
// errors. Errors are reported as a single `error: ...` line on `err`.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lrnls::cli
