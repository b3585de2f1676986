#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "calib/csv.hpp"
#include "calib/numerics/newton.hpp"
#include "calib/simulation.hpp"

namespace calib {

enum class Command { Fit, Simulate, Validate };

enum class ModelChoice { Usual, ControlledUnknown, ControlledKnown };

enum class OutputFormat { Csv, JsonLines, PrettyTable };

// Everything one invocation needs, assembled by the flag parser and also
// constructible directly in tests.
struct RunManifest {
  Command command = Command::Fit;

  // fit
  std::filesystem::path first_stage_path;
  std::filesystem::path second_stage_path;
  ModelChoice model = ModelChoice::Usual;
  std::optional<double> sigma_delta_sq;  // required iff ControlledKnown
  double confidence_level = 0.95;
  Locale locale = Locale::Point;
  OutputFormat format = OutputFormat::Csv;
  std::filesystem::path output_path;  // empty = stdout
  num::SolverConfig solver;           // known-delta fit tuning

  // simulate
  std::filesystem::path grid_path;
  std::optional<std::size_t> replications_override;
  std::optional<std::uint64_t> seed_override;
  unsigned threads = 0;  // 0 = hardware concurrency

  // validate
  bool fast = false;
};

// One output row of the fit command. `formula` is empty for point estimates.
struct ReportRow {
  std::string model;
  std::string quantity;
  std::string formula;
  double value = 0.0;
};

// Checks manifest invariants (ControlledKnown needs sigma_delta_sq >= 0,
// level in (0,1)); throws ValidationError subclasses.
void check_manifest(const RunManifest& m);

// Fits the selected model and returns the report rows: point estimates,
// one variance and one amplitude row per applicable formula.
std::vector<ReportRow> fit_rows(const RunManifest& m);

// Parses a flat key=value grid config into simulation cells (cross product
// over the list-valued keys n, k, x0, sigma_delta_sq).
std::vector<SimConfig> parse_grid_config(const std::filesystem::path& path);

// Command entry points; write to `out`, return a process exit code.
int fit_command(const RunManifest& m, std::ostream& out);
int simulate_command(const RunManifest& m, std::ostream& out);
int validate_command(const RunManifest& m, std::ostream& out);

// Full CLI: parse argv, dispatch, map exceptions to exit codes
// (0 ok, 2 parse/validation, 3 numerical, 4 internal).
int run_cli(int argc, const char* const* argv);

}  // namespace calib
