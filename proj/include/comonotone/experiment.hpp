#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace comonotone {

/// Invalid experiment configuration; the message names the offending key and
/// its JSON-pointer location.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One line of `<name>_report.csv`: name,mean,stderr,n,predicted,verdict.
struct ReportRow {
  std::string name;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::string predicted;
  std::string verdict;
};

/// One line of `<name>_curves.csv`: curve,parameter,value,stderr.
struct CurveRow {
  std::string curve;
  double parameter = 0.0;
  double value = 0.0;
  double std_error = 0.0;
};

struct ExperimentResult {
  std::string name;
  std::string kind;
  std::vector<ReportRow> rows;
  std::vector<CurveRow> curves;
  std::vector<std::string> warnings;

  /// Rows with verdict "violation".
  std::vector<ReportRow> violations() const;
};

/// Command-line overrides of the config.
struct RunOverrides {
  std::optional<std::size_t> paths;  // replaces the top-level n_paths
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
};

/// Parses, validates and runs a JSON experiment config. `default_name` is
/// used when the config has no "name". Throws ConfigError for invalid
/// configs (including parameters rejected by the library).
ExperimentResult run_experiment(const std::string& json_text, const RunOverrides& overrides = {},
                                const std::string& default_name = "experiment");

/// Output directory from the config ("output" key), if any.
std::optional<std::string> config_output_dir(const std::string& json_text);

std::string report_csv(const ExperimentResult& result);
std::string curves_csv(const ExperimentResult& result);
std::string format_row(const ReportRow& row);

/// Writes `<dir>/<name>_report.csv` and `<dir>/<name>_curves.csv`.
void write_outputs(const ExperimentResult& result, const std::string& dir);

/// Registered processes, functionals, convex test functions and barrier
/// kinds with their parameter schemas.
std::string list_registry();

}  // namespace comonotone
