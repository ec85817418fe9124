#pragma once

// Config-driven experiments: JSON config in, per-depth CSV and summary JSON out.

#include <chrono>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qdent/classical.hpp"
#include "qdent/errors.hpp"
#include "qdent/sz.hpp"

namespace qdent {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitTolerance = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitResource = 3;

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

inline constexpr const char* kCsvHeader =
    "depth,a_n,cesaro,branch_count,merged_count,pruned_mass,c_n,e_n,o_n";
inline constexpr int kSummaryFormatVersion = 1;

/// Fully built experiment: everything the SZ engine needs.
struct Experiment {
  nlohmann::ordered_json config;
  Operator step_unitary;
  Instrument instrument;
  DensityState state;
  Partition partition;
  RunOptions options;
};

/// Parses and validates a config document. ConfigError names the offending field.
Experiment build_experiment(const nlohmann::ordered_json& config);
Experiment load_experiment(const std::filesystem::path& path);

struct RunRecord {
  nlohmann::ordered_json config;
  std::vector<DepthRecord> rows;
  EntropyReport report;
  double duration_seconds = 0.0;
};

RunRecord run_experiment(const Experiment& e);

std::string format_csv(const RunRecord& r);
/// Summary document. Every number carries at most 15 significant digits.
nlohmann::ordered_json summary_json(const RunRecord& r, bool include_duration = true);

struct RunOutputs {
  RunRecord record;
  std::filesystem::path csv_path;
  std::filesystem::path summary_path;
};

/// Loads `config_path`, runs it, and writes <stem>.csv and <stem>.summary.json
/// into `out_dir` (default: the config's directory).
RunOutputs run_config(const std::filesystem::path& config_path,
                      const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                      bool strict = false);

struct CheckRow {
  std::string name;
  double expected = 0.0;
  double computed = 0.0;
  double error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// The closed-form Hadamard-walk and cycle-walk values at N = 5.
std::vector<CheckRow> paper_check();
void print_check_table(std::ostream& os, const std::vector<CheckRow>& rows, bool bits = false);

struct MarkovSummary {
  int n = 0;
  int power = 1;
  double entropy = 0.0;
  ProbVector stationary;
  ConvergenceReport rate;
};

/// `start` is "uniform" or "point:K".
MarkovSummary markov_cmd(int n, int power, const std::string& start, int n_max = 200,
                         double tol = 1e-12);
void print_markov(std::ostream& os, const MarkovSummary& s, bool bits = false);

/// %.15g.
std::string format_number(double x);

}  // namespace qdent
