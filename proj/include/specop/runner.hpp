#pragma once

// File-facing layer behind the command-line tool: CSV ingest, the JSON test
// report, diagnostics CSVs and simulation plan files. No statistical logic
// lives here; everything goes through run_two_sample_test / run_experiment.

#include "specop/bootstrap.hpp"
#include "specop/pipeline.hpp"
#include "specop/simulation.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace specop {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kReportSchemaVersion = 1;

enum class HeaderMode { automatic, present, absent };

/// Reads a T x k numeric table (rows = time, columns = grid points).
/// With a header row its values become the grid; otherwise the grid is
/// k equidistant points including both endpoints. In automatic mode the
/// first row is a header iff it is strictly increasing inside [0,1] and
/// the remaining rows still leave T >= 4.
FunctionalSample ingest_csv(const std::filesystem::path& path,
                            HeaderMode header = HeaderMode::automatic);

struct RunConfig {
  std::filesystem::path x_path;
  std::filesystem::path y_path;
  std::optional<double> bandwidth;  // nullopt: cross-validate
  std::vector<double> cv_grid = default_cv_grid();
  KernelName kernel = KernelName::epanechnikov_pi;
  Index replicates = 1000;
  std::uint64_t seed = 0;
  std::vector<double> alphas = {0.01, 0.05, 0.10};
  BootstrapStatistic statistic = BootstrapStatistic::t_star;
  /// Skip the bootstrap and decide against N(0,1) quantiles.
  bool asymptotic = false;
  HeaderMode header = HeaderMode::automatic;
  std::filesystem::path report_path;
  std::optional<std::filesystem::path> diagnostics_dir;
};

/// Throws InputError when B < 99 (bootstrap runs only), an alpha is outside (0, 0.5] or a numeric
/// bandwidth is outside (0,1).
void validate(const RunConfig& config);

AnalysisOptions analysis_options(const RunConfig& config);

/// Canonical JSON form of a finished test. No timestamps, so equal inputs
/// give byte-identical output.
nlohmann::json make_report(const TwoSampleTest& test, const RunConfig& config);

/// Every report invariant that fails, as human-readable lines (empty = valid).
std::vector<std::string> validate_report(const nlohmann::json& report);

/// cv_curve.csv (b,score), q_curve.csv (lambda,q),
/// bootstrap_replicates.csv (replicate,t_star,t_plus).
void write_diagnostics(const TwoSampleTest& test,
                       const std::filesystem::path& dir);

/// ingest both files -> run_two_sample_test -> write report (+ diagnostics).
nlohmann::json run(const RunConfig& config);

/// A Table-1 style batch: one experiment per a2 value, X = MA(a1, a2),
/// Y = MA(a1).
struct SimulationPlan {
  double a1 = 0.8;
  std::vector<double> a2_values = {0.0, 0.2, 0.5, 0.8, 1.0};
  Index length = 100;
  Index grid_size = 21;
  AnalysisOptions analysis;
  Index repetitions = 500;
  std::uint64_t seed = 0;
};

/// Parses `key = value` lines (# starts a comment). Keys: T, k, a1, a2,
/// bandwidth (number or cv), cv_grid, kernel, B, R, alphas, seed, statistic.
SimulationPlan parse_simulation_plan(const std::string& text);
SimulationPlan load_simulation_plan(const std::filesystem::path& path);

ExperimentPlan experiment_for_row(const SimulationPlan& plan, std::size_t row);

/// Runs every row; writes rejection_rates.csv, standard_errors.csv, runs.csv
/// and summary.json into `out_dir`. Returns the summary.
nlohmann::json run_simulation(const SimulationPlan& plan,
                              const std::filesystem::path& out_dir);

/// Comma-separated list of doubles; throws InputError on junk.
std::vector<double> parse_number_list(const std::string& text);

}  // namespace specop
