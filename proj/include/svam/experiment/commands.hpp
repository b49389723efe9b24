#pragma once

// Subcommands of svam-bench. Each cmd_* function writes its output files and
// a short report to `log`; errors surface as ParameterError (exit 1) or
// IoError (exit 2) through run_cli.

#include "svam/engine.hpp"
#include "svam/experiment/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace svam::experiment {

struct ResultRow {
  std::uint64_t seed = 0;
  std::string method;
  int iteration = 0;
  /// NaN when the method has no scale.
  double beta = 0.0;
  double l2_error = 0.0;
  /// NaN on intermediate rows of methods that only time the whole run.
  double wall_ms = 0.0;
  bool converged = true;
};

struct MethodSummary {
  std::string method;
  double median_final_error = 0.0;
  double mean_wall_ms = 0.0;
  double convergence_rate = 0.0;
  int runs = 0;
};

/// Engine settings for one seed's dataset (init resolved, tuning applied).
SvamConfig svam_config_for(const ExperimentConfig& config, const Dataset& data,
                           std::uint64_t seed);

/// Every method on every seed. Rows are ordered by seed, method (config
/// order) and iteration regardless of `jobs`.
std::vector<ResultRow> run_methods(const ExperimentConfig& config);

/// Per method, statistics over the last row of each seed.
std::vector<MethodSummary> summarize(const std::vector<ResultRow>& rows);

/// Columns seed,method,iteration,beta,l2_error,wall_ms,converged.
void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_summary_json(std::ostream& out, const std::vector<MethodSummary>& summary);

/// `path` with its .csv extension (if any) replaced by `suffix`.
std::string sibling_path(const std::string& path, const std::string& suffix);

struct GenReport {
  Index n = 0;
  Index d = 0;
  std::size_t k = 0;
};
/// Writes the dataset for config.seed to config.out.
GenReport cmd_gen(const ExperimentConfig& config, std::ostream& log);

/// Writes config.out and its .summary.json sibling.
std::vector<MethodSummary> cmd_run(const ExperimentConfig& config, std::ostream& log);

struct SweepRow {
  double value = 0.0;
  ResultRow row;
};
struct SweepAggregate {
  double value = 0.0;
  std::string method;
  double mean_final_error = 0.0;
  double median_final_error = 0.0;
  double convergence_rate = 0.0;
};
/// Long-format rows to config.out (param,value + result columns) and
/// aggregates to the .summary.csv sibling.
std::vector<SweepAggregate> cmd_sweep(const ExperimentConfig& config, std::ostream& log);

struct InitResult {
  std::uint64_t seed = 0;
  int init_id = 0;
  std::string kind;
  Vector init;
  bool success = false;
  /// First iteration with error below the tolerance, -1 if never.
  int iterations = -1;
  double final_error = 0.0;
};
/// Success map over initial models; SVAM on each seed from every init. A run
/// succeeds when its error first drops below success_tol within
/// max_success_iters iterations and its final error is below success_tol.
std::vector<InitResult> cmd_grid_init(const ExperimentConfig& config, std::ostream& log);

/// Tunes on the config.seed dataset, prints the choice and writes the score
/// table to config.out.
tuning::TuneResult cmd_tune(const ExperimentConfig& config, std::ostream& log);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace svam::experiment
