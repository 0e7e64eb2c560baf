#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "albo/strategies.hpp"

namespace albo {

/// Bad configuration: unknown ids, invalid counts, malformed config files.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed CSV input.
class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string problem_id = "v2";
  std::string strategy_id = "withmax";  // "random", "nomax" or "withmax"
  StrategyConfig strategy;
  int restarts = 1;
  int jobs = 1;
  std::filesystem::path output_dir;  // empty: keep results in memory only
  std::string label;                 // defaults to "<problem>-<strategy>[-<surrogate>]"

  /// Random search spends the whole budget on uniform samples.
  int budget() const { return strategy.budget(); }
};

/// Reads a flat JSON object whose keys match the config field names.
ExperimentConfig load_config(const std::filesystem::path& path);
/// Applies the keys present in a JSON text on top of `base`.
ExperimentConfig parse_config(const std::string& json_text, ExperimentConfig base = {});
std::string config_to_json(const ExperimentConfig& config);
void validate(const ExperimentConfig& config);
std::string default_label(const ExperimentConfig& config);

struct RestartResult {
  int restart = 0;
  std::uint64_t seed = 0;
  Trajectory trajectory;
  std::string failure;  // non-empty if the restart aborted
};

struct AggregateResult {
  std::string label;
  std::vector<std::optional<double>> mean_trajectory;
  std::vector<std::optional<double>> stderr_trajectory;
  double final_mean = 0.0;
  double final_stderr = 0.0;
  int included = 0;
  int excluded = 0;  // restarts with no feasible evaluation or an aborted run
};

/// Per-evaluation mean of best_feasible over restarts that found a feasible point.
/// Entries stay empty until every included restart has a feasible value.
AggregateResult aggregate(const std::vector<RestartResult>& restarts, const std::string& label);

/// Runs one restart of the configured strategy with the given seed.
Trajectory run_strategy(const ConstrainedProblem& problem, const ExperimentConfig& config, std::uint64_t seed);

/// Executes every restart (seed = base seed + restart index), writes per-restart
/// CSV/JSON logs plus aggregate.csv and summary.json when output_dir is set.
AggregateResult run_experiment(const ExperimentConfig& config, std::vector<RestartResult>* restarts = nullptr);

// CSV
void write_csv(const Trajectory& trajectory, int restart, const std::filesystem::path& path);
Trajectory read_csv(const std::filesystem::path& path, int* restart = nullptr);
void write_csv(const AggregateResult& result, const std::filesystem::path& path);
AggregateResult read_aggregate_csv(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

// Reporting
struct PlotOptions {
  std::string title;
  std::string x_label = "function evaluations";
  std::string y_label = "mean best feasible objective";
};

/// Self-contained SVG with one polyline per series. Series whose label mentions
/// "nomax" or "indep" are drawn black, "withmax" or "lmc" gray.
void emit_plot(const std::vector<AggregateResult>& results, const std::vector<std::string>& labels,
               const std::filesystem::path& path, const PlotOptions& options = {});

/// Table of final means, one row per result.
std::string format_table(const std::vector<AggregateResult>& results);

}  // namespace albo
