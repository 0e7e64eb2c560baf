// Command-line front end: run experiments, plot and tabulate aggregates, and
// print the NoMax counterexample / KKT diagnostics.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "albo/auglag.hpp"
#include "albo/harness.hpp"
#include "albo/problems.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct RunOptions {
  std::string config_path;
  std::string problem, strategy, surrogate, acquisition, schedule, out, label;
  int restarts = -1, budget = -1, n_init = -1, jobs = -1, candidates = -1, mc_draws = -1;
  long long seed = -1;
  double rho0 = -1.0;
};

int run_command(const RunOptions& o) {
  albo::ExperimentConfig config;
  if (!o.config_path.empty()) config = albo::load_config(o.config_path);
  if (!o.problem.empty()) config.problem_id = o.problem;
  if (!o.strategy.empty()) config.strategy_id = o.strategy;
  if (!o.surrogate.empty()) config.strategy.surrogate = albo::parse_surrogate(o.surrogate);
  if (!o.acquisition.empty()) config.strategy.acquisition = albo::parse_acquisition(o.acquisition);
  if (!o.schedule.empty()) config.strategy.schedule = albo::parse_schedule(o.schedule);
  if (o.restarts >= 0) config.restarts = o.restarts;
  if (o.n_init >= 0) {
    const int budget = config.budget();
    config.strategy.n_init = o.n_init;
    config.strategy.n_iter = budget - o.n_init;
  }
  if (o.budget >= 0) config.strategy.n_iter = o.budget - config.strategy.n_init;
  if (o.seed >= 0) config.strategy.seed = static_cast<std::uint64_t>(o.seed);
  if (o.jobs >= 0) config.jobs = o.jobs;
  if (o.candidates >= 0) config.strategy.candidate_count = o.candidates;
  if (o.mc_draws >= 0) config.strategy.mc_draws = o.mc_draws;
  if (o.rho0 > 0.0) config.strategy.rho0 = o.rho0;
  if (!o.label.empty()) config.label = o.label;
  if (!o.out.empty()) config.output_dir = o.out;
  if (config.output_dir.empty()) config.output_dir = std::filesystem::path("results") / albo::default_label(config);

  const albo::AggregateResult result = albo::run_experiment(config);
  std::cout << albo::format_table({result});
  std::cout << "wrote " << config.output_dir.string() << "\n";
  return 0;
}

int plot_command(const std::vector<std::string>& inputs, const std::vector<std::string>& labels,
                 const std::string& out, const std::string& title) {
  std::vector<albo::AggregateResult> results;
  for (const std::string& path : inputs) results.push_back(albo::read_aggregate_csv(path));
  albo::emit_plot(results, labels, out, albo::PlotOptions{.title = title});
  std::cout << "wrote " << out << "\n";
  return 0;
}

int table_command(const std::vector<std::string>& inputs) {
  std::vector<albo::AggregateResult> results;
  for (const std::string& path : inputs) results.push_back(albo::read_aggregate_csv(path));
  std::cout << albo::format_table(results);
  return 0;
}

int check_command() {
  std::printf("NoMax reduced subproblem (x - 0.5)^2 + (x^2 - 1)^2 / (2 rho) on [-1, 1]\n");
  std::printf("%10s %14s %16s %18s\n", "rho", "argmin", "|argmin - 0.5|", "slope at 0.5");
  for (double rho : {10.0, 1.0, 0.1, 0.01}) {
    const double x = albo::counterexample_minimizer(rho);
    std::printf("%10g %14.8f %16.3e %18.6f\n", rho, x, std::abs(x - 0.5),
                albo::counterexample_penalized_derivative(0.5, rho));
  }

  const albo::ConstrainedProblem counterexample = albo::make_counterexample_1d();
  std::printf("\nAL outer loop on min{(x-0.5)^2 : x^2 - 1 <= 0}, start x0 = 0\n");
  std::printf("%8s %8s %14s %12s %12s %12s %12s\n", "variant", "rho0", "x", "stationary", "feasibility",
              "compl.", "outer its");
  for (albo::Variant variant : {albo::Variant::WithMax, albo::Variant::NoMax}) {
    for (double rho : {10.0, 1.0, 0.1}) {
      const albo::SaddleResult r =
          albo::al_saddle_check(counterexample, albo::ALState{albo::Vector::Zero(1), rho, variant},
                                albo::Vector::Zero(1));
      std::printf("%8s %8g %14.8f %12.3e %12.3e %12.3e %12d\n", albo::to_string(variant).c_str(), rho, r.x(0),
                  r.report.stationarity, r.report.feasibility, r.report.complementarity, r.outer_iterations);
    }
  }

  const albo::ConstrainedProblem v1 = albo::make_version(1);
  std::printf("\nAL outer loop on Version 1 (linear objective), rho0 = 0.5\n");
  for (albo::Variant variant : {albo::Variant::WithMax, albo::Variant::NoMax}) {
    const albo::SaddleResult r = albo::al_saddle_check(v1, albo::ALState{albo::Vector::Zero(2), 0.5, variant},
                                                       albo::Vector::Constant(2, 0.5));
    std::printf("%8s x = (%.6f, %.6f)  stationarity %.3e  feasibility %.3e\n", albo::to_string(variant).c_str(),
                r.x(0), r.x(1), r.report.stationarity, r.report.feasibility);
  }

  const albo::ConstrainedProblem toy = albo::make_toy_original();
  const albo::SaddleResult r = albo::al_saddle_check(toy, albo::ALState{albo::Vector::Zero(2), 0.5, albo::Variant::WithMax},
                                                     albo::Vector::Constant(2, 0.5));
  std::printf("\nToy problem, WithMax AL: x = (%.6f, %.6f), f = %.6f, lambda = (%.4f, %.4f)\n", r.x(0), r.x(1),
              toy.objective(r.x), r.state.lambda(0), r.state.lambda(1));
  std::printf("KKT residuals: stationarity %.3e  feasibility %.3e  complementarity %.3e\n", r.report.stationarity,
              r.report.feasibility, r.report.complementarity);
  std::printf("Reference optimum f* = %.10f at (%.10f, %.10f)\n", toy.known_optimum->value,
              toy.known_optimum->location(0), toy.known_optimum->location(1));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Augmented-Lagrangian Bayesian optimization experiments"};
  app.require_subcommand(1);

  RunOptions run;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a multi-restart experiment");
  run_cmd->add_option("--config", run.config_path, "JSON config file")->check(CLI::ExistingFile);
  run_cmd->add_option("--problem", run.problem, "toy, v1, v2, v3 or counterexample-1d");
  run_cmd->add_option("--strategy", run.strategy, "random, nomax or withmax");
  run_cmd->add_option("--surrogate", run.surrogate, "indep or lmc");
  run_cmd->add_option("--acquisition", run.acquisition, "ei-mc or ey-nomax");
  run_cmd->add_option("--schedule", run.schedule, "newest or best-al");
  run_cmd->add_option("--restarts", run.restarts);
  run_cmd->add_option("--budget", run.budget, "total evaluations (n_init + n_iter)");
  run_cmd->add_option("--n-init", run.n_init, "initial design size");
  run_cmd->add_option("--seed", run.seed, "base seed; restart i uses seed + i");
  run_cmd->add_option("--jobs", run.jobs, "restarts run concurrently");
  run_cmd->add_option("--candidates", run.candidates, "candidate points per iteration");
  run_cmd->add_option("--mc-draws", run.mc_draws, "Monte-Carlo draws per candidate");
  run_cmd->add_option("--rho0", run.rho0, "initial penalty parameter");
  run_cmd->add_option("--label", run.label);
  run_cmd->add_option("--out", run.out, "output directory");

  std::vector<std::string> plot_inputs, plot_labels;
  std::string plot_out, plot_title;
  CLI::App* plot_cmd = app.add_subcommand("plot", "Plot aggregate trajectories as SVG");
  plot_cmd->add_option("--in", plot_inputs, "aggregate.csv files")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--labels", plot_labels);
  plot_cmd->add_option("--out", plot_out, "output SVG path")->required();
  plot_cmd->add_option("--title", plot_title);

  std::vector<std::string> table_inputs;
  CLI::App* table_cmd = app.add_subcommand("table", "Summarize final means");
  table_cmd->add_option("--in", table_inputs, "aggregate.csv files")->required()->check(CLI::ExistingFile);

  CLI::App* check_cmd = app.add_subcommand("check", "Counterexample and KKT diagnostics");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run_cmd) return run_command(run);
    if (*plot_cmd) return plot_command(plot_inputs, plot_labels, plot_out, plot_title);
    if (*table_cmd) return table_command(table_inputs);
    if (*check_cmd) return check_command();
  } catch (const albo::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const albo::InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
