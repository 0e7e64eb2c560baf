#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "albo/acquisition.hpp"
#include "albo/auglag.hpp"
#include "albo/gp.hpp"
#include "albo/problems.hpp"

namespace albo {

enum class SurrogateKind { Independent, Lmc };

std::string to_string(SurrogateKind kind);
SurrogateKind parse_surrogate(const std::string& id);  // "indep" or "lmc"

/// Which evaluated point drives the multiplier and penalty updates.
///  Newest: the point just evaluated; rho halves if it is infeasible or did not
///          improve the best feasible value by at least 1e-8.
///  BestAl: the evaluated point minimizing the AL under the current (lambda, rho);
///          rho halves if that point is infeasible.
enum class MultiplierSchedule { Newest, BestAl };

std::string to_string(MultiplierSchedule schedule);
MultiplierSchedule parse_schedule(const std::string& id);  // "newest" or "best-al"

struct StrategyConfig {
  int n_init = 10;
  int n_iter = 100;
  int candidate_count = 200;
  int mc_draws = kDefaultMcDraws;
  SurrogateKind surrogate = SurrogateKind::Independent;
  Variant variant = Variant::WithMax;
  Acquisition acquisition = Acquisition::ExpectedImprovement;
  MultiplierSchedule schedule = MultiplierSchedule::Newest;
  Vector lambda0;  // empty means all zeros
  double rho0 = 0.5;
  std::uint64_t seed = 1;

  int budget() const { return n_init + n_iter; }
};

/// Surrogate state recorded once per acquisition iteration.
struct IterationLog {
  int evaluation = 0;  // 1-based index of the evaluation this iteration produced
  double best_al = 0.0;
  double acquisition_score = 0.0;
  std::vector<GPHyperparameters> hyperparameters;
  Matrix coupling;  // LMC only
};

struct Trajectory {
  std::vector<Evaluation> evaluations;
  std::vector<std::optional<double>> best_feasible;
  std::vector<ALState> al_states;  // per evaluation; empty for strategies without AL state
  std::vector<IterationLog> iterations;

  std::size_t size() const { return evaluations.size(); }
  /// Appends an evaluation and extends the running best feasible value.
  void record(Evaluation evaluation);
};

/// Minimum objective over feasible evaluations among the first `at_eval`.
std::optional<double> best_feasible_value(const Trajectory& trajectory, std::size_t at_eval);

Trajectory random_search(const ConstrainedProblem& problem, int budget, std::uint64_t seed);

/// AL Bayesian optimization: LHS initial design, then n_iter rounds of
/// refit surrogates -> pick the candidate maximizing the acquisition -> evaluate ->
/// update (lambda, rho).
Trajectory bo_auglag(const ConstrainedProblem& problem, const StrategyConfig& config);

/// Fits the constraint surrogate of the requested kind to all constraint observations.
SurrogateBundle fit_surrogates(const ConstrainedProblem& problem, const Matrix& x, const Matrix& c,
                               SurrogateKind kind);

}  // namespace albo
