#include "albo/strategies.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <utility>

#include "albo/lmc.hpp"
#include "albo/random.hpp"

namespace albo {

std::string to_string(SurrogateKind kind) { return kind == SurrogateKind::Independent ? "indep" : "lmc"; }

SurrogateKind parse_surrogate(const std::string& id) {
  if (id == "indep") return SurrogateKind::Independent;
  if (id == "lmc") return SurrogateKind::Lmc;
  throw InvalidArgument("unknown surrogate '" + id + "'");
}

std::string to_string(MultiplierSchedule schedule) {
  return schedule == MultiplierSchedule::Newest ? "newest" : "best-al";
}

MultiplierSchedule parse_schedule(const std::string& id) {
  if (id == "newest") return MultiplierSchedule::Newest;
  if (id == "best-al") return MultiplierSchedule::BestAl;
  throw InvalidArgument("unknown multiplier schedule '" + id + "'");
}

void Trajectory::record(Evaluation evaluation) {
  std::optional<double> best = best_feasible.empty() ? std::nullopt : best_feasible.back();
  if (evaluation.feasible && (!best || evaluation.f < *best)) best = evaluation.f;
  evaluations.push_back(std::move(evaluation));
  best_feasible.push_back(best);
}

std::optional<double> best_feasible_value(const Trajectory& trajectory, std::size_t at_eval) {
  require(at_eval <= trajectory.size(), "evaluation index beyond the trajectory length");
  std::optional<double> best;
  for (std::size_t i = 0; i < at_eval; ++i) {
    const Evaluation& e = trajectory.evaluations[i];
    if (e.feasible && (!best || e.f < *best)) best = e.f;
  }
  return best;
}

Trajectory random_search(const ConstrainedProblem& problem, int budget, std::uint64_t seed) {
  require(budget >= 1, "random search needs a budget of at least one evaluation");
  Rng rng(seed);
  Trajectory t;
  Vector unit(problem.dimension());
  for (int i = 0; i < budget; ++i) {
    for (Eigen::Index j = 0; j < unit.size(); ++j) unit(j) = uniform01(rng);
    t.record(evaluate(problem, problem.domain.from_unit(unit)));
  }
  return t;
}

SurrogateBundle fit_surrogates(const ConstrainedProblem& problem, const Matrix& x, const Matrix& c,
                               SurrogateKind kind) {
  if (kind == SurrogateKind::Lmc) return SurrogateBundle{lmc_fit(x, c), problem.objective};
  std::vector<GPModel> models;
  models.reserve(static_cast<std::size_t>(c.cols()));
  for (Eigen::Index j = 0; j < c.cols(); ++j) models.push_back(gp_fit(x, c.col(j)));
  return SurrogateBundle{std::move(models), problem.objective};
}

namespace {

std::vector<GPHyperparameters> hyperparameters_of(const SurrogateBundle& bundle) {
  std::vector<GPHyperparameters> out;
  if (const auto* independent = std::get_if<std::vector<GPModel>>(&bundle.constraints)) {
    for (const GPModel& gp : *independent) out.push_back(gp.hyperparameters());
  } else {
    for (const GPModel& gp : std::get<LMCModel>(bundle.constraints).score_models) out.push_back(gp.hyperparameters());
  }
  return out;
}

}  // namespace

Trajectory bo_auglag(const ConstrainedProblem& problem, const StrategyConfig& config) {
  const Eigen::Index d = problem.dimension();
  const Eigen::Index m = problem.num_constraints();
  require(config.n_init >= d + 1, "initial design needs at least d + 1 points");
  require(config.n_iter >= 0, "iteration count must be non-negative");
  require(config.candidate_count >= 1, "candidate count must be positive");
  require(config.mc_draws >= 1, "Monte-Carlo draw count must be positive");

  ALState state{config.lambda0.size() == 0 ? Vector(Vector::Zero(m)) : config.lambda0, config.rho0, config.variant};
  validate(state);
  require(state.lambda.size() == m, "lambda0 must have one entry per constraint");

  Trajectory t;
  const Matrix design = problem.domain.from_unit_rows(lhs_sample(config.n_init, static_cast<int>(d),
                                                            derive_seed(config.seed, 0)));
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    t.record(evaluate(problem, design.row(i).transpose()));
    t.al_states.push_back(state);
  }

  Matrix x(config.budget(), d);
  Matrix c(config.budget(), m);
  for (std::size_t i = 0; i < t.size(); ++i) {
    x.row(static_cast<Eigen::Index>(i)) = t.evaluations[i].x.transpose();
    c.row(static_cast<Eigen::Index>(i)) = t.evaluations[i].c.transpose();
  }

  for (int iter = 0; iter < config.n_iter; ++iter) {
    const auto n = static_cast<Eigen::Index>(t.size());
    SurrogateBundle bundle;
    try {
      bundle = fit_surrogates(problem, x.topRows(n), c.topRows(n), config.surrogate);
    } catch (const std::exception& e) {
      throw std::runtime_error("surrogate fit failed at evaluation " + std::to_string(n + 1) + ": " + e.what());
    }

    double best_al = std::numeric_limits<double>::infinity();
    for (const Evaluation& e : t.evaluations) best_al = std::min(best_al, al_value(e.f, e.c, state));

    const Matrix candidates = problem.domain.from_unit_rows(
        lhs_sample(config.candidate_count, static_cast<int>(d), derive_seed(config.seed, 2 * iter + 1)));
    const Selection next = select_next(bundle, state, best_al, candidates, config.mc_draws,
                                       derive_seed(config.seed, 2 * iter + 2), config.acquisition);

    const std::optional<double> previous_best = t.best_feasible.back();
    Evaluation e = evaluate(problem, next.point);
    x.row(n) = e.x.transpose();
    c.row(n) = e.c.transpose();

    IterationLog log{.evaluation = static_cast<int>(n + 1),
                     .best_al = best_al,
                     .acquisition_score = next.score,
                     .hyperparameters = hyperparameters_of(bundle),
                     .coupling = {}};
    if (const auto* lmc = std::get_if<LMCModel>(&bundle.constraints)) log.coupling = lmc->coupling;

    if (config.schedule == MultiplierSchedule::Newest) {
      const bool improved = e.feasible && (!previous_best || e.f <= *previous_best - 1e-8);
      state = update_rho(update_multipliers(state, e.c), improved);
      t.record(std::move(e));
    } else {
      t.record(std::move(e));
      std::size_t argmin = 0;
      double lowest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < t.size(); ++i) {
        const double al = al_value(t.evaluations[i].f, t.evaluations[i].c, state);
        if (al < lowest) {
          lowest = al;
          argmin = i;
        }
      }
      const Evaluation& anchor = t.evaluations[argmin];
      state = update_rho(update_multipliers(state, anchor.c), anchor.feasible);
    }
    t.al_states.push_back(state);
    t.iterations.push_back(std::move(log));
  }
  return t;
}

}  // namespace albo
