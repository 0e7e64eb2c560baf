#include "albo/auglag.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "albo/local_search.hpp"

namespace albo {

std::string to_string(Variant variant) { return variant == Variant::WithMax ? "withmax" : "nomax"; }

Variant parse_variant(const std::string& id) {
  if (id == "withmax") return Variant::WithMax;
  if (id == "nomax") return Variant::NoMax;
  throw InvalidArgument("unknown AL variant '" + id + "'");
}

void validate(const ALState& state) {
  require(state.rho > 0.0 && std::isfinite(state.rho), "rho must be positive and finite");
  require(state.lambda.allFinite() && (state.lambda.array() >= 0.0).all(), "multipliers must be finite and >= 0");
}

double al_value(double f, const Vector& c, const ALState& state) {
  validate(state);
  require(c.size() == state.lambda.size(), "constraint and multiplier counts differ");
  require(std::isfinite(f) && c.allFinite(), "AL inputs must be finite");
  return augmented_lagrangian(f, c, state.lambda, state.rho, state.variant);
}

ALState update_multipliers(const ALState& state, const Vector& c) {
  require(c.size() == state.lambda.size(), "constraint and multiplier counts differ");
  ALState next = state;
  next.lambda = (state.lambda + c / state.rho).cwiseMax(0.0);
  return next;
}

ALState update_rho(const ALState& state, bool made_progress) {
  ALState next = state;
  if (!made_progress) next.rho = std::max(kMinRho, state.rho / 2.0);
  return next;
}

namespace {

Vector central_gradient(const ScalarFunction& fn, const Vector& x) {
  Vector g(x.size());
  Vector probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
    probe(j) = x(j) + h;
    const double up = fn(probe);
    probe(j) = x(j) - h;
    const double down = fn(probe);
    probe(j) = x(j);
    g(j) = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace

KKTReport kkt_residual(const ConstrainedProblem& problem, const Vector& x, const Vector& lambda) {
  require(problem.domain.contains(x), "KKT point lies outside the problem domain");
  require(lambda.size() == problem.num_constraints(), "multiplier count must match the constraint count");
  require((lambda.array() >= 0.0).all(), "multipliers must be non-negative");

  Vector gradient = central_gradient(problem.objective, x);
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) != 0.0) gradient += lambda(i) * central_gradient(problem.constraints[static_cast<std::size_t>(i)], x);
  }
  const Vector& lo = problem.domain.lower();
  const Vector& hi = problem.domain.upper();
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if ((x(j) <= lo(j) && gradient(j) > 0.0) || (x(j) >= hi(j) && gradient(j) < 0.0)) gradient(j) = 0.0;
  }

  const Vector c = problem.constraint_values(x);
  KKTReport report;
  report.stationarity = gradient.norm();
  report.feasibility = c.size() > 0 ? std::max(0.0, c.maxCoeff()) : 0.0;
  report.complementarity = c.size() > 0 ? lambda.cwiseProduct(c).cwiseAbs().maxCoeff() : 0.0;
  report.multipliers = lambda;
  return report;
}

SaddleResult al_saddle_check(const ConstrainedProblem& problem, const ALState& initial, const Vector& start) {
  validate(initial);
  require(initial.lambda.size() == problem.num_constraints(), "multiplier count must match the constraint count");
  require(start.size() == problem.dimension(), "start point has the wrong dimension");

  constexpr int kMaxOuter = 100;
  const MultistartOptions search{.grid_points_per_dimension = problem.dimension() <= 2 ? 41 : 17,
                                 .local_starts = 4,
                                 .local = {}};

  ALState state = initial;
  Vector x = start.cwiseMax(problem.domain.lower()).cwiseMin(problem.domain.upper());
  double tolerance = 0.1;  // violation allowed before the multipliers are trusted
  int iteration = 0;
  for (; iteration < kMaxOuter; ++iteration) {
    const auto al = [&](const Vector& z) {
      return augmented_lagrangian(problem.objective(z), problem.constraint_values(z), state.lambda, state.rho,
                                  state.variant);
    };
    LocalResult inner = multistart_minimize(al, problem.domain, search);
    LocalResult warm = nelder_mead_box(al, x, problem.domain, search.local);
    if (warm.value < inner.value) inner = std::move(warm);
    if (!std::isfinite(inner.value)) throw std::runtime_error("AL inner minimization produced a non-finite value");

    const Vector c = problem.constraint_values(inner.x);
    const double violation = std::max(0.0, c.maxCoeff());
    ALState next = state;
    if (violation <= tolerance) {
      next = update_multipliers(state, c);
      tolerance = std::max(1e-10, 0.5 * tolerance);
    } else {
      next = update_rho(state, false);
    }

    const bool settled = (inner.x - x).lpNorm<Eigen::Infinity>() <= 1e-10 &&
                         (next.lambda - state.lambda).lpNorm<Eigen::Infinity>() <= 1e-10 && next.rho == state.rho;
    x = inner.x;
    state = next;
    if (settled) {
      ++iteration;
      break;
    }
  }
  return SaddleResult{x, kkt_residual(problem, x, state.lambda), state, iteration};
}

}  // namespace albo
