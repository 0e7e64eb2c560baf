#include "albo/problems.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include <boost/math/tools/roots.hpp>

namespace albo {

BoxDomain::BoxDomain(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  require(lower_.size() >= 1, "box domain needs at least one dimension");
  require(lower_.size() == upper_.size(), "box bounds have different dimensions");
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    require(std::isfinite(lower_(i)) && std::isfinite(upper_(i)), "box bounds must be finite");
    require(lower_(i) < upper_(i), "box lower bound must be below upper bound");
  }
}

BoxDomain BoxDomain::unit(Eigen::Index dimension) {
  return BoxDomain(Vector::Zero(dimension), Vector::Ones(dimension));
}

bool BoxDomain::contains(const Vector& x, double tolerance) const {
  if (x.size() != dimension()) return false;
  return ((x.array() >= lower_.array() - tolerance) && (x.array() <= upper_.array() + tolerance)).all();
}

Vector BoxDomain::from_unit(const Eigen::Ref<const Vector>& u) const {
  return lower_ + (upper_ - lower_).cwiseProduct(u);
}

Matrix BoxDomain::from_unit_rows(const Matrix& unit_points) const {
  Matrix out = unit_points;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    out.col(j) = lower_(j) + (upper_(j) - lower_(j)) * unit_points.col(j).array();
  }
  return out;
}

Vector ConstrainedProblem::constraint_values(const Vector& x) const {
  Vector c(num_constraints());
  for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = constraints[static_cast<std::size_t>(i)](x);
  return c;
}

namespace {

double toy_c1(const Vector& x) {
  return 1.5 - x(0) - 2.0 * x(1) - 0.5 * std::sin(2.0 * std::numbers::pi * (x(0) * x(0) - 2.0 * x(1)));
}

double toy_c2(const Vector& x) { return x(0) * x(0) + x(1) * x(1) - 1.5; }

double version2_objective(const Vector& x) {
  return 0.5 * (x(0) - 0.6) * (x(0) - 0.6) + (x(1) - 0.6) * (x(1) - 0.6);
}

// Range of the Version 2 objective over [0,1]^2: attained at the corner (0, 0).
constexpr double kVersion2Max = 0.5 * 0.36 + 0.36;

}  // namespace

ConstrainedProblem make_toy_original() {
  ConstrainedProblem p{
      .name = "toy",
      .objective = [](const Vector& x) { return x(0) + x(1); },
      .constraints = {toy_c1, toy_c2},
      .domain = BoxDomain::unit(2),
      .known_optimum = std::nullopt,
  };
  // Located by dense grid search followed by local refinement on the active c1 boundary.
  p.known_optimum = KnownOptimum{0.5997880520099375, Vector{{0.1951226885663037, 0.4046653634436337}}};
  return p;
}

ConstrainedProblem make_version(int version) {
  switch (version) {
    case 1: {
      ConstrainedProblem p = make_toy_original();
      p.name = "v1";
      p.objective = [](const Vector& x) { return x(0) - x(1); };
      p.known_optimum = KnownOptimum{-1.0, Vector{{0.0, 1.0}}};
      return p;
    }
    case 2: {
      ConstrainedProblem p = make_toy_original();
      p.name = "v2";
      p.objective = version2_objective;
      p.known_optimum = KnownOptimum{0.0, Vector{{0.6, 0.6}}};
      return p;
    }
    case 3: {
      return ConstrainedProblem{
          .name = "v3",
          .objective = [](const Vector& x) { return x(2); },
          .constraints = {toy_c1, toy_c2,
                          [](const Vector& x) { return version2_objective(x.head(2)) - x(2); }},
          .domain = BoxDomain(Vector::Zero(3), Vector{{1.0, 1.0, kVersion2Max}}),
          .known_optimum = KnownOptimum{0.0, Vector{{0.6, 0.6, 0.0}}},
      };
    }
    default:
      throw InvalidArgument("problem version must be 1, 2 or 3, got " + std::to_string(version));
  }
}

ConstrainedProblem slack_linearize(const ConstrainedProblem& problem, Interval r_bounds) {
  const Eigen::Index d = problem.dimension();
  Vector lower(d + 1);
  Vector upper(d + 1);
  lower << problem.domain.lower(), r_bounds.lower;
  upper << problem.domain.upper(), r_bounds.upper;

  std::vector<ScalarFunction> constraints;
  constraints.reserve(problem.constraints.size() + 1);
  for (const ScalarFunction& c : problem.constraints) {
    constraints.emplace_back([c, d](const Vector& z) { return c(z.head(d)); });
  }
  constraints.emplace_back([f = problem.objective, d](const Vector& z) { return f(z.head(d)) - z(d); });

  std::optional<KnownOptimum> optimum;
  if (problem.known_optimum) {
    Vector location(d + 1);
    location << problem.known_optimum->location, problem.known_optimum->value;
    optimum = KnownOptimum{problem.known_optimum->value, std::move(location)};
  }

  return ConstrainedProblem{
      .name = problem.name + "-slack",
      .objective = [d](const Vector& z) { return z(d); },
      .constraints = std::move(constraints),
      .domain = BoxDomain(std::move(lower), std::move(upper)),
      .known_optimum = std::move(optimum),
  };
}

ConstrainedProblem make_counterexample_1d() {
  return ConstrainedProblem{
      .name = "counterexample-1d",
      .objective = [](const Vector& x) { return (x(0) - 0.5) * (x(0) - 0.5); },
      .constraints = {[](const Vector& x) { return x(0) * x(0) - 1.0; }},
      .domain = BoxDomain(Vector::Constant(1, -1.0), Vector::Constant(1, 1.0)),
      .known_optimum = KnownOptimum{0.0, Vector::Constant(1, 0.5)},
  };
}

ConstrainedProblem make_problem(const std::string& id) {
  if (id == "toy") return make_toy_original();
  if (id == "v1") return make_version(1);
  if (id == "v2") return make_version(2);
  if (id == "v3") return make_version(3);
  if (id == "counterexample-1d") return make_counterexample_1d();
  throw InvalidArgument("unknown problem id '" + id + "'");
}

std::vector<std::string> problem_ids() { return {"toy", "v1", "v2", "v3", "counterexample-1d"}; }

Evaluation evaluate(const ConstrainedProblem& problem, const Vector& x) {
  require(problem.domain.contains(x), "evaluation point lies outside the problem domain");
  Evaluation e{.x = x, .f = problem.objective(x), .c = problem.constraint_values(x), .feasible = false};
  e.feasible = e.c.size() == 0 || e.c.maxCoeff() <= 0.0;
  return e;
}

bool is_feasible(const ConstrainedProblem& problem, const Vector& x) { return evaluate(problem, x).feasible; }

double counterexample_penalized(double x, double rho) {
  require(rho > 0.0, "rho must be positive");
  const double g = x * x - 1.0;
  return (x - 0.5) * (x - 0.5) + g * g / (2.0 * rho);
}

double counterexample_penalized_derivative(double x, double rho) {
  require(rho > 0.0, "rho must be positive");
  return 2.0 * (x - 0.5) + 2.0 * x * (x * x - 1.0) / rho;
}

double counterexample_minimizer(double rho) {
  require(rho > 0.0, "rho must be positive");
  constexpr int kGrid = 20000;
  constexpr double kStep = 2.0 / kGrid;

  int best = 0;
  double best_value = counterexample_penalized(-1.0, rho);
  for (int i = 1; i <= kGrid; ++i) {
    const double v = counterexample_penalized(-1.0 + i * kStep, rho);
    if (v < best_value) {
      best_value = v;
      best = i;
    }
  }

  const double lo = std::max(-1.0, -1.0 + (best - 1) * kStep);
  const double hi = std::min(1.0, -1.0 + (best + 1) * kStep);
  const auto slope = [rho](double x) { return counterexample_penalized_derivative(x, rho); };
  if (!(slope(lo) < 0.0 && slope(hi) > 0.0)) return -1.0 + best * kStep;

  std::uintmax_t max_iter = 200;
  const auto [a, b] = boost::math::tools::toms748_solve(slope, lo, hi, boost::math::tools::eps_tolerance<double>(48),
                                                        max_iter);
  return 0.5 * (a + b);
}

}  // namespace albo
