#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "albo/types.hpp"

namespace albo {

using ScalarFunction = std::function<double(const Vector&)>;

/// Axis-aligned box; lower[i] < upper[i] in every dimension.
class BoxDomain {
 public:
  BoxDomain(Vector lower, Vector upper);

  static BoxDomain unit(Eigen::Index dimension);

  Eigen::Index dimension() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool contains(const Vector& x, double tolerance = 0.0) const;

  /// Maps a point of the unit cube affinely onto the box.
  Vector from_unit(const Eigen::Ref<const Vector>& u) const;
  Matrix from_unit_rows(const Matrix& unit_points) const;

 private:
  Vector lower_;
  Vector upper_;
};

struct Interval {
  double lower = 0.0;
  double upper = 1.0;
};

struct KnownOptimum {
  double value = 0.0;
  Vector location;
};

/// min f(x) subject to c_i(x) <= 0 for every i and x in the box.
struct ConstrainedProblem {
  std::string name;
  ScalarFunction objective;
  std::vector<ScalarFunction> constraints;
  BoxDomain domain;
  std::optional<KnownOptimum> known_optimum;

  Eigen::Index dimension() const { return domain.dimension(); }
  Eigen::Index num_constraints() const { return static_cast<Eigen::Index>(constraints.size()); }

  /// All constraint values at x, in declaration order. No domain check.
  Vector constraint_values(const Vector& x) const;
};

struct Evaluation {
  Vector x;
  double f = 0.0;
  Vector c;
  bool feasible = false;
};

// Test problems.
ConstrainedProblem make_toy_original();
ConstrainedProblem make_version(int version);
ConstrainedProblem make_counterexample_1d();

/// Adds a slack coordinate r in `r_bounds`: minimizes r subject to the original
/// constraints and f(x) - r <= 0.
ConstrainedProblem slack_linearize(const ConstrainedProblem& problem, Interval r_bounds);

/// Resolves "toy", "v1", "v2", "v3" and "counterexample-1d".
ConstrainedProblem make_problem(const std::string& id);
std::vector<std::string> problem_ids();

bool is_feasible(const ConstrainedProblem& problem, const Vector& x);
Evaluation evaluate(const ConstrainedProblem& problem, const Vector& x);

// The NoMax reduced subproblem (x - 0.5)^2 + (x^2 - 1)^2 / (2 rho) on [-1, 1].
double counterexample_penalized(double x, double rho);
double counterexample_penalized_derivative(double x, double rho);
double counterexample_minimizer(double rho);

}  // namespace albo
