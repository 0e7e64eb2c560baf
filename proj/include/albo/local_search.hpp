#pragma once

#include <functional>

#include "albo/problems.hpp"
#include "albo/types.hpp"

namespace albo {

struct LocalResult {
  Vector x;
  double value = 0.0;
  int evaluations = 0;
};

struct NelderMeadOptions {
  double initial_step = 0.05;  // fraction of each box side
  double x_tolerance = 1e-11;
  double f_tolerance = 1e-15;
  int max_evaluations = 4000;
};

/// Nelder-Mead on a box; trial vertices are clamped onto the box.
LocalResult nelder_mead_box(const std::function<double(const Vector&)>& objective, const Vector& start,
                            const BoxDomain& domain, const NelderMeadOptions& options = {});

struct MultistartOptions {
  int grid_points_per_dimension = 21;
  int local_starts = 4;
  NelderMeadOptions local;
};

/// Grid scan over the box followed by Nelder-Mead from the best few grid points.
LocalResult multistart_minimize(const std::function<double(const Vector&)>& objective, const BoxDomain& domain,
                                const MultistartOptions& options = {});

/// Objective returning its value and writing its gradient.
using ValueGradient = std::function<double(const Vector& x, Vector& gradient)>;

struct BfgsOptions {
  int max_iterations = 60;
  double gradient_tolerance = 1e-6;
  double value_tolerance = 1e-10;
  double max_step = 2.0;
};

/// Projected quasi-Newton descent for min f(x) on lower <= x <= upper.
/// Non-finite values are treated as infeasible and rejected by the line search.
LocalResult minimize_bounded_bfgs(const ValueGradient& objective, const Vector& start, const Vector& lower,
                                  const Vector& upper, const BfgsOptions& options = {});

}  // namespace albo
