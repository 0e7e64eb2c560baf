#include "albo/local_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace albo {

namespace {

Vector clamp_to(const Vector& x, const Vector& lower, const Vector& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

double finite_or_inf(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

}  // namespace

LocalResult nelder_mead_box(const std::function<double(const Vector&)>& objective, const Vector& start,
                            const BoxDomain& domain, const NelderMeadOptions& options) {
  const Eigen::Index d = domain.dimension();
  require(start.size() == d, "start point has the wrong dimension");
  const Vector& lo = domain.lower();
  const Vector& hi = domain.upper();

  int evaluations = 0;
  const auto eval = [&](const Vector& x) {
    ++evaluations;
    return finite_or_inf(objective(x));
  };

  std::vector<Vector> simplex;
  simplex.reserve(static_cast<std::size_t>(d + 1));
  simplex.push_back(clamp_to(start, lo, hi));
  for (Eigen::Index j = 0; j < d; ++j) {
    Vector v = simplex.front();
    const double step = options.initial_step * (hi(j) - lo(j));
    // Step away from whichever bound is closer so the vertex stays distinct after clamping.
    v(j) += (v(j) + step <= hi(j)) ? step : -step;
    simplex.push_back(clamp_to(v, lo, hi));
  }
  std::vector<double> values;
  values.reserve(simplex.size());
  for (const Vector& v : simplex) values.push_back(eval(v));

  std::vector<std::size_t> order(simplex.size());
  while (evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Vector> sorted_simplex;
    std::vector<double> sorted_values;
    for (std::size_t i : order) {
      sorted_simplex.push_back(simplex[i]);
      sorted_values.push_back(values[i]);
    }
    simplex = std::move(sorted_simplex);
    values = std::move(sorted_values);

    double spread = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      spread = std::max(spread, (simplex[i] - simplex[0]).cwiseAbs().maxCoeff());
    }
    if (spread <= options.x_tolerance && std::abs(values.back() - values.front()) <= options.f_tolerance) break;
    if (spread <= options.x_tolerance * 1e-3) break;

    const std::size_t worst = simplex.size() - 1;
    Vector centroid = Vector::Zero(d);
    for (std::size_t i = 0; i < worst; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(worst);

    const Vector reflected = clamp_to(centroid + (centroid - simplex[worst]), lo, hi);
    const double f_reflected = eval(reflected);
    if (f_reflected < values.front()) {
      const Vector expanded = clamp_to(centroid + 2.0 * (centroid - simplex[worst]), lo, hi);
      const double f_expanded = eval(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[worst - 1]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Vector contracted = outside ? Vector(clamp_to(centroid + 0.5 * (reflected - centroid), lo, hi))
                                      : Vector(centroid + 0.5 * (simplex[worst] - centroid));
    const double f_contracted = eval(contracted);
    if (f_contracted < std::min(f_reflected, values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    // shrink
    for (std::size_t i = 1; i < simplex.size(); ++i) {
      simplex[i] = simplex[0] + 0.5 * (simplex[i] - simplex[0]);
      values[i] = eval(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  return LocalResult{simplex[best], values[best], evaluations};
}

LocalResult multistart_minimize(const std::function<double(const Vector&)>& objective, const BoxDomain& domain,
                                const MultistartOptions& options) {
  const Eigen::Index d = domain.dimension();
  const int per_dim = std::max(2, options.grid_points_per_dimension);
  long total = 1;
  for (Eigen::Index j = 0; j < d; ++j) total *= per_dim;

  std::vector<Vector> points;
  std::vector<double> values;
  points.reserve(static_cast<std::size_t>(total));
  values.reserve(static_cast<std::size_t>(total));
  Vector unit(d);
  for (long index = 0; index < total; ++index) {
    long rest = index;
    for (Eigen::Index j = 0; j < d; ++j) {
      unit(j) = static_cast<double>(rest % per_dim) / (per_dim - 1);
      rest /= per_dim;
    }
    points.push_back(domain.from_unit(unit));
    values.push_back(finite_or_inf(objective(points.back())));
  }

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  const auto starts = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(1, options.local_starts)));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(starts), order.end(),
                    [&](std::size_t a, std::size_t b) { return values[a] < values[b] || (values[a] == values[b] && a < b); });

  NelderMeadOptions local = options.local;
  local.initial_step = std::min(local.initial_step, 1.0 / (per_dim - 1));

  LocalResult best{points[order[0]], values[order[0]], static_cast<int>(total)};
  for (std::size_t s = 0; s < starts; ++s) {
    LocalResult r = nelder_mead_box(objective, points[order[s]], domain, local);
    best.evaluations += r.evaluations;
    if (r.value < best.value) {
      best.x = std::move(r.x);
      best.value = r.value;
    }
  }
  return best;
}

LocalResult minimize_bounded_bfgs(const ValueGradient& objective, const Vector& start, const Vector& lower,
                                  const Vector& upper, const BfgsOptions& options) {
  const Eigen::Index n = start.size();
  require(lower.size() == n && upper.size() == n, "bound dimensions do not match the start point");

  const auto projected_gradient = [&](const Vector& x, const Vector& g) {
    Vector pg = g;
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((x(i) <= lower(i) && g(i) > 0.0) || (x(i) >= upper(i) && g(i) < 0.0)) pg(i) = 0.0;
    }
    return pg;
  };

  int evaluations = 1;
  Vector x = clamp_to(start, lower, upper);
  Vector g(n);
  double value = objective(x, g);
  if (!std::isfinite(value)) return LocalResult{x, std::numeric_limits<double>::infinity(), evaluations};

  Matrix inverse_hessian = Matrix::Identity(n, n);
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    const Vector pg = projected_gradient(x, g);
    if (pg.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance) break;

    Vector direction = -(inverse_hessian * g);
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((x(i) <= lower(i) && direction(i) < 0.0) || (x(i) >= upper(i) && direction(i) > 0.0)) direction(i) = 0.0;
    }
    if (direction.dot(pg) >= 0.0) {
      inverse_hessian.setIdentity();
      direction = -pg;
    }
    const double length = direction.norm();
    if (length > options.max_step) direction *= options.max_step / length;

    double t = 1.0;
    Vector candidate;
    Vector candidate_gradient(n);
    double candidate_value = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int backtrack = 0; backtrack < 40; ++backtrack, t *= 0.5) {
      candidate = clamp_to(x + t * direction, lower, upper);
      candidate_value = objective(candidate, candidate_gradient);
      ++evaluations;
      if (std::isfinite(candidate_value) && candidate_value <= value + 1e-4 * g.dot(candidate - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;

    const Vector s = candidate - x;
    const Vector y = candidate_gradient - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double r = 1.0 / sy;
      const Matrix left = Matrix::Identity(n, n) - r * s * y.transpose();
      inverse_hessian = left * inverse_hessian * left.transpose() + r * s * s.transpose();
    }

    const double improvement = value - candidate_value;
    x = candidate;
    g = candidate_gradient;
    value = candidate_value;
    if (improvement <= options.value_tolerance * (1.0 + std::abs(value))) break;
  }
  return LocalResult{x, value, evaluations};
}

}  // namespace albo
