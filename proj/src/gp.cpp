#include "albo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <utility>
#include <vector>

#include "albo/local_search.hpp"
#include "albo/random.hpp"

namespace albo {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

bool all_finite(const Matrix& m) { return m.allFinite(); }

// Builds s2 * (R + nugget I) and factorizes it; escalates the nugget on failure.
Eigen::LLT<Matrix> factorize(const Matrix& x, GPHyperparameters& hyper, double max_nugget) {
  const Matrix correlation = se_correlation(x, x, hyper.lengthscales);
  for (;;) {
    Matrix k = correlation;
    k.diagonal().array() += hyper.nugget;
    k *= hyper.signal_variance;
    Eigen::LLT<Matrix> llt(k);
    if (llt.info() == Eigen::Success) return llt;
    const double next = hyper.nugget > 0.0 ? hyper.nugget * 10.0 : 1e-10;
    if (next > max_nugget * (1.0 + 1e-12)) {
      throw FactorizationError("GP covariance is not positive definite even with nugget " +
                               std::to_string(hyper.nugget));
    }
    hyper.nugget = next;
  }
}

// Sum_ij m_ij (x_ik - x_jk)^2 for each column k, m symmetric.
Vector weighted_square_distances(const Matrix& m, const Matrix& x) {
  const Vector row_sums = m.rowwise().sum();
  Vector out(x.cols());
  for (Eigen::Index k = 0; k < x.cols(); ++k) {
    const auto col = x.col(k);
    out(k) = 2.0 * col.cwiseAbs2().dot(row_sums) - 2.0 * col.dot(m * col);
  }
  return out;
}

struct ProfileResult {
  double negative_lml = std::numeric_limits<double>::infinity();
  double signal_variance = 1.0;
};

// Negative log likelihood with the signal variance profiled out (closed-form
// maximizer clamped to its bounds), as a function of log lengthscales.
ProfileResult negative_profile_lml(const Matrix& x, const Vector& centered, const Vector& log_lengthscales,
                                   double nugget, const GPFitOptions& options, Vector* gradient) {
  const auto n = static_cast<double>(x.rows());
  const Vector lengthscales = log_lengthscales.array().exp();
  const Matrix correlation = se_correlation(x, x, lengthscales);
  Matrix r = correlation;
  r.diagonal().array() += nugget;
  const Eigen::LLT<Matrix> llt(r);
  ProfileResult result;
  if (llt.info() != Eigen::Success) return result;

  const Vector alpha = llt.solve(centered);
  const double quad = centered.dot(alpha);
  const double s2 = std::clamp(quad / n, options.min_signal_variance, options.max_signal_variance);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  result.negative_lml = 0.5 * (quad / s2 + log_det + n * std::log(s2) + n * kLog2Pi);
  result.signal_variance = s2;

  if (gradient != nullptr) {
    const Matrix r_inverse = llt.solve(Matrix::Identity(x.rows(), x.rows()));
    Matrix w = (alpha * alpha.transpose()) / s2 - r_inverse;
    w.array() *= correlation.array();
    const Vector sums = weighted_square_distances(w, x);
    // d lml / d log l_k = 0.5 * sum_ij w_ij (x_ik - x_jk)^2 / l_k^2
    *gradient = -0.5 * sums.cwiseQuotient(lengthscales.cwiseAbs2());
  }
  if (!std::isfinite(result.negative_lml)) result.negative_lml = std::numeric_limits<double>::infinity();
  return result;
}

}  // namespace

Matrix se_correlation(const Matrix& x1, const Matrix& x2, const Vector& lengthscales) {
  require(x1.cols() == x2.cols() && x1.cols() == lengthscales.size(), "kernel input dimensions do not match");
  const Vector inverse = lengthscales.cwiseInverse();
  const Matrix a = x1 * inverse.asDiagonal();
  const Matrix b = x2 * inverse.asDiagonal();
  Matrix out(x1.rows(), x2.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out(i, j) = std::exp(-0.5 * (a.row(i) - b.row(j)).squaredNorm());
    }
  }
  return out;
}

Matrix lhs_sample(int n, int d, std::uint64_t seed) {
  require(n >= 1 && d >= 1, "Latin hypercube needs n >= 1 and d >= 1");
  Rng rng(seed);
  Matrix out(n, d);
  std::vector<int> strata(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    // Fisher-Yates with our own uniform draws keeps the design identical across standard libraries.
    for (int i = n - 1; i > 0; --i) {
      const auto k = static_cast<int>(uniform01(rng) * (i + 1));
      std::swap(strata[static_cast<std::size_t>(i)], strata[static_cast<std::size_t>(k)]);
    }
    for (int i = 0; i < n; ++i) {
      const double v = (strata[static_cast<std::size_t>(i)] + uniform01(rng)) / n;
      out(i, j) = std::min(v, std::nextafter(static_cast<double>(strata[static_cast<std::size_t>(i)] + 1) / n, 0.0));
    }
  }
  return out;
}

GPModel::GPModel(Matrix x, Vector y, GPHyperparameters hyperparameters, double mean_offset, double max_nugget)
    : x_(std::move(x)), y_(std::move(y)), hyper_(std::move(hyperparameters)), mean_offset_(mean_offset) {
  require(x_.rows() >= 1, "GP needs at least one training point");
  require(x_.rows() == y_.size(), "GP inputs and outputs have different lengths");
  require(hyper_.lengthscales.size() == x_.cols(), "lengthscale count must match the input dimension");
  require((hyper_.lengthscales.array() > 0.0).all(), "lengthscales must be positive");
  require(hyper_.signal_variance > 0.0, "signal variance must be positive");
  require(hyper_.nugget >= 0.0, "nugget must be non-negative");
  require(all_finite(x_) && y_.allFinite() && std::isfinite(mean_offset_), "GP training data must be finite");
  llt_ = factorize(x_, hyper_, max_nugget);
  alpha_ = llt_.solve((y_.array() - mean_offset_).matrix());
}

Prediction GPModel::predict(const Vector& x) const {
  require(x.size() == dimension(), "query point has the wrong dimension");
  const BatchPrediction batch = predict(Matrix(x.transpose()));
  return Prediction{batch.mean(0), batch.variance(0)};
}

BatchPrediction GPModel::predict(const Matrix& queries) const {
  require(queries.cols() == dimension(), "query points have the wrong dimension");
  const Matrix cross = hyper_.signal_variance * se_correlation(x_, queries, hyper_.lengthscales);
  BatchPrediction out;
  out.mean = (cross.transpose() * alpha_).array() + mean_offset_;
  const Matrix v = llt_.matrixL().solve(cross);
  out.variance = (hyper_.signal_variance - v.colwise().squaredNorm().transpose().array()).cwiseMax(0.0);
  return out;
}

double GPModel::log_marginal_likelihood() const {
  const auto n = static_cast<double>(size());
  const Vector centered = (y_.array() - mean_offset_).matrix();
  const double log_det = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  return -0.5 * (centered.dot(alpha_) + log_det + n * kLog2Pi);
}

double log_marginal_likelihood(const Matrix& x, const Vector& y, double mean_offset, const GPHyperparameters& hyper,
                               Vector* gradient) {
  require(x.rows() == y.size(), "GP inputs and outputs have different lengths");
  const auto n = static_cast<double>(x.rows());
  const Matrix correlation = se_correlation(x, x, hyper.lengthscales);
  Matrix k = correlation;
  k.diagonal().array() += hyper.nugget;
  k *= hyper.signal_variance;
  const Eigen::LLT<Matrix> llt(k);
  if (llt.info() != Eigen::Success) throw FactorizationError("GP covariance is not positive definite");

  const Vector centered = (y.array() - mean_offset).matrix();
  const Vector alpha = llt.solve(centered);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const double value = -0.5 * (centered.dot(alpha) + log_det + n * kLog2Pi);

  if (gradient != nullptr) {
    const Matrix k_inverse = llt.solve(Matrix::Identity(x.rows(), x.rows()));
    Matrix w = alpha * alpha.transpose() - k_inverse;
    const double signal_term = 0.5 * (w.array() * k.array()).sum();
    w.array() *= hyper.signal_variance * correlation.array();
    const Vector sums = weighted_square_distances(w, x);
    gradient->resize(x.cols() + 1);
    gradient->head(x.cols()) = 0.5 * sums.cwiseQuotient(hyper.lengthscales.cwiseAbs2());
    (*gradient)(x.cols()) = signal_term;
  }
  return value;
}

GPModel gp_fit(const Matrix& x, const Vector& y, const GPFitOptions& options) {
  require(x.rows() >= 2, "GP fit needs at least two observations");
  require(x.rows() == y.size(), "GP inputs and outputs have different lengths");
  require(x.allFinite() && y.allFinite(), "GP training data must be finite");
  require(options.starts >= 1, "GP fit needs at least one start");

  const Eigen::Index d = x.cols();
  const double mean_offset = y.mean();
  const Vector centered = (y.array() - mean_offset).matrix();

  const Vector lower = Vector::Constant(d, std::log(options.min_lengthscale));
  const Vector upper = Vector::Constant(d, std::log(options.max_lengthscale));
  Vector range = x.colwise().maxCoeff() - x.colwise().minCoeff();
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(range(j) > 0.0)) range(j) = 1.0;
  }

  static constexpr double kStartScales[] = {0.5, 0.15, 1.5, 0.05, 5.0};
  const BfgsOptions bfgs{.max_iterations = 40, .gradient_tolerance = 1e-5, .value_tolerance = 1e-9, .max_step = 2.0};

  for (double nugget = options.nugget;; nugget *= 10.0) {
    Vector best_log;
    double best_value = std::numeric_limits<double>::infinity();
    const ValueGradient objective = [&](const Vector& theta, Vector& gradient) {
      return negative_profile_lml(x, centered, theta, nugget, options, &gradient).negative_lml;
    };
    for (int s = 0; s < options.starts; ++s) {
      const double scale = kStartScales[s % 5] * std::pow(3.0, s / 5);
      const Vector start = (range * scale).array().log().matrix().cwiseMax(lower).cwiseMin(upper);
      const LocalResult r = minimize_bounded_bfgs(objective, start, lower, upper, bfgs);
      if (r.value < best_value) {
        best_value = r.value;
        best_log = r.x;
      }
    }

    if (std::isfinite(best_value)) {
      const ProfileResult best = negative_profile_lml(x, centered, best_log, nugget, options, nullptr);
      GPHyperparameters hyper{.lengthscales = best_log.array().exp(),
                              .signal_variance = best.signal_variance,
                              .nugget = nugget};
      return GPModel(x, y, std::move(hyper), mean_offset, options.max_nugget);
    }
    if (nugget * 10.0 > options.max_nugget * (1.0 + 1e-12)) {
      throw FactorizationError("GP fit failed: covariance not positive definite at nugget " + std::to_string(nugget));
    }
  }
}

}  // namespace albo
