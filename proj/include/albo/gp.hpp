#pragma once

#include <cmath>
#include <cstdint>

#include <Eigen/Cholesky>

#include "albo/types.hpp"

namespace albo {

/// Anisotropic squared-exponential kernel
///   k(a, b) = s2 * exp(-sum_j (a_j - b_j)^2 / (2 l_j^2)).
template <typename DerivedA, typename DerivedB, typename DerivedL>
typename DerivedA::Scalar squared_exponential(const Eigen::MatrixBase<DerivedA>& a,
                                              const Eigen::MatrixBase<DerivedB>& b,
                                              const Eigen::MatrixBase<DerivedL>& lengthscales,
                                              typename DerivedA::Scalar signal_variance) {
  using std::exp;
  const auto scaled = (a - b).cwiseQuotient(lengthscales);
  return signal_variance * exp(-typename DerivedA::Scalar(0.5) * scaled.squaredNorm());
}

/// Correlation matrix R(i, j) = exp(-sum_k (x1_ik - x2_jk)^2 / (2 l_k^2)).
Matrix se_correlation(const Matrix& x1, const Matrix& x2, const Vector& lengthscales);

/// Latin hypercube sample of n points in [0,1)^d: every column puts exactly one
/// point in each interval [k/n, (k+1)/n).
Matrix lhs_sample(int n, int d, std::uint64_t seed);

struct GPHyperparameters {
  Vector lengthscales;
  double signal_variance = 1.0;
  /// Added to the correlation diagonal, so the covariance is s2 * (R + nugget * I).
  double nugget = 1e-8;
};

struct GPFitOptions {
  int starts = 5;
  double min_lengthscale = 1e-2;
  double max_lengthscale = 1e2;
  double min_signal_variance = 1e-6;
  double max_signal_variance = 1e2;
  double nugget = 1e-8;
  double max_nugget = 1e-4;
};

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

struct BatchPrediction {
  Vector mean;
  Vector variance;
};

/// Zero-mean-after-offset GP conditioned on (X, y). Immutable once built.
class GPModel {
 public:
  /// Conditions on the data with fixed hyperparameters. The nugget is escalated
  /// by factors of 10 up to `max_nugget` if the covariance is not positive definite.
  GPModel(Matrix x, Vector y, GPHyperparameters hyperparameters, double mean_offset, double max_nugget = 1e-4);

  const Matrix& inputs() const { return x_; }
  const Vector& outputs() const { return y_; }
  const Vector& lengthscales() const { return hyper_.lengthscales; }
  double signal_variance() const { return hyper_.signal_variance; }
  double nugget() const { return hyper_.nugget; }
  double mean_offset() const { return mean_offset_; }
  const GPHyperparameters& hyperparameters() const { return hyper_; }
  Eigen::Index dimension() const { return x_.cols(); }
  Eigen::Index size() const { return x_.rows(); }

  /// Lower Cholesky factor of the training covariance.
  Matrix factor() const { return llt_.matrixL(); }

  Prediction predict(const Vector& x) const;
  BatchPrediction predict(const Matrix& queries) const;

  double log_marginal_likelihood() const;

 private:
  Matrix x_;
  Vector y_;
  GPHyperparameters hyper_;
  double mean_offset_ = 0.0;
  Eigen::LLT<Matrix> llt_;
  Vector alpha_;
};

/// Fits hyperparameters by maximizing the log marginal likelihood (multistart
/// quasi-Newton in log space) and conditions on the data.
GPModel gp_fit(const Matrix& x, const Vector& y, const GPFitOptions& options = {});

inline Prediction gp_predict(const GPModel& model, const Vector& x) { return model.predict(x); }
inline BatchPrediction gp_predict(const GPModel& model, const Matrix& queries) { return model.predict(queries); }
inline double log_marginal_likelihood(const GPModel& model) { return model.log_marginal_likelihood(); }

/// Log marginal likelihood of y - mean_offset under N(0, s2 (R + nugget I)).
/// When `gradient` is non-null it receives the derivative with respect to
/// (log l_1, ..., log l_d, log s2). Throws FactorizationError if the covariance
/// is not positive definite.
double log_marginal_likelihood(const Matrix& x, const Vector& y, double mean_offset, const GPHyperparameters& hyper,
                               Vector* gradient = nullptr);

}  // namespace albo
