#pragma once

#include <cstdint>
#include <vector>

#include "albo/gp.hpp"
#include "albo/problems.hpp"
#include "albo/random.hpp"
#include "albo/types.hpp"

namespace albo {

/// Economy SVD C = U S V^T with a pinned sign convention: the largest-magnitude
/// entry of every U column is positive.
struct EconomySvd {
  Matrix u;               // n x m, orthonormal columns
  Vector singular_values;  // m, descending
  Matrix v;               // m x m
};

EconomySvd economy_svd(const Matrix& c);

/// Correlated outputs c(x) = A u(x) with independent GPs u_i fitted to the
/// columns of U and A = V S from the SVD of the observed outputs.
struct LMCModel {
  Matrix coupling;                   // A, m x m
  Matrix scores;                     // U, n x m
  std::vector<GPModel> score_models;  // one per column of U
  Eigen::Index observations = 0;

  Eigen::Index outputs() const { return coupling.rows(); }
  Eigen::Index dimension() const { return score_models.front().dimension(); }
};

struct JointPrediction {
  Vector mean;
  Matrix covariance;
};

LMCModel lmc_fit(const Matrix& x, const Matrix& c, const GPFitOptions& options = {});

JointPrediction lmc_predict(const LMCModel& model, const Vector& x);
std::vector<JointPrediction> lmc_predict(const LMCModel& model, const Matrix& queries);

/// k draws (one per row) of c(x): u_i sampled independently from each score
/// posterior, then mapped through A.
Matrix lmc_sample(const LMCModel& model, const Vector& x, int k, std::uint64_t seed);

/// Pearson correlation of constraints i and j over n uniform samples of the box.
double correlation_estimate(const ConstrainedProblem& problem, Eigen::Index i, Eigen::Index j, int n,
                            std::uint64_t seed);

}  // namespace albo
