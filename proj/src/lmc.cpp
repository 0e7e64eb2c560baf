#include "albo/lmc.hpp"

#include <cmath>
#include <random>

#include <Eigen/SVD>

namespace albo {

EconomySvd economy_svd(const Matrix& c) {
  require(c.allFinite(), "SVD input must be finite");
  const Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeThinV);
  EconomySvd out{svd.matrixU(), svd.singularValues(), svd.matrixV()};
  for (Eigen::Index j = 0; j < out.u.cols(); ++j) {
    Eigen::Index row = 0;
    out.u.col(j).cwiseAbs().maxCoeff(&row);
    if (out.u(row, j) < 0.0) {
      out.u.col(j) *= -1.0;
      out.v.col(j) *= -1.0;
    }
  }
  return out;
}

LMCModel lmc_fit(const Matrix& x, const Matrix& c, const GPFitOptions& options) {
  require(x.rows() == c.rows(), "inputs and constraint observations have different row counts");
  require(c.cols() >= 1, "LMC needs at least one output");
  require(c.rows() >= c.cols(), "LMC needs at least as many observations as outputs");

  EconomySvd svd = economy_svd(c);
  const double largest = svd.singular_values(0);
  const double smallest = svd.singular_values(svd.singular_values.size() - 1);
  if (!(largest > 0.0) || smallest < 1e-12 * largest) {
    throw InvalidArgument("constraint observation matrix is rank deficient");
  }

  LMCModel model;
  model.coupling = svd.v * svd.singular_values.asDiagonal();
  model.observations = c.rows();
  model.score_models.reserve(static_cast<std::size_t>(c.cols()));
  for (Eigen::Index j = 0; j < c.cols(); ++j) model.score_models.push_back(gp_fit(x, svd.u.col(j), options));
  model.scores = std::move(svd.u);
  return model;
}

std::vector<JointPrediction> lmc_predict(const LMCModel& model, const Matrix& queries) {
  require(queries.cols() == model.dimension(), "query points have the wrong dimension");
  const Eigen::Index m = model.outputs();
  Matrix means(queries.rows(), m);
  Matrix variances(queries.rows(), m);
  for (Eigen::Index j = 0; j < m; ++j) {
    BatchPrediction p = model.score_models[static_cast<std::size_t>(j)].predict(queries);
    means.col(j) = p.mean;
    variances.col(j) = p.variance;
  }
  std::vector<JointPrediction> out;
  out.reserve(static_cast<std::size_t>(queries.rows()));
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    Matrix covariance = model.coupling * variances.row(q).asDiagonal() * model.coupling.transpose();
    covariance = 0.5 * (covariance + covariance.transpose()).eval();
    out.push_back(JointPrediction{model.coupling * means.row(q).transpose(), std::move(covariance)});
  }
  return out;
}

JointPrediction lmc_predict(const LMCModel& model, const Vector& x) {
  require(x.size() == model.dimension(), "query point has the wrong dimension");
  return lmc_predict(model, Matrix(x.transpose())).front();
}

Matrix lmc_sample(const LMCModel& model, const Vector& x, int k, std::uint64_t seed) {
  require(k >= 1, "sample count must be positive");
  require(x.size() == model.dimension(), "query point has the wrong dimension");
  const Eigen::Index m = model.outputs();
  Vector mean(m);
  Vector sd(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Prediction p = model.score_models[static_cast<std::size_t>(j)].predict(x);
    mean(j) = p.mean;
    sd(j) = std::sqrt(p.variance);
  }
  Rng rng(seed);
  std::normal_distribution<double> normal;
  Matrix u(k, m);
  for (int s = 0; s < k; ++s) {
    for (Eigen::Index j = 0; j < m; ++j) u(s, j) = mean(j) + sd(j) * normal(rng);
  }
  return u * model.coupling.transpose();
}

double correlation_estimate(const ConstrainedProblem& problem, Eigen::Index i, Eigen::Index j, int n,
                            std::uint64_t seed) {
  require(n >= 2, "correlation needs at least two samples");
  require(i >= 0 && j >= 0 && i < problem.num_constraints() && j < problem.num_constraints(),
          "constraint index out of range");
  Rng rng(seed);
  const Eigen::Index d = problem.dimension();
  Vector a(n);
  Vector b(n);
  Vector unit(d);
  for (int s = 0; s < n; ++s) {
    for (Eigen::Index k = 0; k < d; ++k) unit(k) = uniform01(rng);
    const Vector x = problem.domain.from_unit(unit);
    a(s) = problem.constraints[static_cast<std::size_t>(i)](x);
    b(s) = problem.constraints[static_cast<std::size_t>(j)](x);
  }
  const Vector da = (a.array() - a.mean()).matrix();
  const Vector db = (b.array() - b.mean()).matrix();
  const double saa = da.squaredNorm();
  const double sbb = db.squaredNorm();
  if (!(saa > 0.0) || !(sbb > 0.0)) throw InvalidArgument("constraint sample is constant; correlation undefined");
  if (i == j) return 1.0;
  return da.dot(db) / std::sqrt(saa * sbb);
}

}  // namespace albo
