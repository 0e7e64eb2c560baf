#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "albo/lmc.hpp"
#include "albo/random.hpp"

using namespace albo;

namespace {

Matrix uniform_matrix(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) x(i, j) = uniform01(rng);
  return x;
}

Matrix toy_constraints_at(const Matrix& x) {
  const auto toy = make_toy_original();
  Matrix c(x.rows(), 2);
  for (Eigen::Index i = 0; i < x.rows(); ++i) c.row(i) = toy.constraint_values(x.row(i).transpose()).transpose();
  return c;
}

}  // namespace

TEST(Svd, DiagonalExample) {
  Matrix c(2, 2);
  c << 2, 0, 0, 1;
  const EconomySvd svd = economy_svd(c);
  EXPECT_TRUE(svd.u.isApprox(Matrix::Identity(2, 2), 1e-15));
  const Matrix a = svd.v * svd.singular_values.asDiagonal();
  Matrix expected(2, 2);
  expected << 2, 0, 0, 1;
  EXPECT_TRUE(a.isApprox(expected, 1e-15));
}

TEST(Svd, SignConvention) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const EconomySvd svd = economy_svd(uniform_matrix(30, 3, seed).array() - 0.5);
    for (Eigen::Index j = 0; j < 3; ++j) {
      Eigen::Index row = 0;
      svd.u.col(j).cwiseAbs().maxCoeff(&row);
      EXPECT_GT(svd.u(row, j), 0.0);
    }
  }
}

TEST(Svd, ReconstructionAndOrthonormality) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix c = (uniform_matrix(50, 2, seed).array() - 0.5) * 3.0;
    const EconomySvd svd = economy_svd(c);
    const Matrix a = svd.v * svd.singular_values.asDiagonal();
    EXPECT_LE((svd.u * a.transpose() - c).norm(), 1e-10);
    EXPECT_LE((svd.u.transpose() * svd.u - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Fit, ToyConstraints) {
  const Matrix x = lhs_sample(20, 2, 3);
  const Matrix c = toy_constraints_at(x);
  const LMCModel model = lmc_fit(x, c);
  EXPECT_EQ(model.outputs(), 2);
  EXPECT_EQ(model.observations, 20);
  EXPECT_LE((model.scores.transpose() * model.scores - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((model.scores * model.coupling.transpose() - c).norm(), 1e-10);
  // Interpolation at training inputs.
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const JointPrediction p = lmc_predict(model, Vector(x.row(i).transpose()));
    EXPECT_LE((p.mean - c.row(i).transpose()).cwiseAbs().maxCoeff(), 1e-4);
  }
}

TEST(Fit, Deterministic) {
  const Matrix x = lhs_sample(15, 2, 8);
  const Matrix c = toy_constraints_at(x);
  const LMCModel a = lmc_fit(x, c);
  const LMCModel b = lmc_fit(x, c);
  EXPECT_EQ(a.coupling, b.coupling);
  const Vector q{{0.3, 0.6}};
  EXPECT_EQ(lmc_predict(a, q).mean, lmc_predict(b, q).mean);
}

TEST(Fit, Errors) {
  const Matrix x = uniform_matrix(5, 2, 1);
  Matrix c(5, 2);
  c.col(0) = Vector::LinSpaced(5, 0.0, 1.0);
  c.col(1) = 2.0 * c.col(0);
  EXPECT_THROW(lmc_fit(x, c), InvalidArgument);
  EXPECT_THROW(lmc_fit(x.topRows(1), uniform_matrix(1, 2, 2)), InvalidArgument);
}

TEST(Predict, IdentityCouplingMatchesIndependent) {
  const Matrix x = lhs_sample(12, 2, 4);
  const Matrix c = toy_constraints_at(x);
  LMCModel model;
  model.coupling = Matrix::Identity(2, 2);
  model.scores = c;
  model.observations = 12;
  std::vector<GPModel> independent;
  for (int j = 0; j < 2; ++j) independent.push_back(gp_fit(x, c.col(j)));
  model.score_models = independent;
  const Matrix q = uniform_matrix(50, 2, 5);
  const auto joint = lmc_predict(model, q);
  for (Eigen::Index i = 0; i < q.rows(); ++i) {
    for (int j = 0; j < 2; ++j) {
      const Prediction p = independent[static_cast<std::size_t>(j)].predict(Vector(q.row(i).transpose()));
      EXPECT_NEAR(joint[static_cast<std::size_t>(i)].mean(j), p.mean, 1e-9);
      EXPECT_NEAR(joint[static_cast<std::size_t>(i)].covariance(j, j), p.variance, 1e-9);
    }
    EXPECT_EQ(joint[static_cast<std::size_t>(i)].covariance(0, 1), 0.0);
  }
}

TEST(Predict, OrthogonalEqualNormColumnsMatchIndependent) {
  // Columns orthogonal with equal norms: the coupling is a signed identity.
  const Matrix x = lhs_sample(8, 1, 6);
  Matrix c(8, 2);
  c << 1, 1, 1, -1, -1, 1, -1, -1, 1, 1, 1, -1, -1, 1, -1, -1;
  c.col(0).array() *= Vector{{1, 1, 1, 1, -1, -1, -1, -1}}.array();
  ASSERT_NEAR(c.col(0).dot(c.col(1)), 0.0, 1e-15);
  const LMCModel model = lmc_fit(x, c);
  std::vector<GPModel> independent;
  for (int j = 0; j < 2; ++j) independent.push_back(gp_fit(x, c.col(j)));
  for (double t = 0.0; t <= 1.0; t += 0.05) {
    const Vector q = Vector::Constant(1, t);
    const JointPrediction p = lmc_predict(model, q);
    for (int j = 0; j < 2; ++j) EXPECT_NEAR(p.mean(j), independent[static_cast<std::size_t>(j)].predict(q).mean, 1e-6);
  }
}

TEST(Predict, CovarianceSymmetricPsd) {
  const Matrix x = lhs_sample(20, 2, 9);
  const LMCModel model = lmc_fit(x, toy_constraints_at(x));
  for (const JointPrediction& p : lmc_predict(model, uniform_matrix(1000, 2, 10))) {
    EXPECT_EQ(p.covariance, p.covariance.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(p.covariance);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(Predict, CovarianceMatchesMonteCarlo) {
  const Matrix x = lhs_sample(10, 2, 12);
  const LMCModel model = lmc_fit(x, toy_constraints_at(x));
  const Vector q{{0.37, 0.81}};
  const JointPrediction p = lmc_predict(model, q);
  constexpr int kDraws = 200000;
  const Matrix draws = lmc_sample(model, q, kDraws, 77);
  const Vector mean = draws.colwise().mean();
  const Matrix centred = draws.rowwise() - mean.transpose();
  const Matrix cov = centred.transpose() * centred / (kDraws - 1);
  for (int a = 0; a < 2; ++a) {
    EXPECT_NEAR(mean(a), p.mean(a), 4.0 * std::sqrt(p.covariance(a, a) / kDraws));
    for (int b = 0; b < 2; ++b) {
      const double se = std::sqrt((p.covariance(a, a) * p.covariance(b, b) + p.covariance(a, b) * p.covariance(a, b)) /
                                  kDraws);
      EXPECT_NEAR(cov(a, b), p.covariance(a, b), 3.0 * se + 1e-15);
    }
  }
  if (std::abs(p.covariance(0, 1)) > 1e-3 * std::sqrt(p.covariance(0, 0) * p.covariance(1, 1))) {
    EXPECT_EQ(cov(0, 1) > 0, p.covariance(0, 1) > 0);
  }
}

TEST(Sample, ZeroVarianceAndDeterminism) {
  const Matrix x = lhs_sample(10, 2, 13);
  const Matrix c = toy_constraints_at(x);
  const LMCModel model = lmc_fit(x, c);
  // At a training input the posterior variance is at the nugget level.
  const Vector at = x.row(0).transpose();
  const Matrix draws = lmc_sample(model, at, 100, 3);
  EXPECT_LE((draws.rowwise() - c.row(0)).cwiseAbs().maxCoeff(), 1e-3);
  EXPECT_EQ(draws, lmc_sample(model, at, 100, 3));
  EXPECT_NE(draws, lmc_sample(model, at, 100, 4));

  LMCModel fixed = model;
  for (GPModel& gp : fixed.score_models) {
    GPHyperparameters h = gp.hyperparameters();
    h.signal_variance = 1e-300;
    gp = GPModel(gp.inputs(), gp.outputs(), h, gp.mean_offset());
  }
  const Matrix flat = lmc_sample(fixed, Vector{{0.5, 0.5}}, 50, 1);
  const Vector m = lmc_predict(fixed, Vector{{0.5, 0.5}}).mean;
  for (Eigen::Index s = 0; s < flat.rows(); ++s) EXPECT_EQ(flat.row(s), m.transpose());
}

TEST(Correlation, ToyConstraints) {
  const auto toy = make_toy_original();
  const double r = correlation_estimate(toy, 0, 1, 10000, 1);
  EXPECT_NEAR(r, -0.8, 0.05);
  EXPECT_EQ(correlation_estimate(toy, 1, 1, 1000, 2), 1.0);
}

TEST(Correlation, DisjointCoordinatesUncorrelated) {
  ConstrainedProblem p{.name = "disjoint",
                       .objective = [](const Vector&) { return 0.0; },
                       .constraints = {[](const Vector& x) { return std::sin(6 * x(0)); },
                                       [](const Vector& x) { return x(1) * x(1); }},
                       .domain = BoxDomain::unit(2),
                       .known_optimum = std::nullopt};
  EXPECT_LE(std::abs(correlation_estimate(p, 0, 1, 10000, 5)), 0.05);
}

TEST(Correlation, Errors) {
  ConstrainedProblem p{.name = "flat",
                       .objective = [](const Vector&) { return 0.0; },
                       .constraints = {[](const Vector&) { return 1.0; }, [](const Vector& x) { return x(0); }},
                       .domain = BoxDomain::unit(1),
                       .known_optimum = std::nullopt};
  EXPECT_THROW(correlation_estimate(p, 0, 1, 100, 1), InvalidArgument);
  EXPECT_THROW(correlation_estimate(p, 0, 2, 100, 1), InvalidArgument);
  EXPECT_THROW(correlation_estimate(p, 1, 1, 1, 1), InvalidArgument);
}
