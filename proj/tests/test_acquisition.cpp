#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "albo/acquisition.hpp"
#include "albo/random.hpp"
#include "albo/strategies.hpp"

using namespace albo;

namespace {

PointPrediction degenerate(double f, Vector c) {
  PointPrediction p;
  p.f_mean = f;
  p.c_factor = Matrix::Zero(c.size(), c.size());
  p.c_mean = std::move(c);
  return p;
}

SurrogateBundle toy_bundle(SurrogateKind kind, int n, std::uint64_t seed) {
  const auto toy = make_toy_original();
  const Matrix x = lhs_sample(n, 2, seed);
  Matrix c(n, 2);
  for (int i = 0; i < n; ++i) c.row(i) = toy.constraint_values(x.row(i).transpose()).transpose();
  if (kind == SurrogateKind::Lmc) return SurrogateBundle{lmc_fit(x, c), toy.objective};
  return SurrogateBundle{std::vector<GPModel>{gp_fit(x, c.col(0)), gp_fit(x, c.col(1))}, toy.objective};
}

}  // namespace

TEST(Ei, DegenerateExact) {
  const ALState s{Vector::Zero(1), 0.5, Variant::WithMax};
  const PointPrediction p = degenerate(0.2, Vector::Constant(1, -0.4));
  const double al = al_value(0.2, Vector::Constant(1, -0.4), s);
  EXPECT_EQ(ei_montecarlo(p, s, al + 0.3, 100, 1), (al + 0.3) - al);
  EXPECT_EQ(ei_montecarlo(p, s, al, 100, 1), 0.0);
  EXPECT_EQ(ei_montecarlo(p, s, al - 1.0, 100, 1), 0.0);
}

TEST(Ei, DegenerateExactPointThree) {
  // AL = 0.5 exactly with best_al = 0.8.
  const ALState s{Vector::Zero(1), 1.0, Variant::NoMax};
  EXPECT_DOUBLE_EQ(ei_montecarlo(degenerate(0.5, Vector::Zero(1)), s, 0.8, 50, 9), 0.3);
}

TEST(Ei, StandardNormalAl) {
  // lambda = 1 and a vanishing penalty make AL = c ~ N(0, 1).
  const ALState s{Vector::Ones(1), 1e300, Variant::WithMax};
  PointPrediction p;
  p.c_mean = Vector::Zero(1);
  p.c_factor = Matrix::Ones(1, 1);
  constexpr int kDraws = 100000;
  const double ei = ei_montecarlo(p, s, 0.0, kDraws, 123);
  const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const double se = std::sqrt((0.5 - phi0 * phi0) / kDraws);
  EXPECT_NEAR(ei, phi0, 3.0 * se);
}

TEST(Ei, NonNegativeAndDeterministic) {
  const SurrogateBundle b = toy_bundle(SurrogateKind::Independent, 10, 3);
  const ALState s{Vector{{0.3, 0.1}}, 0.5, Variant::WithMax};
  Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const Vector x{{uniform01(rng), uniform01(rng)}};
    const double best = 2.0 * uniform01(rng) - 0.5;
    const double ei = ei_montecarlo(b, x, s, best, 200, 7);
    EXPECT_GE(ei, 0.0);
    EXPECT_EQ(ei, ei_montecarlo(b, x, s, best, 200, 7));
  }
  EXPECT_THROW(ei_montecarlo(b, Vector{{0.5, 0.5}}, s, 0.0, 0, 1), InvalidArgument);
}

TEST(Ei, MonotoneInBestAl) {
  const SurrogateBundle b = toy_bundle(SurrogateKind::Lmc, 12, 5);
  const ALState s{Vector{{0.2, 0.0}}, 0.25, Variant::NoMax};
  Rng rng(6);
  for (int k = 0; k < 50; ++k) {
    const Vector x{{uniform01(rng), uniform01(rng)}};
    double previous = 0.0;
    for (double best = -1.0; best <= 3.0; best += 0.25) {
      const double ei = ei_montecarlo(b, x, s, best, 300, 11);
      EXPECT_GE(ei, previous);
      previous = ei;
    }
  }
}

TEST(Ei, StandardErrorScaling) {
  // Spread of the estimator across seeds should fall like k^{-1/2}.
  const ALState s{Vector::Ones(1), 1e300, Variant::WithMax};
  PointPrediction p;
  p.c_mean = Vector::Zero(1);
  p.c_factor = Matrix::Ones(1, 1);
  std::vector<double> log_k, log_sd;
  for (int k : {100, 200, 400, 800, 1600}) {
    std::vector<double> v;
    for (std::uint64_t seed = 0; seed < 400; ++seed) v.push_back(ei_montecarlo(p, s, 0.0, k, seed));
    double mean = 0.0;
    for (double e : v) mean += e;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double e : v) ss += (e - mean) * (e - mean);
    log_k.push_back(std::log(k));
    log_sd.push_back(0.5 * std::log(ss / static_cast<double>(v.size() - 1)));
  }
  double mk = 0.0, ms = 0.0;
  for (std::size_t i = 0; i < log_k.size(); ++i) mk += log_k[i], ms += log_sd[i];
  mk /= static_cast<double>(log_k.size());
  ms /= static_cast<double>(log_k.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < log_k.size(); ++i) {
    num += (log_k[i] - mk) * (log_sd[i] - ms);
    den += (log_k[i] - mk) * (log_k[i] - mk);
  }
  EXPECT_NEAR(num / den, -0.5, 0.1);
}

TEST(ExpectedAl, Examples) {
  const ALState nomax{Vector::Zero(1), 0.5, Variant::NoMax};
  PointPrediction p;
  p.c_mean = Vector::Zero(1);
  p.c_factor = Matrix::Ones(1, 1);
  EXPECT_DOUBLE_EQ(expected_al_nomax(p, nomax), 1.0);

  const ALState s{Vector{{0.4, 1.1}}, 0.3, Variant::NoMax};
  const Vector c{{0.2, -0.7}};
  EXPECT_DOUBLE_EQ(expected_al_nomax(degenerate(0.6, c), s), al_value(0.6, c, s));

  EXPECT_THROW(expected_al_nomax(p, ALState{Vector::Zero(1), 0.5, Variant::WithMax}), InvalidArgument);
}

TEST(ExpectedAl, PenaltyNonNegative) {
  const SurrogateBundle b = toy_bundle(SurrogateKind::Independent, 10, 8);
  const ALState s{Vector{{0.5, 0.2}}, 0.5, Variant::NoMax};
  Rng rng(9);
  for (int k = 0; k < 200; ++k) {
    const Vector x{{uniform01(rng), uniform01(rng)}};
    const PointPrediction p = predict_bundle(b, x);
    EXPECT_GE(expected_al_nomax(b, x, s), p.f_mean + s.lambda.dot(p.c_mean));
  }
}

TEST(ExpectedAl, LmcMatchesMonteCarlo) {
  const SurrogateBundle b = toy_bundle(SurrogateKind::Lmc, 8, 10);
  const ALState s{Vector{{0.3, 0.6}}, 0.5, Variant::NoMax};
  const Vector x{{0.45, 0.15}};
  const PointPrediction p = predict_bundle(b, x);
  ASSERT_GT(p.c_covariance().diagonal().minCoeff(), 1e-6);
  const auto& lmc = std::get<LMCModel>(b.constraints);
  constexpr int kDraws = 1000000;
  const Matrix draws = lmc_sample(lmc, x, kDraws, 21);
  double sum = 0.0, sum_sq = 0.0;
  for (Eigen::Index r = 0; r < draws.rows(); ++r) {
    const double al = al_value(p.f_mean, draws.row(r).transpose(), s);
    sum += al;
    sum_sq += al * al;
  }
  const double mean = sum / kDraws;
  const double se = std::sqrt((sum_sq / kDraws - mean * mean) / kDraws);
  EXPECT_NEAR(expected_al_nomax(b, x, s), mean, 3.0 * se);
}

TEST(Predict, LmcFactorReproducesCovariance) {
  const SurrogateBundle b = toy_bundle(SurrogateKind::Lmc, 10, 14);
  const auto& lmc = std::get<LMCModel>(b.constraints);
  const Vector x{{0.7, 0.2}};
  const PointPrediction p = predict_bundle(b, x);
  const JointPrediction j = lmc_predict(lmc, x);
  EXPECT_LE((p.c_mean - j.mean).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((p.c_covariance() - j.covariance).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Select, SingleCandidate) {
  const SurrogateBundle b = toy_bundle(SurrogateKind::Independent, 10, 15);
  const ALState s{Vector::Zero(2), 0.5, Variant::WithMax};
  const Matrix one = Matrix::Constant(1, 2, 0.3);
  const Selection sel = select_next(b, s, 0.0, one, 50, 1);
  EXPECT_EQ(sel.index, 0);
  EXPECT_EQ(sel.point, Vector::Constant(2, 0.3));
  EXPECT_THROW(select_next(b, s, 0.0, Matrix(0, 2), 50, 1), InvalidArgument);
}

TEST(Select, PrefersPositiveEi) {
  // Constraint pinned at -1 near x = 0; the model reverts to its prior around 0.5.
  Matrix x(4, 1);
  x << 0.0, 0.05, 0.9, 1.0;
  const Vector y{{-1.0, -1.0, 0.5, -0.5}};
  const GPModel gp(x, y, GPHyperparameters{Vector::Constant(1, 0.1), 1.0, 1e-10}, 0.0);
  const SurrogateBundle b{std::vector<GPModel>{gp}, ScalarFunction([](const Vector&) { return 0.0; })};
  const ALState s{Vector::Ones(1), 0.5, Variant::WithMax};
  Matrix candidates(2, 1);
  candidates << 0.0, 0.5;  // first: c = -1 pinned, AL = -1 = best_al; second: uncertain
  const Selection sel = select_next(b, s, -1.0, candidates, 500, 3);
  EXPECT_EQ(sel.index, 1);
  EXPECT_GT(sel.score, 0.0);
}

TEST(Select, TieGoesToLowestIndex) {
  const GPModel gp(Matrix::Constant(2, 1, 0.5) + Matrix(Vector{{0.0, 0.1}}), Vector{{-1.0, -1.0}},
                   GPHyperparameters{Vector::Constant(1, 0.2), 1.0, 1e-8}, -1.0);
  const SurrogateBundle b{std::vector<GPModel>{gp}, ScalarFunction([](const Vector& v) { return v(0); })};
  const ALState s{Vector::Zero(1), 0.5, Variant::WithMax};
  Matrix candidates(3, 1);
  candidates << 0.7, 0.2, 0.2;
  // best_al far below every AL: all scores 0, fallback picks the lowest mean AL, first of the ties.
  const Selection sel = select_next(b, s, -100.0, candidates, 20, 1);
  EXPECT_EQ(sel.index, 1);
  EXPECT_EQ(sel.score, 0.0);
}

TEST(Select, PermutationInvariant) {
  const SurrogateBundle b = toy_bundle(SurrogateKind::Independent, 12, 16);
  const ALState s{Vector{{0.1, 0.0}}, 0.5, Variant::WithMax};
  const Matrix candidates = lhs_sample(1000, 2, 17);
  const Selection base = select_next(b, s, 0.7, candidates, 100, 5);
  ASSERT_GT(base.score, 0.0);
  std::vector<Eigen::Index> order(1000);
  for (Eigen::Index i = 0; i < 1000; ++i) order[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 shuffle_rng(8);
  for (int trial = 0; trial < 3; ++trial) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    Matrix permuted(1000, 2);
    for (Eigen::Index i = 0; i < 1000; ++i) permuted.row(i) = candidates.row(order[static_cast<std::size_t>(i)]);
    const Selection sel = select_next(b, s, 0.7, permuted, 100, 5);
    EXPECT_EQ(sel.point, base.point);
    EXPECT_EQ(sel.score, base.score);
  }
}

TEST(Select, ExpectedAlMode) {
  const SurrogateBundle b = toy_bundle(SurrogateKind::Independent, 10, 18);
  const ALState s{Vector::Zero(2), 0.5, Variant::NoMax};
  const Matrix candidates = lhs_sample(50, 2, 19);
  const Selection sel = select_next(b, s, 0.0, candidates, 10, 1, Acquisition::ExpectedAlNoMax);
  double lowest = 1e300;
  for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
    lowest = std::min(lowest, expected_al_nomax(b, Vector(candidates.row(i).transpose()), s));
  }
  EXPECT_DOUBLE_EQ(-sel.score, lowest);
}

TEST(Acquisition, Ids) {
  EXPECT_EQ(parse_acquisition("ei-mc"), Acquisition::ExpectedImprovement);
  EXPECT_EQ(parse_acquisition("ey-nomax"), Acquisition::ExpectedAlNoMax);
  EXPECT_EQ(to_string(Acquisition::ExpectedAlNoMax), "ey-nomax");
  EXPECT_THROW(parse_acquisition("ucb"), InvalidArgument);
}
