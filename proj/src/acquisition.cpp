#include "albo/acquisition.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <type_traits>

#include "albo/random.hpp"

namespace albo {

Eigen::Index SurrogateBundle::outputs() const {
  return std::visit(
      [](const auto& model) -> Eigen::Index {
        using T = std::decay_t<decltype(model)>;
        if constexpr (std::is_same_v<T, LMCModel>) {
          return model.outputs();
        } else {
          return static_cast<Eigen::Index>(model.size());
        }
      },
      constraints);
}

std::vector<PointPrediction> predict_bundle(const SurrogateBundle& bundle, const Matrix& queries) {
  const Eigen::Index q = queries.rows();
  const Eigen::Index m = bundle.outputs();
  require(m >= 1, "surrogate bundle has no constraint models");
  std::vector<PointPrediction> out(static_cast<std::size_t>(q));

  if (const auto* independent = std::get_if<std::vector<GPModel>>(&bundle.constraints)) {
    Matrix means(q, m);
    Matrix variances(q, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const BatchPrediction p = (*independent)[static_cast<std::size_t>(j)].predict(queries);
      means.col(j) = p.mean;
      variances.col(j) = p.variance;
    }
    for (Eigen::Index i = 0; i < q; ++i) {
      auto& pred = out[static_cast<std::size_t>(i)];
      pred.c_mean = means.row(i).transpose();
      pred.c_factor = variances.row(i).cwiseSqrt().asDiagonal();
    }
  } else {
    const auto& lmc = std::get<LMCModel>(bundle.constraints);
    require(queries.cols() == lmc.dimension(), "query points have the wrong dimension");
    Matrix means(q, m);
    Matrix variances(q, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      const BatchPrediction p = lmc.score_models[static_cast<std::size_t>(j)].predict(queries);
      means.col(j) = p.mean;
      variances.col(j) = p.variance;
    }
    for (Eigen::Index i = 0; i < q; ++i) {
      auto& pred = out[static_cast<std::size_t>(i)];
      pred.c_mean = lmc.coupling * means.row(i).transpose();
      pred.c_factor = lmc.coupling * variances.row(i).cwiseSqrt().asDiagonal();
    }
  }

  if (const auto* known = std::get_if<ScalarFunction>(&bundle.objective)) {
    for (Eigen::Index i = 0; i < q; ++i) out[static_cast<std::size_t>(i)].f_mean = (*known)(queries.row(i).transpose());
  } else {
    const BatchPrediction p = std::get<GPModel>(bundle.objective).predict(queries);
    for (Eigen::Index i = 0; i < q; ++i) {
      out[static_cast<std::size_t>(i)].f_mean = p.mean(i);
      out[static_cast<std::size_t>(i)].f_variance = p.variance(i);
    }
  }
  return out;
}

PointPrediction predict_bundle(const SurrogateBundle& bundle, const Vector& x) {
  return predict_bundle(bundle, Matrix(x.transpose())).front();
}

std::string to_string(Acquisition acquisition) {
  return acquisition == Acquisition::ExpectedImprovement ? "ei-mc" : "ey-nomax";
}

Acquisition parse_acquisition(const std::string& id) {
  if (id == "ei-mc") return Acquisition::ExpectedImprovement;
  if (id == "ey-nomax") return Acquisition::ExpectedAlNoMax;
  throw InvalidArgument("unknown acquisition '" + id + "'");
}

double ei_montecarlo(const PointPrediction& prediction, const ALState& state, double best_al, int k,
                     std::uint64_t seed) {
  require(k >= 1, "Monte-Carlo EI needs at least one draw");
  const Eigen::Index m = prediction.c_mean.size();
  require(state.lambda.size() == m, "multiplier count must match the constraint count");

  // A point mass needs no sampling; this keeps degenerate cases exact.
  if (prediction.f_variance == 0.0 && prediction.c_factor.isZero(0.0)) {
    const double al = augmented_lagrangian(prediction.f_mean, prediction.c_mean, state.lambda, state.rho, state.variant);
    return std::max(0.0, best_al - al);
  }

  Rng rng(seed);
  std::normal_distribution<double> normal;
  const double f_sd = std::sqrt(prediction.f_variance);
  const double inverse_two_rho = 1.0 / (2.0 * state.rho);
  const bool with_max = state.variant == Variant::WithMax;

  Vector z(m);
  Vector c(m);
  double total = 0.0;
  for (int s = 0; s < k; ++s) {
    const double f = f_sd > 0.0 ? prediction.f_mean + f_sd * normal(rng) : prediction.f_mean;
    for (Eigen::Index i = 0; i < m; ++i) z(i) = normal(rng);
    c.noalias() = prediction.c_mean + prediction.c_factor * z;
    double penalty = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double v = with_max ? std::max(0.0, c(i)) : c(i);
      penalty += v * v;
    }
    const double al = f + state.lambda.dot(c) + penalty * inverse_two_rho;
    total += std::max(0.0, best_al - al);
  }
  return total / k;
}

double ei_montecarlo(const SurrogateBundle& bundle, const Vector& x, const ALState& state, double best_al, int k,
                     std::uint64_t seed) {
  return ei_montecarlo(predict_bundle(bundle, x), state, best_al, k, seed);
}

double expected_al_nomax(const PointPrediction& prediction, const ALState& state) {
  require(state.variant == Variant::NoMax, "closed-form expected AL exists only for the NoMax variant");
  require(prediction.f_variance == 0.0, "closed-form expected AL needs a known objective");
  const Matrix covariance = prediction.c_covariance();
  const double second_moment = prediction.c_mean.squaredNorm() + covariance.diagonal().sum();
  return prediction.f_mean + state.lambda.dot(prediction.c_mean) + second_moment / (2.0 * state.rho);
}

double expected_al_nomax(const SurrogateBundle& bundle, const Vector& x, const ALState& state) {
  require(std::holds_alternative<ScalarFunction>(bundle.objective),
          "closed-form expected AL needs a known objective");
  return expected_al_nomax(predict_bundle(bundle, x), state);
}

Selection select_next(const SurrogateBundle& bundle, const ALState& state, double best_al, const Matrix& candidates,
                      int k, std::uint64_t seed, Acquisition acquisition) {
  require(candidates.rows() >= 1, "candidate set is empty");
  const std::vector<PointPrediction> predictions = predict_bundle(bundle, candidates);

  Vector scores(candidates.rows());
  for (Eigen::Index j = 0; j < candidates.rows(); ++j) {
    const PointPrediction& p = predictions[static_cast<std::size_t>(j)];
    if (acquisition == Acquisition::ExpectedImprovement) {
      scores(j) = ei_montecarlo(p, state, best_al, k, derive_seed(seed, hash_point(candidates.row(j))));
    } else {
      scores(j) = -expected_al_nomax(p, state);
    }
  }

  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < scores.size(); ++j) {
    if (scores(j) > scores(best)) best = j;
  }

  // No candidate shows any sampled improvement: fall back to the lowest AL at the predictive mean.
  if (acquisition == Acquisition::ExpectedImprovement && scores(best) <= 0.0) {
    double lowest = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < candidates.rows(); ++j) {
      const PointPrediction& p = predictions[static_cast<std::size_t>(j)];
      const double al = augmented_lagrangian(p.f_mean, p.c_mean, state.lambda, state.rho, state.variant);
      if (al < lowest) {
        lowest = al;
        best = j;
      }
    }
  }
  return Selection{candidates.row(best).transpose(), scores(best), best};
}

}  // namespace albo
