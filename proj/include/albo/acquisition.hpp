#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "albo/auglag.hpp"
#include "albo/gp.hpp"
#include "albo/lmc.hpp"
#include "albo/problems.hpp"

namespace albo {

using ConstraintSurrogate = std::variant<std::vector<GPModel>, LMCModel>;
using ObjectiveModel = std::variant<ScalarFunction, GPModel>;

/// Constraint emulator(s) plus the objective, which is known in closed form by default.
struct SurrogateBundle {
  ConstraintSurrogate constraints;
  ObjectiveModel objective;

  Eigen::Index outputs() const;
};

/// Predictive distribution at one point. c ~ N(c_mean, c_factor c_factor^T).
struct PointPrediction {
  double f_mean = 0.0;
  double f_variance = 0.0;
  Vector c_mean;
  Matrix c_factor;

  Matrix c_covariance() const { return c_factor * c_factor.transpose(); }
};

std::vector<PointPrediction> predict_bundle(const SurrogateBundle& bundle, const Matrix& queries);
PointPrediction predict_bundle(const SurrogateBundle& bundle, const Vector& x);

enum class Acquisition { ExpectedImprovement, ExpectedAlNoMax };

std::string to_string(Acquisition acquisition);
Acquisition parse_acquisition(const std::string& id);  // "ei-mc" or "ey-nomax"

inline constexpr int kDefaultMcDraws = 1000;

/// Monte-Carlo E[max(0, best_al - AL(x))] over k joint draws of (f, c).
double ei_montecarlo(const PointPrediction& prediction, const ALState& state, double best_al, int k,
                     std::uint64_t seed);
double ei_montecarlo(const SurrogateBundle& bundle, const Vector& x, const ALState& state, double best_al, int k,
                     std::uint64_t seed);

/// Closed-form E[AL] for the NoMax variant with a known objective:
/// f + lambda^T mu + sum_i (mu_i^2 + Sigma_ii) / (2 rho).
double expected_al_nomax(const PointPrediction& prediction, const ALState& state);
double expected_al_nomax(const SurrogateBundle& bundle, const Vector& x, const ALState& state);

struct Selection {
  Vector point;
  double score = 0.0;
  Eigen::Index index = 0;
};

/// Maximizes the acquisition over the candidate rows. Candidate scoring draws from
/// a substream keyed by the candidate's coordinates, so the choice does not depend
/// on row order. Ties go to the lowest row index.
Selection select_next(const SurrogateBundle& bundle, const ALState& state, double best_al, const Matrix& candidates,
                      int k, std::uint64_t seed, Acquisition acquisition = Acquisition::ExpectedImprovement);

}  // namespace albo
