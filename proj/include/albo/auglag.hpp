#pragma once

#include <string>

#include "albo/problems.hpp"
#include "albo/types.hpp"

namespace albo {

enum class Variant { WithMax, NoMax };

std::string to_string(Variant variant);
Variant parse_variant(const std::string& id);

/// Multipliers (componentwise >= 0), penalty rho > 0 and the AL variant.
struct ALState {
  Vector lambda;
  double rho = 0.5;
  Variant variant = Variant::WithMax;
};

void validate(const ALState& state);

/// WithMax: f + lambda^T c + sum_i max(0, c_i)^2 / (2 rho)
/// NoMax:   f + lambda^T c + sum_i c_i^2 / (2 rho)
template <typename DerivedC, typename DerivedL>
typename DerivedC::Scalar augmented_lagrangian(typename DerivedC::Scalar f, const Eigen::MatrixBase<DerivedC>& c,
                                               const Eigen::MatrixBase<DerivedL>& lambda,
                                               typename DerivedC::Scalar rho, Variant variant) {
  using Scalar = typename DerivedC::Scalar;
  const Scalar penalty = variant == Variant::WithMax ? c.cwiseMax(Scalar(0)).squaredNorm() : c.squaredNorm();
  return f + lambda.dot(c) + penalty / (Scalar(2) * rho);
}

/// Checked entry point: rejects non-finite inputs and mismatched sizes.
double al_value(double f, const Vector& c, const ALState& state);

/// lambda_i <- max(0, lambda_i + c_i / rho); rho unchanged.
ALState update_multipliers(const ALState& state, const Vector& c);

/// Halves rho when no progress was made, never going below kMinRho.
ALState update_rho(const ALState& state, bool made_progress);

inline constexpr double kMinRho = 1e-12;

struct KKTReport {
  double stationarity = 0.0;
  double feasibility = 0.0;
  double complementarity = 0.0;
  Vector multipliers;
};

/// First-order residuals at (x, lambda). Gradients by central differences with
/// relative step 1e-6; gradient components pushing against an active box bound
/// are projected out.
KKTReport kkt_residual(const ConstrainedProblem& problem, const Vector& x, const Vector& lambda);

struct SaddleResult {
  Vector x;
  KKTReport report;
  ALState state;
  int outer_iterations = 0;
};

/// Classical AL outer loop: minimize the AL over the box (grid multistart plus
/// Nelder-Mead). If the constraint violation is within a tolerance that halves on
/// every accepted step, update the multipliers; otherwise halve rho and keep them.
/// Stops after 100 outer iterations or when (x, lambda, rho) stop moving.
SaddleResult al_saddle_check(const ConstrainedProblem& problem, const ALState& initial, const Vector& start);

}  // namespace albo
