#pragma once

#include <limits>

#include "pops/dataset.hpp"

namespace pops {

/// Default aleatoric variance for deterministic data.
inline constexpr double kDefaultNoiseVar = 1e-8;

/// Relative size below which a discrepancy between a target and a linear
/// prediction is floating-point rounding rather than model error.
inline constexpr double kRoundoffTol = 1024.0 * std::numeric_limits<double>::epsilon();

/// Weighted minimum-loss fit of a linear surrogate under an isotropic
/// Gaussian prior with precision `prior_precision_scale * I`.
///
///   A      = [noise_var * alpha / N * I + <f f^T>]^-1
///   theta* = A <f y>
///
/// where <.> is the weighted average over training rows.
struct RidgeFit {
  VectorXd theta_star;
  MatrixXd a_matrix;
  double noise_var = kDefaultNoiseVar;
  double prior_precision_scale = 0.0;
  Index n_train = 0;
  /// Weighted mean squared residual at theta_star.
  double loss_residual_var = 0.0;

  Index dim() const noexcept { return theta_star.size(); }
  /// Ridge term added to the second-moment matrix: noise_var * alpha / N.
  double ridge_term() const noexcept {
    return noise_var * prior_precision_scale / static_cast<double>(n_train);
  }
};

/// Weighted second moment <f f^T>.
MatrixXd second_moment(const Dataset& data);

/// 1e-10 * Tr(<f f^T>) / P.
double default_prior_precision(const Dataset& data);

RidgeFit fit_min_loss(const Dataset& data, double prior_precision_scale, double noise_var = kDefaultNoiseVar);

/// y - theta*.f per row. Residuals within floating-point rounding of the
/// prediction are reported as exactly zero, so a specified model yields zero
/// residuals rather than rounding noise.
VectorXd residuals(const RidgeFit& fit, const Dataset& data);

/// True when every training residual vanished (loss_residual_var == 0).
inline bool appears_specified(const RidgeFit& fit) noexcept { return fit.loss_residual_var == 0.0; }

struct EpistemicPrediction {
  double mean = 0.0;
  double std = 0.0;
};

/// Laplace posterior predictive: mean theta*.f, variance (noise_var / N) f^T A f.
EpistemicPrediction epistemic_predict(const RidgeFit& fit, const Eigen::Ref<const VectorXd>& f);

/// Bayesian information criterion with the aleatoric variance held fixed:
/// N * loss_residual_var / noise_var + P ln N + ln det(<f f^T> / noise_var).
double bic_deterministic(const RidgeFit& fit, const Dataset& data);

}  // namespace pops
