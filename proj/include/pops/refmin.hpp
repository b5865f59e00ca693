#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pops/bayes_ridge.hpp"

namespace pops {

/// Desk-scale limits for direct minimization.
inline constexpr Index kRefminMaxFeatures = 8;
inline constexpr Index kRefminMaxRows = 1000;

enum class GeInit { MinLossJitter, PopsEnsemble };

struct GeConfig {
  /// Ensemble size K; 0 means one member per training row.
  Index members = 0;
  /// Aleatoric regularization: variance sigma_scale * loss_residual_var.
  double sigma_scale = 1.0;
  Index max_iters = 20000;
  /// Largest trial step of the backtracking line search. The gradient of
  /// each member carries a 1/K factor, so unit steps crawl.
  double step_size = 1000.0;
  GeInit init = GeInit::MinLossJitter;
  std::uint64_t seed = 0;
};

struct GeIterate {
  Index iter = 0;
  double objective = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  /// max_k |theta_k - theta*|
  double max_spread = 0.0;
};

enum class GeStatus { Converged, IterationCap, Stalled };

const char* to_string(GeStatus status) noexcept;

struct GeResult {
  MatrixXd members;  // K x P
  double ge_value = 0.0;
  double initial_value = 0.0;
  bool converged = false;
  GeStatus status = GeStatus::IterationCap;
  Index iterations = 0;
  std::vector<GeIterate> log;
};

/// Discrete generalization error of a uniformly weighted ensemble,
///   G_E = -sum_j w_j ln[(1/K) sum_k N(y_j | theta_k.f_j, variance)],
/// evaluated with log-sum-exp. Writes dG/dtheta_k into row k of `gradient`
/// when given.
double ge_objective(const Dataset& data, const MatrixXd& members, double variance, MatrixXd* gradient = nullptr);

/// Starting ensemble for the given configuration.
MatrixXd initial_members(const Dataset& data, const RidgeFit& fit, const GeConfig& cfg);

/// Gradient descent with halving backtracking (Armijo) on G_E. Stops when the
/// gradient norm drops below 1e-6, at the iteration cap, or when no step
/// decreases the objective. Non-convergence is reported, not thrown; a
/// non-finite objective or gradient throws ScaleTooSmall.
GeResult minimize_ge(const Dataset& data, const RidgeFit& fit, const GeConfig& cfg);

}  // namespace pops
