#pragma once

#include <cmath>

#include "pops/pops_core.hpp"
#include "pops/prediction.hpp"

namespace pops {

/// Ensembles beyond this many members need an explicit opt-in: the mass
/// matrix is N x N.
inline constexpr Index kEnsembleRowLimit = 20000;

/// Pointwise mass of each pointwise fit at each training point,
///   M[i][j] = N(y_j | theta*_i.f_j, sigma_scale * loss_residual_var),
/// kept as log densities so that small scales do not underflow.
struct MassMatrix {
  MatrixXd log_density;
  /// sigma_scale * loss_residual_var
  double variance = 0.0;
  double sigma_scale = 0.0;

  Index size() const noexcept { return log_density.rows(); }
  double density(Index i, Index j) const { return std::exp(log_density(i, j)); }
  MatrixXd densities() const { return log_density.array().exp().matrix(); }
};

MassMatrix mass_matrix(const CorrectionSet& cs, const Dataset& data, double sigma_scale);

/// Variationally optimal ensemble weights
///   w*_i = lambda sum_j w_j M[i][j] / sum_k w_k M[k][j],
/// with lambda fixed by sum_i w_i w*_i = 1.
struct EnsembleWeights {
  VectorXd values;
  /// Dataset weights w_i the values are averaged against.
  VectorXd training_weights;
  double mass_scale = 0.0;
  double normalization = 1.0;
};

EnsembleWeights optimal_weights(const MassMatrix& mass, const Dataset& data);

/// All-ones weights (the uniform ensemble).
EnsembleWeights uniform_weights(const Dataset& data);

/// Mixture of the pointwise fits with mass w_i w*_i. Extremes run over
/// every member regardless of weight.
PredictionBundle ensemble_predict(const CorrectionSet& cs, const EnsembleWeights& w,
                                  const Eigen::Ref<const VectorXd>& f);

}  // namespace pops
