#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pops/hypercube.hpp"

namespace pops {

/// Default number of hypercube resamples per test point for MAE estimation.
inline constexpr Index kDefaultResamples = 64;

struct HistogramBin {
  double low = 0.0;
  double high = 0.0;
  std::size_t observed = 0;
  std::size_t predicted = 0;
};

struct CalibrationReport {
  double envelope_violation_rate = 0.0;
  double observed_mae = 0.0;
  double predicted_mae = 0.0;
  double mae_ratio = 1.0;
  double gaussian_3sigma_coverage = 0.0;
  std::size_t n_test = 0;
  Index resamples = 0;
  std::vector<HistogramBin> histogram;
};

/// Fraction of targets strictly outside [min, max]; boundary hits, up to
/// rounding of the envelope arithmetic, are covered.
double envelope_violation(std::span<const PredictionBundle> bundles, const VectorXd& targets);

struct MaeComparison {
  double observed = 0.0;
  double predicted = 0.0;
  /// predicted / observed; 1 when both vanish.
  double ratio = 1.0;
};

/// Signed errors y - theta*.f over the test rows, rounding noise zeroed as in `residuals`.
VectorXd observed_errors(const RidgeFit& fit, const Dataset& test);

/// Signed resampled errors (theta_s - theta*).f, `resamples` per test row,
/// row-major (row 0's samples first). Row i draws from stream (seed, i).
VectorXd resampled_errors(const Hypercube& hc, const Dataset& test, Index resamples, std::uint64_t seed);

MaeComparison mae_ratio(const RidgeFit& fit, const Hypercube& hc, const Dataset& test, Index resamples,
                        std::uint64_t seed);

/// Fraction of test rows with |y - mean| <= k_sigma * epistemic std.
double gaussian_coverage(const RidgeFit& fit, const Dataset& test, double k_sigma);

/// Shared-edge histogram of observed and predicted errors. Bin width is the
/// Freedman-Diaconis width of the observed errors; edges span both samples.
std::vector<HistogramBin> error_histogram(const VectorXd& observed, const VectorXd& predicted);

CalibrationReport calibrate(const Hypercube& hc, const Dataset& test, Index resamples, std::uint64_t seed);

}  // namespace pops
