#include "pops/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pops/error.hpp"
#include "pops/random.hpp"

namespace pops {

namespace {

constexpr std::size_t kMaxBins = 200;

double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

double ratio_of(double observed, double predicted) {
  if (observed == 0.0) return predicted == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return predicted / observed;
}

}  // namespace

double envelope_violation(std::span<const PredictionBundle> bundles, const VectorXd& targets) {
  if (static_cast<Index>(bundles.size()) != targets.size())
    throw Error(ErrorCode::DimensionMismatch, "bundle and target counts differ");
  if (bundles.empty()) return 0.0;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    const double y = targets(static_cast<Index>(i));
    const double slack = kRoundoffTol * (std::abs(y) + std::abs(bundles[i].max) + std::abs(bundles[i].min));
    if (y > bundles[i].max + slack || y < bundles[i].min - slack) ++outside;
  }
  return static_cast<double>(outside) / static_cast<double>(bundles.size());
}

VectorXd observed_errors(const RidgeFit& fit, const Dataset& test) {
  if (test.cols() != fit.dim()) throw Error(ErrorCode::DimensionMismatch, "test features do not match the model");
  return residuals(fit, test);
}

VectorXd resampled_errors(const Hypercube& hc, const Dataset& test, Index resamples, std::uint64_t seed) {
  if (resamples < 1) throw Error(ErrorCode::InvalidSpec, "need at least one resample");
  if (test.cols() != hc.base.dim()) throw Error(ErrorCode::DimensionMismatch, "test features do not match the model");
  VectorXd out(test.rows() * resamples);
  for (Index i = 0; i < test.rows(); ++i) {
    auto rng = stream_for(seed, static_cast<std::uint64_t>(i));
    const VectorXd g = hc.basis * test.features().row(i).transpose();
    const MatrixXd x = sample_box(hc, resamples, rng);
    out.segment(i * resamples, resamples) = x * g;
  }
  return out;
}

MaeComparison mae_ratio(const RidgeFit& fit, const Hypercube& hc, const Dataset& test, Index resamples,
                        std::uint64_t seed) {
  MaeComparison out;
  out.observed = observed_errors(fit, test).cwiseAbs().mean();
  out.predicted = resampled_errors(hc, test, resamples, seed).cwiseAbs().mean();
  out.ratio = ratio_of(out.observed, out.predicted);
  return out;
}

double gaussian_coverage(const RidgeFit& fit, const Dataset& test, double k_sigma) {
  if (!(k_sigma > 0.0)) throw Error(ErrorCode::InvalidSpec, "k_sigma must be positive");
  if (test.cols() != fit.dim()) throw Error(ErrorCode::DimensionMismatch, "test features do not match the model");
  Index covered = 0;
  for (Index i = 0; i < test.rows(); ++i) {
    const auto pred = epistemic_predict(fit, test.features().row(i).transpose());
    if (std::abs(test.targets()(i) - pred.mean) <= k_sigma * pred.std) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(test.rows());
}

std::vector<HistogramBin> error_histogram(const VectorXd& observed, const VectorXd& predicted) {
  if (observed.size() == 0) return {};
  double lo = observed.minCoeff();
  double hi = observed.maxCoeff();
  if (predicted.size() > 0) {
    lo = std::min(lo, predicted.minCoeff());
    hi = std::max(hi, predicted.maxCoeff());
  }

  std::vector<double> obs(observed.data(), observed.data() + observed.size());
  const double iqr = obs.size() > 1 ? quantile(obs, 0.75) - quantile(obs, 0.25) : 0.0;
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(obs.size()));

  std::size_t bins = 1;
  if (width > 0.0 && hi > lo) bins = static_cast<std::size_t>(std::ceil((hi - lo) / width));
  bins = std::clamp<std::size_t>(bins, 1, kMaxBins);
  const double span = hi > lo ? hi - lo : 1.0;
  const double step = span / static_cast<double>(bins);

  std::vector<HistogramBin> hist(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    hist[b].low = lo + step * static_cast<double>(b);
    hist[b].high = b + 1 == bins ? lo + span : lo + step * static_cast<double>(b + 1);
  }
  auto bin_of = [&](double v) {
    const auto b = static_cast<std::ptrdiff_t>(std::floor((v - lo) / step));
    return static_cast<std::size_t>(std::clamp<std::ptrdiff_t>(b, 0, static_cast<std::ptrdiff_t>(bins) - 1));
  };
  for (Index i = 0; i < observed.size(); ++i) ++hist[bin_of(observed(i))].observed;
  for (Index i = 0; i < predicted.size(); ++i) ++hist[bin_of(predicted(i))].predicted;
  return hist;
}

CalibrationReport calibrate(const Hypercube& hc, const Dataset& test, Index resamples, std::uint64_t seed) {
  CalibrationReport report;
  report.n_test = static_cast<std::size_t>(test.rows());
  report.resamples = resamples;

  const auto bundles = predict_envelopes(hc, test.features());
  report.envelope_violation_rate = envelope_violation(bundles, test.targets());

  const VectorXd observed = observed_errors(hc.base, test);
  const VectorXd predicted = resampled_errors(hc, test, resamples, seed);
  report.observed_mae = observed.cwiseAbs().mean();
  report.predicted_mae = predicted.cwiseAbs().mean();
  report.mae_ratio = ratio_of(report.observed_mae, report.predicted_mae);
  report.gaussian_3sigma_coverage = gaussian_coverage(hc.base, test, 3.0);
  report.histogram = error_histogram(observed, predicted);
  return report;
}

}  // namespace pops
