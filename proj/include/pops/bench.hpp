#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pops/bayes_ridge.hpp"
#include "pops/engines.hpp"
#include "pops/metrics.hpp"

namespace pops {

struct BenchConfig {
  EngineKind engine = EngineKind::Cubic;
  double noise_std = 0.0;
  double test_fraction = 0.1;
  double noise_var = kDefaultNoiseVar;
  Index resamples = kDefaultResamples;
  /// Fit and evaluate the ridge baseline only (no pointwise fits, no hypercube).
  bool baseline_only = false;
};

/// One (P, N/P, seed) cell. Metrics are NaN where they do not apply
/// (baseline-only) or when the cell failed, in which case `error` is set.
struct BenchCell {
  Index p = 0;
  double ratio = 0.0;
  std::uint64_t seed = 0;
  Index n_train = 0;
  Index n_test = 0;
  double ev = 0.0;
  double mae_ratio = 0.0;
  double coverage = 0.0;
  double fit_wall_time = 0.0;
  double predict_wall_time = 0.0;
  std::string error;
};

/// Generates ratio * P training rows plus a test split of `test_fraction` of
/// the total, fits, and evaluates. Never throws for data or fit failures.
BenchCell run_bench_cell(const BenchConfig& cfg, Index p, double ratio, std::uint64_t seed);

std::vector<BenchCell> run_bench(const BenchConfig& cfg, const std::vector<Index>& p_grid,
                                 const std::vector<double>& ratio_grid, Index seeds);

std::string bench_csv_header();
std::string bench_csv_row(const BenchCell& cell);

}  // namespace pops
