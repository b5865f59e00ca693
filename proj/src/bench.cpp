#include "pops/bench.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "pops/error.hpp"
#include "pops/hypercube.hpp"
#include "pops/io.hpp"
#include "pops/random.hpp"

namespace pops {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

}  // namespace

BenchCell run_bench_cell(const BenchConfig& cfg, Index p, double ratio, std::uint64_t seed) {
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  BenchCell cell;
  cell.p = p;
  cell.ratio = ratio;
  cell.seed = seed;
  cell.ev = cell.mae_ratio = cell.coverage = nan;
  cell.fit_wall_time = cell.predict_wall_time = nan;
  try {
    EngineSpec spec;
    spec.kind = cfg.engine;
    spec.noise_std = cfg.noise_std;
    spec.coefficient_seed = seed;
    if (cfg.engine == EngineKind::Sinusoid) {
      spec.input_dim = 1;
      spec.feature_degree = static_cast<int>(p - 1);
    } else {
      spec.input_dim = static_cast<int>(p);
    }
    const double n_train = ratio * static_cast<double>(p);
    const auto n_total = static_cast<Index>(std::llround(n_train / (1.0 - cfg.test_fraction)));
    const std::uint64_t data_seed =
        splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(p) * 1000003ULL + static_cast<std::uint64_t>(ratio)));
    const Dataset data = synth_engine(spec, n_total, data_seed);
    const auto [train, test] = split(data, cfg.test_fraction, data_seed + 1);
    cell.n_train = train.rows();
    cell.n_test = test.rows();

    auto start = Clock::now();
    const RidgeFit fit = fit_min_loss(train, default_prior_precision(train), cfg.noise_var);
    if (cfg.baseline_only) {
      cell.fit_wall_time = seconds_since(start);
      start = Clock::now();
      VectorXd means(test.rows());
      for (Index i = 0; i < test.rows(); ++i) means(i) = epistemic_predict(fit, test.features().row(i).transpose()).mean;
      cell.predict_wall_time = seconds_since(start);
    } else {
      const Hypercube hc = build_hypercube(pointwise_fits(fit, train));
      cell.fit_wall_time = seconds_since(start);
      start = Clock::now();
      const auto bundles = predict_envelopes(hc, test.features());
      cell.predict_wall_time = seconds_since(start);
      cell.ev = envelope_violation(bundles, test.targets());
      cell.mae_ratio = mae_ratio(fit, hc, test, cfg.resamples, seed).ratio;
    }
    cell.coverage = gaussian_coverage(fit, test, 3.0);
  } catch (const Error& ex) {
    cell.error = ex.what();
  }
  return cell;
}

std::vector<BenchCell> run_bench(const BenchConfig& cfg, const std::vector<Index>& p_grid,
                                 const std::vector<double>& ratio_grid, Index seeds) {
  std::vector<BenchCell> cells;
  for (Index p : p_grid)
    for (double ratio : ratio_grid)
      for (Index s = 0; s < seeds; ++s) cells.push_back(run_bench_cell(cfg, p, ratio, static_cast<std::uint64_t>(s)));
  return cells;
}

std::string bench_csv_header() {
  return "P,ratio,seed,n_train,n_test,EV,mae_ratio,coverage,fit_wall_time,predict_wall_time,error";
}

std::string bench_csv_row(const BenchCell& cell) {
  std::ostringstream out;
  out << cell.p << ',' << format_double(cell.ratio) << ',' << cell.seed << ',' << cell.n_train << ','
      << cell.n_test << ',' << format_double(cell.ev) << ',' << format_double(cell.mae_ratio) << ','
      << format_double(cell.coverage) << ',' << format_double(cell.fit_wall_time) << ','
      << format_double(cell.predict_wall_time) << ',';
  // quote errors: messages may contain commas
  if (!cell.error.empty()) {
    std::string quoted;
    for (char c : cell.error) quoted += c == '"' ? std::string("\"\"") : std::string(1, c);
    out << '"' << quoted << '"';
  }
  return out.str();
}

}  // namespace pops
