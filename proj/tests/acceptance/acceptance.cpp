// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "pops/bench.hpp"
#include "pops/ensemble.hpp"
#include "pops/error.hpp"
#include "pops/model_file.hpp"
#include "pops/random.hpp"
#include "pops/refmin.hpp"

using namespace pops;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Gaussian features and targets, uneven weights, N <= 50, P <= 8.
Dataset random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> pick_p(1, 8);
  const Index p = pick_p(rng);
  std::uniform_int_distribution<Index> pick_n(p + 1, 50);
  const Index n = pick_n(rng);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> weight(0.2, 5.0);
  MatrixXd f(n, p);
  VectorXd y(n), w(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) f(i, j) = normal(rng);
    y(i) = normal(rng);
    w(i) = weight(rng);
  }
  return Dataset(f, y, w);
}

Dataset cubic_instance(Index p, Index n, std::uint64_t seed) {
  EngineSpec spec;
  spec.kind = EngineKind::Cubic;
  spec.input_dim = static_cast<int>(p);
  spec.coefficient_seed = seed;
  return synth_engine(spec, n, splitmix64(seed + 77));
}

Dataset sine_quadratic_data() {
  EngineSpec spec;
  spec.kind = EngineKind::Sinusoid;
  spec.feature_degree = 2;
  return synth_engine(spec, 100, 1);
}

constexpr int kInstances = 50;

void oracle_equivalence() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (int s = 0; s < kInstances; ++s) {
    const Dataset d = random_instance(static_cast<std::uint64_t>(s));
    const RidgeFit fit = fit_min_loss(d, default_prior_precision(d));
    const CorrectionSet cs = pointwise_fits(fit, d);
    for (Index i = 0; i < d.rows(); ++i) {
      const VectorXd oracle = constrained_fit_oracle(d, i, fit);
      worst = std::max(worst, (oracle - cs.member(i)).norm() / oracle.norm());
    }
  }
  const double elapsed = seconds_since(start);
  report(1, "oracle equivalence", worst < 1e-8 && elapsed < 10.0,
         fmt("max relative deviation %.2e over %d instances (tol 1e-8), %.2f s (limit 10 s)", worst, kInstances,
             elapsed));
}

void interpolation_and_covering() {
  double worst = 0.0;
  double worst_ev = 0.0;
  for (int s = 0; s < kInstances; ++s) {
    const Dataset d = random_instance(static_cast<std::uint64_t>(s));
    const RidgeFit fit = fit_min_loss(d, default_prior_precision(d));
    const CorrectionSet cs = pointwise_fits(fit, d);
    for (Index i = 0; i < d.rows(); ++i) {
      const double pred = cs.member(i).dot(d.features().row(i));
      const double y = d.targets()(i);
      worst = std::max(worst, std::abs(pred - y) / std::max(std::abs(y), 1e-300));
    }
    const Hypercube hc = build_hypercube(cs);
    worst_ev = std::max(worst_ev, envelope_violation(predict_envelopes(hc, d.features()), d.targets()));
  }
  report(2, "interpolation and covering", worst < 1e-9 && worst_ev == 0.0,
         fmt("max relative interpolation error %.2e (tol 1e-9), max training EV %g (must be 0)", worst, worst_ev));
}

void leverage_identities() {
  double sum_gap = 0.0;
  double centroid_gap = 0.0;
  for (int s = 0; s < kInstances; ++s) {
    const Dataset d = random_instance(static_cast<std::uint64_t>(1000 + s));
    const CorrectionSet cs = pointwise_fits(fit_min_loss(d, 0.0), d);
    sum_gap = std::max(sum_gap, std::abs(d.weights().dot(cs.leverages) - static_cast<double>(d.cols())) /
                                    static_cast<double>(d.cols()));
    centroid_gap = std::max(centroid_gap, leverage_centroid_check(cs, d));
  }
  report(3, "leverage identities", sum_gap < 1e-8 && centroid_gap < 1e-8,
         fmt("max |sum w h - P| / P %.2e, max centroid gap %.2e (tol 1e-8)", sum_gap, centroid_gap));
}

struct Sweep {
  std::vector<Index> p_grid{10, 20, 50};
  std::vector<double> ratios{10, 30, 100};
  std::vector<BenchCell> cells;
  double elapsed = 0.0;

  const BenchCell& at(Index p, double ratio, std::uint64_t seed) const {
    for (const auto& c : cells)
      if (c.p == p && c.ratio == ratio && c.seed == seed) return c;
    throw std::logic_error("missing cell");
  }
};

constexpr int kSeeds = 5;

Sweep run_sweep() {
  Sweep sw;
  BenchConfig cfg;
  cfg.engine = EngineKind::Cubic;
  cfg.test_fraction = 0.1;
  const auto start = Clock::now();
  sw.cells = run_bench(cfg, sw.p_grid, sw.ratios, kSeeds);
  sw.elapsed = seconds_since(start);
  return sw;
}

void cubic_benchmark_violation(const Sweep& sw) {
  bool ok = sw.elapsed < 120.0;
  std::ostringstream detail;
  detail << "P=20 N/P=100 EV per seed:";
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    const BenchCell& c = sw.at(20, 100, s);
    ok = ok && c.error.empty() && c.ev <= 0.03;
    detail << ' ' << fmt("%.4f", c.ev);
  }
  detail << " (limit 0.03); mean EV over N/P 10,30,100:";
  for (Index p : sw.p_grid) {
    std::vector<double> means;
    for (double r : sw.ratios) {
      double sum = 0.0;
      for (std::uint64_t s = 0; s < kSeeds; ++s) sum += sw.at(p, r, s).ev;
      means.push_back(sum / kSeeds);
    }
    const bool decreasing = means[0] > means[1] && means[1] > means[2];
    ok = ok && decreasing;
    detail << fmt(" P=%ld[%.4f %.4f %.4f]%s", static_cast<long>(p), means[0], means[1], means[2],
                  decreasing ? "" : "(not strictly decreasing)");
  }
  detail << fmt("; sweep %.1f s (limit 120 s)", sw.elapsed);
  report(4, "envelope violation on the cubic benchmark", ok, detail.str());
}

void mae_calibration(const Sweep& sw) {
  bool ok = true;
  std::ostringstream detail;
  detail << "P=20 N/P=100 mae_ratio per seed:";
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    const double r = sw.at(20, 100, s).mae_ratio;
    ok = ok && r >= 0.5 && r <= 2.0;
    detail << ' ' << fmt("%.3f", r);
  }
  detail << " (range [0.5, 2])";
  report(5, "MAE calibration", ok, detail.str());
}

void baseline_under_coverage(const Sweep& sw) {
  bool ok = true;
  std::ostringstream detail;
  detail << "P=20 N/P=100 ridge 3-sigma coverage vs envelope coverage per seed:";
  for (std::uint64_t s = 0; s < kSeeds; ++s) {
    const BenchCell& c = sw.at(20, 100, s);
    const double envelope = 1.0 - c.ev;
    ok = ok && c.coverage < envelope;
    detail << ' ' << fmt("%.3f<%.3f", c.coverage, envelope);
  }
  report(6, "baseline under-coverage", ok, detail.str());
}

void envelope_dominance() {
  std::size_t violations = 0;
  std::size_t checked = 0;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::uint64_t s = 0; s < 5; ++s) {
    for (double sigma : {0.1, 1.0}) {
      const Dataset d = cubic_instance(8, 400, s);
      const CorrectionSet cs = pointwise_fits(fit_min_loss(d, default_prior_precision(d)), d);
      const Hypercube hc = build_hypercube(cs);
      const EnsembleWeights w = optimal_weights(mass_matrix(cs, d, sigma), d);
      for (int k = 0; k < 1000; ++k) {
        VectorXd f(8);
        for (Index j = 0; j < 8; ++j) f(j) = u(rng);
        const PredictionBundle e = ensemble_predict(cs, w, f);
        const PredictionBundle h = predict_envelope(hc, f);
        // envelopes are compared to rounding of the two evaluation paths
        const double slack = 64 * std::numeric_limits<double>::epsilon() * (std::abs(h.max) + std::abs(h.min) + 1.0);
        if (e.max > h.max + slack || e.min < h.min - slack) ++violations;
        ++checked;
      }
    }
  }
  report(7, "envelope dominance", violations == 0,
         fmt("%zu of %zu random test points outside the hypercube envelope", violations, checked));
}

void weight_limits() {
  double worst_sum = 0.0;
  double min_weight = std::numeric_limits<double>::infinity();
  double large_scale_gap = 0.0;
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Dataset d = cubic_instance(6, 300, s);
    const CorrectionSet cs = pointwise_fits(fit_min_loss(d, default_prior_precision(d)), d);
    for (double sigma : {1e-3, 1e-2, 0.1, 1.0, 10.0, 1e3, 1e6}) {
      const EnsembleWeights w = optimal_weights(mass_matrix(cs, d, sigma), d);
      worst_sum = std::max(worst_sum, std::abs(d.weights().dot(w.values) - 1.0));
      min_weight = std::min(min_weight, w.values.minCoeff());
      if (sigma == 1e6) large_scale_gap = std::max(large_scale_gap, (w.values.array() - 1.0).abs().maxCoeff());
    }
  }
  report(8, "ensemble weight limits", large_scale_gap < 1e-3 && min_weight > 0.0 && worst_sum < 1e-10,
         fmt("sigma 1e6: max |w-1| %.2e (tol 1e-3); min weight %.3e (> 0); max |<w>-1| %.2e (tol 1e-10)",
             large_scale_gap, min_weight, worst_sum));
}

void refmin_consistency() {
  const Dataset d = sine_quadratic_data();
  const RidgeFit fit = fit_min_loss(d, default_prior_precision(d));
  std::ostringstream detail;
  bool ok = true;

  // gradient check at a random ensemble
  {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal;
    MatrixXd members(20, 3);
    for (Index k = 0; k < 20; ++k)
      for (Index j = 0; j < 3; ++j) members(k, j) = fit.theta_star(j) + 0.3 * normal(rng);
    const double v = fit.loss_residual_var;
    MatrixXd grad;
    ge_objective(d, members, v, &grad);
    double worst = 0.0;
    const double h = 1e-6;
    for (Index k = 0; k < 20; ++k)
      for (Index j = 0; j < 3; ++j) {
        MatrixXd up = members, down = members;
        up(k, j) += h;
        down(k, j) -= h;
        const double fd = (ge_objective(d, up, v) - ge_objective(d, down, v)) / (2 * h);
        worst = std::max(worst, std::abs(fd - grad(k, j)) / grad.cwiseAbs().maxCoeff());
      }
    const bool pass = worst < 1e-5;
    ok = ok && pass;
    detail << fmt("gradient check %.1e (tol 1e-5)%s", worst, pass ? "" : " FAILED");
  }

  // sigma = 2: spread contracts at every iteration and ends below its start
  {
    GeConfig cfg;
    cfg.sigma_scale = 2.0;
    const GeResult r = minimize_ge(d, fit, cfg);
    bool monotone = true;
    for (std::size_t i = 1; i < r.log.size(); ++i)
      if (r.log[i].max_spread > r.log[i - 1].max_spread) monotone = false;
    const double first = r.log.front().max_spread;
    const double last = r.log.back().max_spread;
    const bool pass = monotone && last < first;
    ok = ok && pass;
    detail << fmt("; sigma=2 max spread %.3g -> %.3g, %s", first, last,
                  monotone ? "monotone" : "not monotone");
  }

  // sigma = 1 from the pops ensemble: converges, objective nearly stationary
  {
    GeConfig cfg;
    cfg.sigma_scale = 1.0;
    cfg.init = GeInit::PopsEnsemble;
    const GeResult r = minimize_ge(d, fit, cfg);
    const double improvement = (r.initial_value - r.ge_value) / std::abs(r.initial_value);
    const bool pass = r.converged && improvement < 0.01;
    ok = ok && pass;
    detail << fmt("; sigma=1 pops-init %s after %ld iters, improvement %.2f%% (limit 1%%)", to_string(r.status),
                  static_cast<long>(r.iterations), 100 * improvement);
  }

  // sigma = 1/20: the minimizer should report ScaleTooSmall
  {
    GeConfig cfg;
    cfg.sigma_scale = 1.0 / 20;
    std::string outcome;
    bool pass = false;
    try {
      const GeResult r = minimize_ge(d, fit, cfg);
      outcome = std::string("finished with status ") + to_string(r.status);
    } catch (const Error& e) {
      pass = e.code() == ErrorCode::ScaleTooSmall;
      outcome = std::string("threw ") + to_string(e.code());
    }
    ok = ok && pass;
    detail << "; sigma=1/20 " << outcome;
  }
  report(9, "reference minimizer consistency", ok, detail.str());
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void determinism_and_round_trip() {
  const auto dir = std::filesystem::temp_directory_path() / ("pops_acceptance_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  bool ok = true;
  std::ostringstream detail;

  const Dataset d = cubic_instance(10, 600, 3);
  const RidgeFit fit = fit_min_loss(d, default_prior_precision(d));
  CorrectionSet cs = pointwise_fits(fit, d);
  ModelFile model;
  model.feature_names = d.feature_names();
  model.hypercube = build_hypercube(cs);
  const EnsembleWeights w = optimal_weights(mass_matrix(cs, d, 1.0), d);
  model.ensemble = EnsembleModel{std::move(cs), w};
  save_model(model, dir / "m.json");
  const ModelFile back = load_model(dir / "m.json");

  const Dataset test = cubic_instance(10, 500, 99);
  std::size_t mismatches = 0;
  for (Index i = 0; i < test.rows(); ++i) {
    const VectorXd f = test.features().row(i).transpose();
    const auto a = predict_envelope(model.hypercube, f);
    const auto b = predict_envelope(back.hypercube, f);
    const auto ea = ensemble_predict(model.ensemble->corrections, model.ensemble->weights, f);
    const auto eb = ensemble_predict(back.ensemble->corrections, back.ensemble->weights, f);
    for (auto [x, y] : {std::pair{a, b}, std::pair{ea, eb}})
      if (x.mean != y.mean || x.max != y.max || x.min != y.min || x.std_misspec != y.std_misspec ||
          x.std_epistemic != y.std_epistemic)
        ++mismatches;
  }
  ok = ok && mismatches == 0;
  detail << mismatches << " bitwise prediction mismatches after save/load";

  // identical seeds, identical files
  EngineSpec spec;
  spec.kind = EngineKind::RandomLinear;
  spec.input_dim = 7;
  spec.noise_std = 0.01;
  write_csv(synth_engine(spec, 300, 5), dir / "a.csv");
  write_csv(synth_engine(spec, 300, 5), dir / "b.csv");
  auto [tr1, te1] = split(load_csv(dir / "a.csv", "y"), 0.2, 8);
  auto [tr2, te2] = split(load_csv(dir / "b.csv", "y"), 0.2, 8);
  write_csv(te1, dir / "te1.csv");
  write_csv(te2, dir / "te2.csv");
  const bool same_data = slurp(dir / "a.csv") == slurp(dir / "b.csv") && slurp(dir / "te1.csv") == slurp(dir / "te2.csv");

  BenchConfig cfg;
  cfg.resamples = 16;
  auto strip_timing = [](BenchCell c) {
    c.fit_wall_time = c.predict_wall_time = 0.0;
    return bench_csv_row(c);
  };
  const bool same_bench = strip_timing(run_bench_cell(cfg, 8, 20, 4)) == strip_timing(run_bench_cell(cfg, 8, 20, 4));
  ok = ok && same_data && same_bench;
  detail << "; seeded CSV outputs " << (same_data ? "identical" : "DIFFER") << "; seeded bench rows "
         << (same_bench ? "identical" : "DIFFER");

  std::error_code ec;
  std::filesystem::remove_all(dir, ec);
  report(10, "determinism and round-trip", ok, detail.str());
}

void performance() {
  const Index n = 10000;
  const Index p = 500;
  EngineSpec spec;
  spec.kind = EngineKind::RandomLinear;
  spec.input_dim = static_cast<int>(p);
  spec.coefficient_seed = 1;
  const Dataset d = synth_engine(spec, n, 2);
  const double alpha = default_prior_precision(d);

  std::vector<double> ridge_times, pops_times;
  for (int rep = 0; rep < 5; ++rep) {
    auto t = Clock::now();
    const RidgeFit fit = fit_min_loss(d, alpha);
    ridge_times.push_back(seconds_since(t));

    t = Clock::now();
    const RidgeFit fit2 = fit_min_loss(d, alpha);
    const Hypercube hc = build_hypercube(pointwise_fits(fit2, d));
    pops_times.push_back(seconds_since(t));
    if (hc.rank() == 0 || fit.dim() != p) throw std::logic_error("unexpected degenerate benchmark fit");
  }
  std::sort(ridge_times.begin(), ridge_times.end());
  std::sort(pops_times.begin(), pops_times.end());
  const double ridge = ridge_times[2];
  const double pops = pops_times[2];
  const double ratio = pops / ridge;
  report(11, "performance", ratio <= 4.0 && ridge < 60.0 && pops < 60.0,
         fmt("N=%ld P=%ld median of 5: ridge %.3f s, POPS fit %.3f s, ratio %.2f (limit 4)", static_cast<long>(n),
             static_cast<long>(p), ridge, pops, ratio));
}

}  // namespace

int main() {
  try {
    oracle_equivalence();
    interpolation_and_covering();
    leverage_identities();
    const Sweep sweep = run_sweep();
    cubic_benchmark_violation(sweep);
    mae_calibration(sweep);
    baseline_under_coverage(sweep);
    envelope_dominance();
    weight_limits();
    refmin_consistency();
    determinism_and_round_trip();
    performance();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance suite aborted: %s\n", e.what());
    return 2;
  }
  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
