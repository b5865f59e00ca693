#include "pops/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pops/bench.hpp"
#include "pops/error.hpp"
#include "pops/model_file.hpp"
#include "pops/refmin.hpp"

namespace pops {

namespace {

struct FitArgs {
  std::string train;
  std::string target = "y";
  std::optional<std::string> weight;
  double noise_var = kDefaultNoiseVar;
  std::optional<double> prior_scale;
  bool with_ensemble = false;
  bool force_ensemble = false;
  double sigma_scale = 1.0;
  double rank_tol = kDefaultRankTol;
  std::string out;
};

struct PredictArgs {
  std::string model;
  std::string test;
  bool bounds = false;
  bool std = false;
  bool combined_std = false;
  bool ensemble = false;
  std::string out;
};

struct EvalArgs {
  std::string model;
  std::string test;
  Index resamples = kDefaultResamples;
  std::uint64_t seed = 0;
  std::string report;
  std::string histogram;
  std::string pointwise;
};

struct SynthArgs {
  std::string engine = "cubic";
  Index n = 1000;
  std::optional<int> input_dim;
  int degree = 2;
  double noise_std = 0.0;
  std::uint64_t coefficient_seed = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct BenchArgs {
  std::string engine = "cubic";
  std::vector<Index> p_grid{10, 20, 50};
  std::vector<double> ratio_grid{10, 30, 100};
  Index seeds = 5;
  double noise_std = 0.0;
  double test_fraction = 0.1;
  Index resamples = kDefaultResamples;
  bool baseline_only = false;
  std::string out;
};

struct RefminArgs {
  std::string train;
  std::string target = "y";
  std::optional<std::string> weight;
  Index members = 0;
  double sigma_scale = 1.0;
  std::string init = "jitter";
  Index steps = 20000;
  double step_size = GeConfig{}.step_size;
  std::uint64_t seed = 0;
  double noise_var = kDefaultNoiseVar;
  std::string out;
  std::string log;
};

double prior_for(const Dataset& data, const std::optional<double>& flag) {
  return flag ? *flag : default_prior_precision(data);
}

int cmd_fit(const FitArgs& a, std::ostream& out, std::ostream& err) {
  const Dataset data = load_csv(a.train, a.target, a.weight);
  if (a.with_ensemble && data.rows() > kEnsembleRowLimit && !a.force_ensemble) {
    err << "refusing --with-ensemble for N=" << data.rows() << " > " << kEnsembleRowLimit
        << ": the mass matrix costs O(N^2) time and memory; pass --force-ensemble to proceed\n";
    return 1;
  }
  const RidgeFit fit = fit_min_loss(data, prior_for(data, a.prior_scale), a.noise_var);
  CorrectionSet cs = pointwise_fits(fit, data);

  ModelFile model;
  model.feature_names = data.feature_names();
  model.target_column = a.target;
  model.hypercube = build_hypercube(cs, a.rank_tol);
  if (a.with_ensemble) {
    const EnsembleWeights w = optimal_weights(mass_matrix(cs, data, a.sigma_scale), data);
    model.ensemble = EnsembleModel{std::move(cs), w};
  }
  save_model(model, a.out);

  const auto n = data.rows();
  const auto p = data.cols();
  out << "N=" << n << '\n'
      << "P=" << p << '\n'
      << "N/P=" << format_double(static_cast<double>(n) / static_cast<double>(p)) << '\n'
      << "loss_residual_var=" << format_double(fit.loss_residual_var) << '\n'
      << "hypercube_rank=" << model.hypercube.rank() << '\n';
  if (appears_specified(fit)) err << "warning: model appears specified (all training residuals vanish)\n";
  return 0;
}

// Model feature columns in model order; the target is optional.
MatrixXd model_inputs(const ModelFile& model, const std::string& path) {
  try {
    return load_feature_columns(path, model.feature_names);
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::MissingColumn) throw;
    throw Error(ErrorCode::DimensionMismatch, std::string("input does not match the model: ") + ex.what());
  }
}

Dataset labelled_inputs(const ModelFile& model, const std::string& path) {
  const Dataset raw = load_csv(path, model.target_column);
  return Dataset::uniform(model_inputs(model, path), raw.targets(), model.feature_names);
}

int cmd_predict(const PredictArgs& a, std::ostream&, std::ostream&) {
  const ModelFile model = load_model(a.model);
  const MatrixXd features = model_inputs(model, a.test);
  if (a.ensemble && !model.ensemble)
    throw Error(ErrorCode::InvalidSpec, "--ensemble requested but the model has no ensemble");

  std::ostringstream csv;
  csv << "mean";
  if (a.std) csv << ",std_misspec,std_epistemic";
  if (a.combined_std) csv << ",std_combined";
  if (a.bounds) csv << ",max,min";
  csv << '\n';
  for (Index i = 0; i < features.rows(); ++i) {
    const VectorXd f = features.row(i).transpose();
    PredictionBundle b = a.ensemble ? ensemble_predict(model.ensemble->corrections, model.ensemble->weights, f)
                                    : predict_envelope(model.hypercube, f);
    if (a.ensemble) b.std_epistemic = epistemic_predict(model.ridge(), f).std;
    csv << format_double(b.mean);
    if (a.std) csv << ',' << format_double(b.std_misspec) << ',' << format_double(b.std_epistemic);
    if (a.combined_std) csv << ',' << format_double(std::hypot(b.std_misspec, b.std_epistemic));
    if (a.bounds) csv << ',' << format_double(b.max) << ',' << format_double(b.min);
    csv << '\n';
  }
  write_file_atomic(a.out, csv.str());
  return 0;
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream&) {
  const ModelFile model = load_model(a.model);
  const Dataset test = labelled_inputs(model, a.test);
  const CalibrationReport r = calibrate(model.hypercube, test, a.resamples, a.seed);

  std::ostringstream kv;
  kv << "n_test=" << r.n_test << '\n'
     << "resamples=" << r.resamples << '\n'
     << "envelope_violation_rate=" << format_double(r.envelope_violation_rate) << '\n'
     << "observed_mae=" << format_double(r.observed_mae) << '\n'
     << "predicted_mae=" << format_double(r.predicted_mae) << '\n'
     << "mae_ratio=" << format_double(r.mae_ratio) << '\n'
     << "gaussian_3sigma_coverage=" << format_double(r.gaussian_3sigma_coverage) << '\n';
  if (a.report.empty())
    out << kv.str();
  else
    write_file_atomic(a.report, kv.str());

  if (!a.histogram.empty()) {
    std::ostringstream csv;
    csv << "bin_low,bin_high,observed_count,predicted_count\n";
    for (const auto& bin : r.histogram)
      csv << format_double(bin.low) << ',' << format_double(bin.high) << ',' << bin.observed << ','
          << bin.predicted << '\n';
    write_file_atomic(a.histogram, csv.str());
  }
  if (!a.pointwise.empty()) {
    const auto bundles = predict_envelopes(model.hypercube, test.features());
    std::ostringstream csv;
    csv << "y,mean,min,max\n";
    for (Index i = 0; i < test.rows(); ++i) {
      const auto& b = bundles[static_cast<std::size_t>(i)];
      csv << format_double(test.targets()(i)) << ',' << format_double(b.mean) << ',' << format_double(b.min)
          << ',' << format_double(b.max) << '\n';
    }
    write_file_atomic(a.pointwise, csv.str());
  }
  return 0;
}

int cmd_synth(const SynthArgs& a, std::ostream& out, std::ostream&) {
  EngineSpec spec;
  spec.kind = parse_engine_kind(a.engine);
  spec.input_dim = a.input_dim.value_or(spec.kind == EngineKind::Sinusoid ? 1 : 20);
  spec.feature_degree = a.degree;
  spec.noise_std = a.noise_std;
  spec.coefficient_seed = a.coefficient_seed;
  const Dataset data = synth_engine(spec, a.n, a.seed);
  write_csv(data, a.out);
  out << "wrote " << data.rows() << " rows, P=" << data.cols() << " to " << a.out << '\n';
  return 0;
}

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream&) {
  BenchConfig cfg;
  cfg.engine = parse_engine_kind(a.engine);
  cfg.noise_std = a.noise_std;
  cfg.test_fraction = a.test_fraction;
  cfg.resamples = a.resamples;
  cfg.baseline_only = a.baseline_only;
  if (!(cfg.test_fraction > 0.0 && cfg.test_fraction < 1.0))
    throw Error(ErrorCode::InvalidSpec, "--test-fraction must lie in (0, 1)");

  std::ostringstream csv;
  csv << bench_csv_header() << '\n';
  Index failed = 0;
  for (const auto& cell : run_bench(cfg, a.p_grid, a.ratio_grid, a.seeds)) {
    csv << bench_csv_row(cell) << '\n';
    if (!cell.error.empty()) ++failed;
  }
  if (a.out.empty())
    out << csv.str();
  else
    write_file_atomic(a.out, csv.str());
  if (failed > 0) out << failed << " cell(s) failed; see the error column\n";
  return 0;
}

int cmd_refmin(const RefminArgs& a, std::ostream& out, std::ostream&) {
  const Dataset data = load_csv(a.train, a.target, a.weight);
  const RidgeFit fit = fit_min_loss(data, default_prior_precision(data), a.noise_var);

  GeConfig cfg;
  cfg.members = a.members;
  cfg.sigma_scale = a.sigma_scale;
  cfg.max_iters = a.steps;
  cfg.step_size = a.step_size;
  cfg.seed = a.seed;
  if (a.init == "jitter")
    cfg.init = GeInit::MinLossJitter;
  else if (a.init == "pops")
    cfg.init = GeInit::PopsEnsemble;
  else
    throw Error(ErrorCode::InvalidSpec, "--init must be 'jitter' or 'pops'");

  GeResult res;
  try {
    res = minimize_ge(data, fit, cfg);
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::ScaleTooSmall) throw;
    out << "status=" << to_string(ErrorCode::ScaleTooSmall) << '\n' << "message=" << ex.what() << '\n';
    return 0;
  }

  std::ostringstream members;
  for (std::size_t j = 0; j < data.feature_names().size(); ++j)
    members << (j ? "," : "") << "theta_" << data.feature_names()[j];
  members << '\n';
  for (Index k = 0; k < res.members.rows(); ++k) {
    for (Index j = 0; j < res.members.cols(); ++j) members << (j ? "," : "") << format_double(res.members(k, j));
    members << '\n';
  }
  write_file_atomic(a.out, members.str());

  if (!a.log.empty()) {
    std::ostringstream log;
    for (const auto& it : res.log)
      log << "iter=" << it.iter << " objective=" << format_double(it.objective)
          << " grad_norm=" << format_double(it.grad_norm) << " step=" << format_double(it.step)
          << " max_spread=" << format_double(it.max_spread) << '\n';
    write_file_atomic(a.log, log.str());
  }

  const double improvement =
      res.initial_value != 0.0 ? (res.initial_value - res.ge_value) / std::abs(res.initial_value) : 0.0;
  out << "status=" << to_string(res.status) << '\n'
      << "converged=" << (res.converged ? "true" : "false") << '\n'
      << "iterations=" << res.iterations << '\n'
      << "initial_objective=" << format_double(res.initial_value) << '\n'
      << "final_objective=" << format_double(res.ge_value) << '\n'
      << "relative_improvement=" << format_double(improvement) << '\n';
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"pops: misspecification-aware linear regression"};
  app.require_subcommand(1);

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit a model and its parameter hypercube");
  fit_cmd->add_option("train_csv", fit.train)->required()->check(CLI::ExistingFile);
  fit_cmd->add_option("--target", fit.target, "target column")->capture_default_str();
  fit_cmd->add_option("--weight", fit.weight, "weight column");
  fit_cmd->add_option("--noise-var", fit.noise_var)->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--prior-scale", fit.prior_scale, "prior precision (default 1e-10 Tr<ff>/P)")
      ->check(CLI::NonNegativeNumber);
  fit_cmd->add_flag("--with-ensemble", fit.with_ensemble, "also store the weighted POPS ensemble");
  fit_cmd->add_flag("--force-ensemble", fit.force_ensemble, "allow the ensemble above 20000 rows");
  fit_cmd->add_option("--sigma-scale", fit.sigma_scale)->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--rank-tol", fit.rank_tol)->capture_default_str()->check(CLI::PositiveNumber);
  fit_cmd->add_option("--out", fit.out, "model file")->required();

  PredictArgs pred;
  auto* pred_cmd = app.add_subcommand("predict", "predict with a saved model");
  pred_cmd->add_option("model", pred.model)->required()->check(CLI::ExistingFile);
  pred_cmd->add_option("test_csv", pred.test)->required()->check(CLI::ExistingFile);
  pred_cmd->add_flag("--bounds", pred.bounds, "emit max,min columns");
  pred_cmd->add_flag("--std", pred.std, "emit std_misspec,std_epistemic columns");
  pred_cmd->add_flag("--combined-std", pred.combined_std, "emit sqrt(std_misspec^2 + std_epistemic^2)");
  pred_cmd->add_flag("--ensemble", pred.ensemble, "use the stored ensemble instead of the hypercube");
  pred_cmd->add_option("--out", pred.out)->required();

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "calibration report on labelled test data");
  eval_cmd->add_option("model", ev.model)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("test_csv", ev.test)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--resamples", ev.resamples)->capture_default_str()->check(CLI::PositiveNumber);
  eval_cmd->add_option("--seed", ev.seed)->capture_default_str();
  eval_cmd->add_option("--report", ev.report, "key=value report file (default stdout)");
  eval_cmd->add_option("--histogram", ev.histogram, "error histogram CSV");
  eval_cmd->add_option("--pointwise", ev.pointwise, "per-row y,mean,min,max CSV");

  SynthArgs syn;
  auto* synth_cmd = app.add_subcommand("synth", "generate synthetic engine data");
  synth_cmd->add_option("--engine", syn.engine, "sinusoid|cubic|quadratic|random-linear")->capture_default_str();
  synth_cmd->add_option("-n,--rows", syn.n)->capture_default_str()->check(CLI::PositiveNumber);
  synth_cmd->add_option("--input-dim", syn.input_dim, "default 1 for sinusoid, else 20")->check(CLI::PositiveNumber);
  synth_cmd->add_option("--degree", syn.degree, "sinusoid feature degree")->capture_default_str();
  synth_cmd->add_option("--noise-std", syn.noise_std)->capture_default_str()->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--coef-seed", syn.coefficient_seed)->capture_default_str();
  synth_cmd->add_option("--seed", syn.seed)->capture_default_str();
  synth_cmd->add_option("--out", syn.out)->required();

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "sweep P, N/P and seeds");
  bench_cmd->add_option("--engine", bench.engine)->capture_default_str();
  bench_cmd->add_option("--p-grid", bench.p_grid)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--ratio-grid", bench.ratio_grid)->delimiter(',')->capture_default_str();
  bench_cmd->add_option("--seeds", bench.seeds)->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_option("--noise-std", bench.noise_std)->capture_default_str()->check(CLI::NonNegativeNumber);
  bench_cmd->add_option("--test-fraction", bench.test_fraction)->capture_default_str();
  bench_cmd->add_option("--resamples", bench.resamples)->capture_default_str()->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--baseline-only", bench.baseline_only, "time the ridge fit alone");
  bench_cmd->add_option("--out", bench.out, "CSV (default stdout)");

  RefminArgs ref;
  auto* ref_cmd = app.add_subcommand("refmin", "directly minimize the ensemble generalization error");
  ref_cmd->add_option("train_csv", ref.train)->required()->check(CLI::ExistingFile);
  ref_cmd->add_option("--target", ref.target)->capture_default_str();
  ref_cmd->add_option("--weight", ref.weight);
  ref_cmd->add_option("--members", ref.members, "ensemble size (0: one per row)")->capture_default_str();
  ref_cmd->add_option("--sigma-scale", ref.sigma_scale)->capture_default_str()->check(CLI::PositiveNumber);
  ref_cmd->add_option("--init", ref.init, "jitter|pops")->capture_default_str();
  ref_cmd->add_option("--steps", ref.steps)->capture_default_str()->check(CLI::PositiveNumber);
  ref_cmd->add_option("--step-size", ref.step_size)->capture_default_str()->check(CLI::PositiveNumber);
  ref_cmd->add_option("--seed", ref.seed)->capture_default_str();
  ref_cmd->add_option("--noise-var", ref.noise_var)->capture_default_str()->check(CLI::PositiveNumber);
  ref_cmd->add_option("--out", ref.out, "members CSV")->required();
  ref_cmd->add_option("--log", ref.log, "iteration log");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit, out, err);
    if (*pred_cmd) return cmd_predict(pred, out, err);
    if (*eval_cmd) return cmd_eval(ev, out, err);
    if (*synth_cmd) return cmd_synth(syn, out, err);
    if (*bench_cmd) return cmd_bench(bench, out, err);
    if (*ref_cmd) return cmd_refmin(ref, out, err);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  } catch (const std::exception& ex) {
    err << "internal error: " << ex.what() << '\n';
    return 2;
  }
  return 2;
}

}  // namespace pops
