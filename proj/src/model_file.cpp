#include "pops/model_file.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pops/error.hpp"

namespace pops {

using nlohmann::json;

namespace {

json vector_json(const VectorXd& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(std::move(row));
  }
  return rows;
}

VectorXd vector_from(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
}

MatrixXd matrix_from(const json& j, Index cols) {
  MatrixXd m(static_cast<Index>(j.size()), cols);
  for (Index i = 0; i < m.rows(); ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (static_cast<Index>(row.size()) != cols) throw Error(ErrorCode::Format, "ragged matrix in model file");
    for (Index c = 0; c < cols; ++c) m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
  }
  return m;
}

}  // namespace

std::string serialize_model(const ModelFile& model) {
  const RidgeFit& fit = model.ridge();
  const Hypercube& hc = model.hypercube;
  json doc;
  doc["format_version"] = model.format_version;
  doc["feature_names"] = model.feature_names;
  doc["target_column"] = model.target_column;
  doc["ridge"] = {
      {"theta_star", vector_json(fit.theta_star)},
      {"a_matrix", matrix_json(fit.a_matrix)},
      {"noise_var", fit.noise_var},
      {"prior_precision_scale", fit.prior_precision_scale},
      {"n_train", fit.n_train},
      {"loss_residual_var", fit.loss_residual_var},
  };
  doc["hypercube"] = {
      {"basis", matrix_json(hc.basis)},
      {"lower", vector_json(hc.lower)},
      {"upper", vector_json(hc.upper)},
      {"rank", hc.rank()},
      {"rank_rel_tol", hc.rank_rel_tol},
  };
  if (model.ensemble) {
    doc["ensemble"] = {
        {"corrections", matrix_json(model.ensemble->corrections.corrections)},
        {"weights", vector_json(model.ensemble->weights.values)},
        {"training_weights", vector_json(model.ensemble->weights.training_weights)},
        {"mass_scale", model.ensemble->weights.mass_scale},
        {"normalization", model.ensemble->weights.normalization},
    };
  }
  return doc.dump(1) + "\n";
}

ModelFile parse_model(const std::string& text) {
  ModelFile model;
  try {
    const json doc = json::parse(text);
    model.format_version = doc.at("format_version").get<int>();
    if (model.format_version != kModelFormatVersion)
      throw Error(ErrorCode::Format, "unsupported model format version " + std::to_string(model.format_version));
    model.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
    model.target_column = doc.at("target_column").get<std::string>();

    const json& r = doc.at("ridge");
    RidgeFit fit;
    fit.theta_star = vector_from(r.at("theta_star"));
    const Index p = fit.theta_star.size();
    fit.a_matrix = matrix_from(r.at("a_matrix"), p);
    fit.noise_var = r.at("noise_var").get<double>();
    fit.prior_precision_scale = r.at("prior_precision_scale").get<double>();
    fit.n_train = r.at("n_train").get<Index>();
    fit.loss_residual_var = r.at("loss_residual_var").get<double>();
    if (fit.a_matrix.rows() != p || static_cast<Index>(model.feature_names.size()) != p)
      throw Error(ErrorCode::Format, "model dimensions are inconsistent");

    const json& h = doc.at("hypercube");
    Hypercube& hc = model.hypercube;
    hc.base = fit;
    hc.basis = matrix_from(h.at("basis"), p);
    hc.lower = vector_from(h.at("lower"));
    hc.upper = vector_from(h.at("upper"));
    hc.rank_rel_tol = h.at("rank_rel_tol").get<double>();
    if (h.at("rank").get<Index>() != hc.basis.rows() || hc.lower.size() != hc.rank() || hc.upper.size() != hc.rank())
      throw Error(ErrorCode::Format, "hypercube rank does not match its bounds");

    if (doc.contains("ensemble")) {
      const json& e = doc.at("ensemble");
      EnsembleModel ens;
      ens.corrections.base = fit;
      ens.corrections.corrections = matrix_from(e.at("corrections"), p);
      ens.weights.values = vector_from(e.at("weights"));
      ens.weights.training_weights = vector_from(e.at("training_weights"));
      ens.weights.mass_scale = e.at("mass_scale").get<double>();
      ens.weights.normalization = e.at("normalization").get<double>();
      if (ens.weights.values.size() != ens.corrections.rows() ||
          ens.weights.training_weights.size() != ens.corrections.rows())
        throw Error(ErrorCode::Format, "ensemble weights do not match its corrections");
      model.ensemble = std::move(ens);
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::Format, std::string("malformed model file: ") + ex.what());
  }
  return model;
}

void save_model(const ModelFile& model, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_model(model));
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

}  // namespace pops
