#include "pops/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "pops/error.hpp"
#include "pops/io.hpp"

namespace pops {

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::optional<double> parse_double(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

}  // namespace

Dataset::Dataset(MatrixXd features, VectorXd targets, VectorXd weights,
                 std::vector<std::string> feature_names)
    : features_(std::move(features)),
      targets_(std::move(targets)),
      weights_(std::move(weights)),
      names_(std::move(feature_names)) {
  const Index n = features_.rows();
  const Index p = features_.cols();
  if (n < 1 || p < 1) throw Error(ErrorCode::EmptyFile, "dataset needs at least one row and one feature");
  if (targets_.size() != n || weights_.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "features, targets and weights disagree on row count");
  if (!names_.empty() && static_cast<Index>(names_.size()) != p)
    throw Error(ErrorCode::DimensionMismatch, "feature name count does not match feature columns");
  if (names_.empty()) {
    names_.reserve(static_cast<std::size_t>(p));
    for (Index j = 0; j < p; ++j) names_.push_back("f" + std::to_string(j));
  }

  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < p; ++j) {
      if (!std::isfinite(features_(i, j)))
        throw Error(ErrorCode::NonFiniteValue, "non-finite feature at row " + std::to_string(i),
                    static_cast<std::size_t>(i), static_cast<std::size_t>(j));
    }
    if (!std::isfinite(targets_(i)))
      throw Error(ErrorCode::NonFiniteValue, "non-finite target at row " + std::to_string(i),
                  static_cast<std::size_t>(i));
    if (!std::isfinite(weights_(i)) || weights_(i) <= 0.0)
      throw Error(ErrorCode::NonFiniteValue, "weights must be finite and positive (row " + std::to_string(i) + ")",
                  static_cast<std::size_t>(i));
    if (targets_(i) != 0.0 && features_.row(i).cwiseAbs().maxCoeff() == 0.0)
      throw Error(ErrorCode::EmptyPopsRow,
                  "row " + std::to_string(i) + " has all-zero features and a nonzero target",
                  static_cast<std::size_t>(i));
  }
  weights_ /= weights_.sum();
}

Dataset Dataset::uniform(MatrixXd features, VectorXd targets, std::vector<std::string> feature_names) {
  VectorXd w = VectorXd::Ones(features.rows());
  return Dataset(std::move(features), std::move(targets), std::move(w), std::move(feature_names));
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  MatrixXd f(static_cast<Index>(rows.size()), cols());
  VectorXd y(f.rows());
  VectorXd w(f.rows());
  for (Index k = 0; k < f.rows(); ++k) {
    const Index i = rows[static_cast<std::size_t>(k)];
    f.row(k) = features_.row(i);
    y(k) = targets_(i);
    w(k) = weights_(i);
  }
  return Dataset(std::move(f), std::move(y), std::move(w), names_);
}

namespace {

std::vector<std::string> read_header(std::istream& in, const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty())
    throw Error(ErrorCode::EmptyFile, path.string() + " has no header row");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  return split_fields(line);
}

std::size_t find_column(const std::vector<std::string>& header, const std::string& name) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw Error(ErrorCode::MissingColumn, "column '" + name + "' not in header");
  return static_cast<std::size_t>(it - header.begin());
}

// Row-major values of the selected columns for every remaining line.
std::vector<double> read_columns(std::istream& in, const std::filesystem::path& path,
                                 const std::vector<std::string>& header, const std::vector<std::size_t>& cols,
                                 std::size_t& rows) {
  std::vector<double> values;
  std::string line;
  rows = 0;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size())
      throw Error(ErrorCode::Format,
                  "row " + std::to_string(rows) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()),
                  rows);
    for (auto c : cols) {
      auto v = parse_double(fields[c]);
      if (!v || !std::isfinite(*v))
        throw Error(ErrorCode::NonFiniteValue,
                    "row " + std::to_string(rows) + ", column '" + header[c] + "': '" + fields[c] + "'", rows, c);
      values.push_back(*v);
    }
    ++rows;
  }
  if (rows == 0) throw Error(ErrorCode::EmptyFile, path.string() + " has no data rows");
  return values;
}

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const std::string& target_column,
                 const std::optional<std::string>& weight_column) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  const auto header = read_header(in, path);

  const std::size_t target_col = find_column(header, target_column);
  std::optional<std::size_t> weight_col;
  if (weight_column) weight_col = find_column(header, *weight_column);

  std::vector<std::size_t> cols;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c == target_col || (weight_col && c == *weight_col)) continue;
    cols.push_back(c);
    names.push_back(header[c]);
  }
  if (cols.empty()) throw Error(ErrorCode::MissingColumn, "no feature columns in " + path.string());
  const auto p = static_cast<Index>(cols.size());
  cols.push_back(target_col);
  if (weight_col) cols.push_back(*weight_col);

  std::size_t rows = 0;
  const auto values = read_columns(in, path, header, cols, rows);
  const RowMajor table = Eigen::Map<const RowMajor>(values.data(), static_cast<Index>(rows),
                                                    static_cast<Index>(cols.size()));
  VectorXd w = weight_col ? VectorXd(table.col(p + 1)) : VectorXd::Ones(table.rows());
  return Dataset(table.leftCols(p), table.col(p), std::move(w), std::move(names));
}

MatrixXd load_feature_columns(const std::filesystem::path& path, const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  const auto header = read_header(in, path);
  std::vector<std::size_t> cols;
  for (const auto& name : columns) cols.push_back(find_column(header, name));
  std::size_t rows = 0;
  const auto values = read_columns(in, path, header, cols, rows);
  return Eigen::Map<const RowMajor>(values.data(), static_cast<Index>(rows), static_cast<Index>(cols.size()));
}

void write_csv(const Dataset& data, const std::filesystem::path& path, const std::string& target_column,
               bool with_weights) {
  std::ostringstream out;
  for (const auto& name : data.feature_names()) out << name << ',';
  out << target_column;
  if (with_weights) out << ",w";
  out << '\n';
  for (Index i = 0; i < data.rows(); ++i) {
    for (Index j = 0; j < data.cols(); ++j) {
      out << format_double(data.features()(i, j)) << ',';
    }
    out << format_double(data.targets()(i));
    if (with_weights) {
      out << ',' << format_double(data.weights()(i));
    }
    out << '\n';
  }
  write_file_atomic(path, out.str());
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorCode::DegenerateSplit, "test fraction must lie in (0, 1)");
  const Index n = data.rows();
  const auto n_test = static_cast<Index>(std::llround(test_fraction * static_cast<double>(n)));
  if (n_test < 1 || n_test >= n)
    throw Error(ErrorCode::DegenerateSplit, "split of " + std::to_string(n) + " rows leaves an empty part");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::mt19937_64 rng(seed);
  for (Index i = n - 1; i > 0; --i) {
    std::uniform_int_distribution<Index> pick(0, i);
    std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(pick(rng))]);
  }
  std::vector<Index> test(order.begin(), order.begin() + n_test);
  std::vector<Index> train(order.begin() + n_test, order.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {data.subset(train), data.subset(test)};
}

}  // namespace pops
