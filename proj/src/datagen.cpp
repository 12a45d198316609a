#include "qbss/datagen.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "qbss/errors.hpp"
#include "qbss/rng.hpp"

namespace qbss {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string location(std::size_t row, std::size_t col) {
  return "row " + std::to_string(row) + ", column " + std::to_string(col);
}

Eigen::MatrixXd draw_rows(int n, const Eigen::MatrixXd& chol, Rng& rng) {
  const auto p = chol.rows();
  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd z(p);
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z(j) = rng.normal();
    X.row(i) = (chol * z).transpose();
  }
  return X;
}

Eigen::VectorXd draw_response(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta, double sigma2, Rng& rng) {
  Eigen::VectorXd y = X * beta;
  const double sd = std::sqrt(sigma2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += sd * rng.normal();
  return y;
}

}  // namespace

Sparsity parse_sparsity(const std::string& text) {
  if (text == "strong") return Sparsity::Strong;
  if (text == "weak") return Sparsity::Weak;
  raise(ErrorKind::InvalidArgument, "sparsity must be strong or weak, got '" + text + "'");
}

std::string to_string(Sparsity sparsity) { return sparsity == Sparsity::Strong ? "strong" : "weak"; }

void SimScenario::validate() const {
  if (n < 1 || n_test < 1 || p < 1) raise(ErrorKind::InvalidArgument, "n, n_test and p must be positive");
  if (s < 0 || s > p) raise(ErrorKind::InvalidArgument, "sparsity s must lie in [0, p]");
  if (!(rho >= 0.0 && rho < 1.0)) raise(ErrorKind::InvalidArgument, "rho must lie in [0, 1)");
  if (!(snr > 0.0)) raise(ErrorKind::InvalidArgument, "snr must be positive");
}

Eigen::MatrixXd toeplitz_sigma(int p, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) raise(ErrorKind::InvalidArgument, "rho must lie in [0, 1)");
  Eigen::MatrixXd sigma(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) sigma(i, j) = std::pow(rho, std::abs(i - j));
  }
  return sigma;
}

Eigen::VectorXd make_beta(int p, int s, Sparsity kind) {
  if (s < 0 || s > p) raise(ErrorKind::InvalidArgument, "sparsity s must lie in [0, p]");
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (int j = 0; j < s; ++j) {
    beta(j) = kind == Sparsity::Strong ? 1.0 : static_cast<double>(s - j) / s;
  }
  return beta;
}

SubsetIndex SyntheticData::truth() const { return support_of(beta_star); }

SyntheticData gen_linear(const SimScenario& scenario) {
  scenario.validate();
  SyntheticData out;
  out.sigma = toeplitz_sigma(scenario.p, scenario.rho);
  out.beta_star = make_beta(scenario.p, scenario.s, scenario.sparsity);
  const double signal = out.beta_star.dot(out.sigma * out.beta_star);
  if (std::isinf(scenario.snr)) {
    out.sigma2 = 0.0;
  } else if (signal == 0.0) {
    raise(ErrorKind::DegenerateSignal, "beta*^T Sigma beta* is zero, SNR cannot be met");
  } else {
    out.sigma2 = signal / scenario.snr;
  }

  const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(out.sigma).matrixL();
  Rng rng(scenario.seed);
  Eigen::MatrixXd X = draw_rows(scenario.n, chol, rng);
  Eigen::VectorXd y = draw_response(X, out.beta_star, out.sigma2, rng);
  Eigen::MatrixXd X_test = draw_rows(scenario.n_test, chol, rng);
  Eigen::VectorXd y_test = draw_response(X_test, out.beta_star, out.sigma2, rng);

  const Dataset raw_train = make_dataset(std::move(X), std::move(y));
  const Dataset raw_test = make_dataset(std::move(X_test), std::move(y_test));
  const ColumnMeans means = column_means(raw_train);
  out.train = center_with(raw_train, means);
  out.test = center_with(raw_test, means);
  return out;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorKind::ParseError, "cannot open " + path.string());
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (!have_header) {
      for (std::string_view f : fields) {
        if (f.size() >= 2 && f.front() == '"' && f.back() == '"') f = f.substr(1, f.size() - 2);
        table.header.emplace_back(f);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size()) {
      raise(ErrorKind::ParseError, location(line_no, fields.size()) + ": expected " +
                                       std::to_string(table.header.size()) + " fields, found " +
                                       std::to_string(fields.size()));
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      const std::string_view cell = fields[c];
      double value = 0.0;
      const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (cell.empty() || ec != std::errc() || end != cell.data() + cell.size() || !std::isfinite(value)) {
        raise(ErrorKind::NonNumericCell, location(line_no, c + 1) + ": '" + std::string(cell) + "' is not a number");
      }
      row.push_back(value);
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_header) raise(ErrorKind::ParseError, path.string() + " has no header row");
  return table;
}

CsvSplit load_csv(const std::filesystem::path& path, const std::string& response, double split_fraction,
                  std::uint64_t seed, const std::vector<std::string>& drop) {
  if (!(split_fraction > 0.0 && split_fraction <= 1.0)) {
    raise(ErrorKind::InvalidArgument, "split fraction must lie in (0, 1]");
  }
  const CsvTable csv = read_csv(path);
  const auto find = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(csv.header.begin(), csv.header.end(), name);
    if (it == csv.header.end()) raise(ErrorKind::MissingColumn, "column '" + name + "' not found");
    return static_cast<std::size_t>(it - csv.header.begin());
  };
  const std::size_t response_col = find(response);
  std::vector<bool> excluded(csv.header.size(), false);
  excluded[response_col] = true;
  for (const std::string& name : drop) excluded[find(name)] = true;

  std::vector<std::size_t> predictors;
  std::vector<std::string> names;
  for (std::size_t c = 0; c < csv.header.size(); ++c) {
    if (!excluded[c]) {
      predictors.push_back(c);
      names.push_back(csv.header[c]);
    }
  }
  if (predictors.empty()) raise(ErrorKind::InvalidArgument, "no predictor columns left");

  const std::size_t n = csv.rows.size();
  if (n < 2) raise(ErrorKind::InvalidArgument, "need at least two data rows");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));
  const auto n_train = static_cast<std::size_t>(
      std::clamp<long long>(std::llround(split_fraction * static_cast<double>(n)), 1, static_cast<long long>(n)));
  if (n_train == n) raise(ErrorKind::EmptyTestSet, "split leaves no test rows");

  const auto build = [&](std::size_t begin, std::size_t end) {
    Eigen::MatrixXd X(static_cast<Eigen::Index>(end - begin), static_cast<Eigen::Index>(predictors.size()));
    Eigen::VectorXd y(static_cast<Eigen::Index>(end - begin));
    for (std::size_t i = begin; i < end; ++i) {
      const auto& row = csv.rows[order[i]];
      const auto r = static_cast<Eigen::Index>(i - begin);
      y(r) = row[response_col];
      for (std::size_t k = 0; k < predictors.size(); ++k) X(r, static_cast<Eigen::Index>(k)) = row[predictors[k]];
    }
    return make_dataset(std::move(X), std::move(y), names);
  };
  const Dataset train = build(0, n_train);
  const Dataset test = build(n_train, n);
  const ColumnMeans means = column_means(train);
  return CsvSplit{center_with(train, means), center_with(test, means)};
}

}  // namespace qbss
