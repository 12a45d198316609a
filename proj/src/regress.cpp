#include "qbss/regress.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qbss/errors.hpp"
#include "qbss/parallel.hpp"

namespace qbss {

namespace {

bool all_finite(const Eigen::MatrixXd& m) { return m.allFinite(); }

// x_new restricted to the included covariates.
Eigen::VectorXd included_values(SubsetIndex subset, std::span<const double> x_new) {
  const int d = subset.size();
  Eigen::VectorXd x(d);
  if (static_cast<int>(x_new.size()) == d) {
    for (int k = 0; k < d; ++k) x(k) = x_new[k];
  } else if (static_cast<int>(x_new.size()) == subset.p()) {
    int k = 0;
    for (int j : subset.columns()) x(k++) = x_new[j];
  } else {
    raise(ErrorKind::InvalidArgument,
          "x_new has length " + std::to_string(x_new.size()) + ", expected " + std::to_string(d) +
              " or " + std::to_string(subset.p()));
  }
  return x;
}

// Minimum-norm coefficients V diag(1/sigma) U^T y over the included columns.
Eigen::VectorXd min_norm_coefficients(const Eigen::MatrixXd& Xd, const Eigen::VectorXd& y, int* rank) {
  if (Xd.cols() == 0) {
    if (rank) *rank = 0;
    return Eigen::VectorXd();
  }
  const CompactSvd svd = compact_svd(Xd);
  if (rank) *rank = svd.rank();
  const Eigen::VectorXd uty = svd.U.transpose() * y;
  return svd.V * uty.cwiseQuotient(svd.sigma);
}

void check_layout(const Dataset& a, const Dataset& b) {
  if (a.p() != b.p()) {
    raise(ErrorKind::InvalidArgument, "train and test have different numbers of covariates");
  }
}

}  // namespace

Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y, std::vector<std::string> names) {
  if (X.rows() < 1 || X.cols() < 1) {
    raise(ErrorKind::InvalidArgument, "dataset needs at least one row and one column");
  }
  if (X.rows() != y.size()) {
    raise(ErrorKind::InvalidArgument, "X has " + std::to_string(X.rows()) + " rows but y has " +
                                          std::to_string(y.size()) + " entries");
  }
  if (!all_finite(X) || !y.allFinite()) {
    raise(ErrorKind::InvalidArgument, "dataset contains non-finite entries");
  }
  if (names.empty()) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) names.push_back("x" + std::to_string(j + 1));
  } else if (static_cast<Eigen::Index>(names.size()) != X.cols()) {
    raise(ErrorKind::InvalidArgument, "column_names length does not match X");
  }
  return Dataset{std::move(X), std::move(y), std::move(names)};
}

ColumnMeans column_means(const Dataset& data) {
  return ColumnMeans{data.X.colwise().mean().transpose(), data.y.mean()};
}

Dataset center(const Dataset& data) { return center_with(data, column_means(data)); }

Dataset center_with(const Dataset& data, const ColumnMeans& means) {
  if (means.x.size() != data.p()) {
    raise(ErrorKind::InvalidArgument, "centering means do not match the covariate count");
  }
  Dataset out = data;
  out.X.rowwise() -= means.x.transpose();
  out.y.array() -= means.y;
  return out;
}

SubsetIndex::SubsetIndex(std::uint64_t value, int p) : value_(value), p_(p) {
  if (p < 0 || p > 63 || (p < 63 && value >= (std::uint64_t{1} << p))) {
    raise(ErrorKind::InvalidArgument,
          "subset index " + std::to_string(value) + " out of range for p = " + std::to_string(p));
  }
}

SubsetIndex SubsetIndex::from_columns(std::span<const int> columns, int p) {
  std::uint64_t value = 0;
  for (int j : columns) {
    if (j < 0 || j >= p) raise(ErrorKind::InvalidArgument, "column out of range");
    value |= std::uint64_t{1} << j;
  }
  return SubsetIndex(value, p);
}

int SubsetIndex::size() const { return std::popcount(value_); }

std::vector<int> SubsetIndex::columns() const {
  std::vector<int> cols;
  cols.reserve(size());
  for (int j = 0; j < p_; ++j) {
    if (contains(j)) cols.push_back(j);
  }
  return cols;
}

SubsetIndex support_of(const Eigen::VectorXd& beta) {
  std::uint64_t value = 0;
  for (Eigen::Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) value |= std::uint64_t{1} << j;
  }
  return SubsetIndex(value, static_cast<int>(beta.size()));
}

CompactSvd compact_svd(const Eigen::MatrixXd& A) {
  CompactSvd out;
  if (A.size() == 0) return out;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const double cutoff = kRankTolerance * (s.size() > 0 ? s(0) : 0.0);
  int rank = 0;
  while (rank < s.size() && s(rank) > cutoff && s(rank) > 0.0) ++rank;
  out.U = svd.matrixU().leftCols(rank);
  out.sigma = s.head(rank);
  out.V = svd.matrixV().leftCols(rank);
  return out;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, SubsetIndex subset) {
  const std::vector<int> cols = subset.columns();
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = X.col(cols[k]);
  return out;
}

FitResult ols_fit(const Dataset& train, SubsetIndex subset) {
  if (subset.p() != train.p()) raise(ErrorKind::InvalidArgument, "subset p does not match data");
  if (subset.size() > train.n()) {
    raise(ErrorKind::SubsetTooLarge, "subset has " + std::to_string(subset.size()) +
                                         " covariates but only " + std::to_string(train.n()) +
                                         " observations");
  }
  FitResult fit;
  fit.subset = subset;
  fit.coefficients = min_norm_coefficients(select_columns(train.X, subset), train.y, &fit.rank);
  fit.full_beta = Eigen::VectorXd::Zero(train.p());
  int k = 0;
  for (int j : subset.columns()) fit.full_beta(j) = fit.coefficients(k++);
  return fit;
}

double train_mse(const Dataset& train, const FitResult& fit) {
  const Eigen::VectorXd residual = train.y - train.X * fit.full_beta;
  return residual.squaredNorm() / static_cast<double>(train.n());
}

double predict_svd(const Dataset& train, SubsetIndex subset, std::span<const double> x_new) {
  const Eigen::VectorXd x = included_values(subset, x_new);
  if (x.size() == 0) return 0.0;
  const CompactSvd svd = compact_svd(select_columns(train.X, subset));
  double y_hat = 0.0;
  for (int r = 0; r < svd.rank(); ++r) {
    y_hat += x.dot(svd.V.col(r)) * svd.U.col(r).dot(train.y) / svd.sigma(r);
  }
  return y_hat;
}

double pred_error(const Dataset& train, const Dataset& test, SubsetIndex subset) {
  check_layout(train, test);
  if (test.n() == 0) raise(ErrorKind::EmptyTestSet, "test set has no rows");
  if (subset.size() == 0) return test.y.squaredNorm() / static_cast<double>(test.n());
  const Eigen::VectorXd beta = min_norm_coefficients(select_columns(train.X, subset), train.y, nullptr);
  const Eigen::VectorXd residual = select_columns(test.X, subset) * beta - test.y;
  return residual.squaredNorm() / static_cast<double>(test.n());
}

LossTable build_loss_table(const Dataset& train, const Dataset& test, LossKind kind, unsigned threads) {
  check_layout(train, test);
  const int p = static_cast<int>(train.p());
  if (p > kMaxTableBits) {
    raise(ErrorKind::DimensionTooLarge, "p = " + std::to_string(p) + " exceeds the table guard of " +
                                            std::to_string(kMaxTableBits));
  }
  if (kind == LossKind::TestMse && test.n() == 0) raise(ErrorKind::EmptyTestSet, "test set has no rows");
  LossTable table;
  table.p = p;
  table.kind = kind;
  table.values.assign(std::uint64_t{1} << p, 0.0);
  parallel_for(table.values.size(), threads, [&](std::uint64_t i) {
    const SubsetIndex subset(i, p);
    if (kind == LossKind::TestMse) {
      table.values[i] = pred_error(train, test, subset);
    } else {
      const Eigen::VectorXd beta =
          min_norm_coefficients(select_columns(train.X, subset), train.y, nullptr);
      const Eigen::VectorXd residual =
          subset.size() == 0 ? Eigen::VectorXd(train.y) : Eigen::VectorXd(train.y - select_columns(train.X, subset) * beta);
      table.values[i] = residual.squaredNorm() / static_cast<double>(train.n());
    }
  });
  return table;
}

QlpRecovery qlp_recover(const Dataset& train, SubsetIndex subset, std::span<const double> x_new,
                        std::optional<double> c) {
  const Eigen::VectorXd x = included_values(subset, x_new);
  const Eigen::MatrixXd Xd = select_columns(train.X, subset);
  const double frobenius = Xd.norm();
  if (Xd.size() == 0 || frobenius == 0.0) raise(ErrorKind::ZeroVector, "included design is zero");
  const double x_norm = x.norm();
  const double y_norm = train.y.norm();
  if (x_norm == 0.0) raise(ErrorKind::ZeroVector, "new observation has zero norm");
  if (y_norm == 0.0) raise(ErrorKind::ZeroVector, "response has zero norm");

  // Amplitude encoding: sum_ij a_ij^2 = 1, so the singular values are sigma_r / ||X_d||_F.
  const CompactSvd svd = compact_svd(Xd / frobenius);
  const Eigen::VectorXd eigenvalues = svd.sigma.array().square();
  const double c_max = eigenvalues.minCoeff();
  QlpRecovery out;
  out.c = c.value_or(c_max);
  if (!(out.c > 0.0) || out.c > c_max * (1.0 + 1e-12)) {
    raise(ErrorKind::DomainError, "rotation constant must lie in (0, min eigenvalue]");
  }
  out.p1 = (out.c / eigenvalues.array()).square().sum();

  const Eigen::VectorXd x_unit = x / x_norm;
  const Eigen::VectorXd y_unit = train.y / y_norm;
  double inner = 0.0;
  for (int r = 0; r < svd.rank(); ++r) {
    inner += x_unit.dot(svd.V.col(r)) * y_unit.dot(svd.U.col(r)) / svd.sigma(r);
  }
  const double amplitude_scale = out.c / (2.0 * std::sqrt(out.p1));
  out.offdiag = amplitude_scale * inner;
  out.y_hat = out.offdiag / amplitude_scale * x_norm * y_norm / frobenius;
  return out;
}

}  // namespace qbss
