#include "qbss/baselines.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qbss/errors.hpp"

namespace qbss {

namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), X.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = X.row(rows[i]);
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& y, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = y(rows[i]);
  return out;
}

}  // namespace

std::uint64_t exhaustive_bss(const LossTable& table) {
  if (table.values.empty()) raise(ErrorKind::InvalidArgument, "loss table is empty");
  std::uint64_t best = 0;
  for (std::uint64_t i = 1; i < table.values.size(); ++i) {
    if (table.values[i] < table.values[best]) best = i;
  }
  return best;
}

StepwisePath forward_stepwise_path(const Dataset& train, const Dataset& test) {
  const int p = static_cast<int>(train.p());
  const int max_size = static_cast<int>(std::min<Eigen::Index>(train.n(), train.p()));
  StepwisePath path;
  SubsetIndex current(0, p);
  path.models.push_back(current);
  for (int step = 0; step < max_size; ++step) {
    double best_loss = std::numeric_limits<double>::infinity();
    int best_j = -1;
    for (int j = 0; j < p; ++j) {
      if (current.contains(j)) continue;
      const SubsetIndex candidate(current.value() | (std::uint64_t{1} << j), p);
      const double loss = train_mse(train, ols_fit(train, candidate));
      if (loss < best_loss) {
        best_loss = loss;
        best_j = j;
      }
    }
    current = SubsetIndex(current.value() | (std::uint64_t{1} << best_j), p);
    path.models.push_back(current);
  }
  for (const SubsetIndex& model : path.models) path.test_errors.push_back(pred_error(train, test, model));
  // Errors closer than rounding level to the minimum count as ties; the
  // smallest such model wins.
  const double best = *std::min_element(path.test_errors.begin(), path.test_errors.end());
  const double slack = kRankTolerance * path.test_errors.front();
  while (path.test_errors[path.selected] > best + slack) ++path.selected;
  return path;
}

SubsetIndex forward_stepwise(const Dataset& train, const Dataset& test) {
  const StepwisePath path = forward_stepwise_path(train, test);
  return path.models[path.selected];
}

Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                         const Eigen::VectorXd& warm, double tolerance, int max_sweeps) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (lambda < 0.0) raise(ErrorKind::InvalidArgument, "lambda must be non-negative");
  Eigen::VectorXd beta = warm.size() == p ? warm : Eigen::VectorXd::Zero(p);
  const Eigen::VectorXd col_sq = X.colwise().squaredNorm().transpose() / static_cast<double>(n);
  Eigen::VectorXd residual = y - X * beta;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_move = 0.0;
    for (Eigen::Index j = 0; j < p; ++j) {
      if (col_sq(j) == 0.0) {
        beta(j) = 0.0;
        continue;
      }
      const double z = X.col(j).dot(residual) / static_cast<double>(n) + col_sq(j) * beta(j);
      const double updated = soft_threshold(z, lambda) / col_sq(j);
      const double delta = updated - beta(j);
      if (delta != 0.0) {
        residual.noalias() -= delta * X.col(j);
        beta(j) = updated;
        max_move = std::max(max_move, std::abs(delta) * std::sqrt(col_sq(j)));
      }
    }
    if (max_move < tolerance) return beta;
  }
  raise(ErrorKind::NoConvergence, "coordinate descent did not converge within " +
                                      std::to_string(max_sweeps) + " sweeps at lambda = " +
                                      std::to_string(lambda));
}

double lasso_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  // Same arithmetic as the first coordinate update, so lambda_max gives exactly zero.
  double top = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) top = std::max(top, std::abs(X.col(j).dot(y) / static_cast<double>(X.rows())));
  return top;
}

std::vector<double> lasso_lambda_grid(double lambda_max, int count, double ratio) {
  std::vector<double> grid;
  if (count <= 0) return grid;
  if (count == 1) return {lambda_max};
  const double log_hi = std::log(lambda_max);
  const double log_lo = std::log(lambda_max * ratio);
  for (int k = 0; k < count; ++k) {
    grid.push_back(std::exp(log_hi + (log_lo - log_hi) * k / (count - 1)));
  }
  grid.front() = lambda_max;
  return grid;
}

LassoResult lasso_cv(const Dataset& train, std::span<const double> lambda_grid, int folds, Rng& rng) {
  const Eigen::Index n = train.n();
  const Eigen::Index p = train.p();
  std::vector<double> grid(lambda_grid.begin(), lambda_grid.end());
  if (grid.empty()) grid = lasso_lambda_grid(lasso_lambda_max(train.X, train.y));
  if (grid.empty()) raise(ErrorKind::InvalidArgument, "lambda grid is empty");
  folds = static_cast<int>(std::min<Eigen::Index>(std::max(folds, 2), n));
  if (n < 2) raise(ErrorKind::InvalidArgument, "cross-validation needs at least two observations");

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  rng.shuffle(std::span<Eigen::Index>(perm));
  std::vector<int> fold_of(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < perm.size(); ++i) fold_of[static_cast<std::size_t>(perm[i])] = static_cast<int>(i % folds);

  LassoResult result;
  result.cv_errors.assign(grid.size(), 0.0);
  for (int f = 0; f < folds; ++f) {
    std::vector<Eigen::Index> fit_rows;
    std::vector<Eigen::Index> held_rows;
    for (Eigen::Index i = 0; i < n; ++i) (fold_of[static_cast<std::size_t>(i)] == f ? held_rows : fit_rows).push_back(i);
    const Eigen::MatrixXd X_fit = take_rows(train.X, fit_rows);
    const Eigen::VectorXd y_fit = take_rows(train.y, fit_rows);
    const Eigen::MatrixXd X_held = take_rows(train.X, held_rows);
    const Eigen::VectorXd y_held = take_rows(train.y, held_rows);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
    for (std::size_t k = 0; k < grid.size(); ++k) {
      beta = lasso_cd(X_fit, y_fit, grid[k], beta);
      result.cv_errors[k] += (y_held - X_held * beta).squaredNorm();
    }
  }
  for (double& e : result.cv_errors) e /= static_cast<double>(n);

  const std::size_t best = static_cast<std::size_t>(
      std::min_element(result.cv_errors.begin(), result.cv_errors.end()) - result.cv_errors.begin());
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  for (std::size_t k = 0; k <= best; ++k) beta = lasso_cd(train.X, train.y, grid[k], beta);
  result.beta = beta;
  result.lambda = grid[best];
  result.subset = support_of(beta);
  return result;
}

FpFn fp_fn(SubsetIndex selected, SubsetIndex truth) {
  if (selected.p() != truth.p()) raise(ErrorKind::InvalidArgument, "subsets have different p");
  return FpFn{std::popcount(selected.value() & ~truth.value()),
              std::popcount(truth.value() & ~selected.value())};
}

double rte(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_star,
           const Eigen::MatrixXd& sigma, double sigma2) {
  if (beta_hat.size() != beta_star.size() || sigma.rows() != beta_hat.size() || sigma.cols() != beta_hat.size()) {
    raise(ErrorKind::InvalidArgument, "rte arguments are not conformable");
  }
  if (!(sigma2 > 0.0)) raise(ErrorKind::InvalidArgument, "sigma2 must be positive");
  const Eigen::VectorXd diff = beta_hat - beta_star;
  return diff.dot(sigma * diff) / sigma2 + 1.0;
}

double accuracy_rate(const std::vector<bool>& outcomes) {
  if (outcomes.empty()) raise(ErrorKind::InvalidArgument, "no outcomes");
  const auto hits = std::count(outcomes.begin(), outcomes.end(), true);
  return static_cast<double>(hits) / static_cast<double>(outcomes.size());
}

}  // namespace qbss
