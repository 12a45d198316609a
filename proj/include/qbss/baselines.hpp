#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qbss/regress.hpp"
#include "qbss/rng.hpp"

namespace qbss {

struct Metrics {
  int fp = 0;
  int fn = 0;
  double rte = 0.0;
};

/// Argmin over the whole table, smallest index on ties.
std::uint64_t exhaustive_bss(const LossTable& table);

struct StepwisePath {
  std::vector<SubsetIndex> models;     // models[t] has t covariates
  std::vector<double> test_errors;     // prediction error of models[t]
  std::size_t selected = 0;
};

/// Greedy forward selection on training MSE; the path model with the smallest
/// held-out prediction error is selected, the smaller model on rounding-level ties.
StepwisePath forward_stepwise_path(const Dataset& train, const Dataset& test);
SubsetIndex forward_stepwise(const Dataset& train, const Dataset& test);

inline constexpr double kLassoTolerance = 1e-7;
inline constexpr int kLassoMaxSweeps = 100000;

/// Cyclic coordinate descent for (1/2n)||y - X b||^2 + lambda ||b||_1 started
/// from `warm`. Converged when no coordinate moves by more than the tolerance
/// (scaled by the column's root mean square).
Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, double lambda,
                         const Eigen::VectorXd& warm, double tolerance = kLassoTolerance,
                         int max_sweeps = kLassoMaxSweeps);

/// max_j |x_j^T y| / n.
double lasso_lambda_max(const Eigen::MatrixXd& X, const Eigen::VectorXd& y);

/// `count` log-spaced values from lambda_max down to ratio * lambda_max.
std::vector<double> lasso_lambda_grid(double lambda_max, int count = 100, double ratio = 1e-3);

struct LassoResult {
  SubsetIndex subset;
  Eigen::VectorXd beta;
  double lambda = 0.0;
  std::vector<double> cv_errors;  // one per grid value
};

/// Lasso with the penalty chosen by K-fold cross-validated MSE. An empty grid
/// means the default 100-point grid from lambda_max.
LassoResult lasso_cv(const Dataset& train, std::span<const double> lambda_grid, int folds, Rng& rng);

struct FpFn {
  int fp = 0;
  int fn = 0;
};

FpFn fp_fn(SubsetIndex selected, SubsetIndex truth);

/// (b - b*)^T Sigma (b - b*) / sigma2 + 1.
double rte(const Eigen::VectorXd& beta_hat, const Eigen::VectorXd& beta_star,
           const Eigen::MatrixXd& sigma, double sigma2);

double accuracy_rate(const std::vector<bool>& outcomes);

}  // namespace qbss
