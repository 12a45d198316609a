#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qbss {

/// Largest p for which a full 2^p loss table is materialized (2^24 doubles).
inline constexpr int kMaxTableBits = 24;

/// Singular values below this fraction of the largest are treated as zero.
inline constexpr double kRankTolerance = 1e-12;

struct Dataset {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> column_names;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

/// Checks shape agreement, n >= 1, p >= 1 and finiteness. Missing column
/// names are filled in as x1..xp.
Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y, std::vector<std::string> names = {});

struct ColumnMeans {
  Eigen::VectorXd x;
  double y = 0.0;
};

ColumnMeans column_means(const Dataset& data);

/// Copy with every column of X and y shifted to zero mean.
Dataset center(const Dataset& data);

/// Copy shifted by externally supplied means (test rows use training means).
Dataset center_with(const Dataset& data, const ColumnMeans& means);

/// A covariate subset encoded as a basis-state index: bit j set means
/// covariate j (0-based) is included.
class SubsetIndex {
 public:
  SubsetIndex() = default;
  SubsetIndex(std::uint64_t value, int p);

  static SubsetIndex from_columns(std::span<const int> columns, int p);

  std::uint64_t value() const { return value_; }
  int p() const { return p_; }
  int size() const;
  bool contains(int column) const { return ((value_ >> column) & 1U) != 0; }
  std::vector<int> columns() const;

  friend bool operator==(const SubsetIndex&, const SubsetIndex&) = default;

 private:
  std::uint64_t value_ = 0;
  int p_ = 0;
};

/// Support of a coefficient vector (exact zeros excluded).
SubsetIndex support_of(const Eigen::VectorXd& beta);

struct FitResult {
  SubsetIndex subset;
  Eigen::VectorXd coefficients;  // over included covariates, ascending column order
  Eigen::VectorXd full_beta;     // length p, zero at excluded positions
  int rank = 0;
};

enum class LossKind { TrainMse, TestMse };

struct LossTable {
  int p = 0;
  std::vector<double> values;
  LossKind kind = LossKind::TestMse;

  std::uint64_t size() const { return values.size(); }
  double operator[](std::uint64_t i) const { return values[i]; }
};

/// Thin SVD truncated at the numerical rank.
struct CompactSvd {
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
  Eigen::MatrixXd V;

  int rank() const { return static_cast<int>(sigma.size()); }
};

CompactSvd compact_svd(const Eigen::MatrixXd& A);

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X, SubsetIndex subset);

/// Minimum-norm least squares via the compact SVD. Throws SubsetTooLarge when
/// the subset has more covariates than observations.
FitResult ols_fit(const Dataset& train, SubsetIndex subset);

/// (1/n) * sum of squared residuals of `fit` on `train`.
double train_mse(const Dataset& train, const FitResult& fit);

/// Linear predictor sum_r sigma_r^{-1} (x^T v_r)(u_r^T y) over the compact SVD
/// of the included columns. `x_new` may hold either the |subset| included
/// values or all p values (excluded entries are then ignored).
double predict_svd(const Dataset& train, SubsetIndex subset, std::span<const double> x_new);

/// Held-out mean squared prediction error of the SVD predictor.
double pred_error(const Dataset& train, const Dataset& test, SubsetIndex subset);

/// Loss of every subset 0..2^p-1. Subsets are evaluated across `threads`
/// workers; each entry is computed independently so the result does not
/// depend on the schedule.
LossTable build_loss_table(const Dataset& train, const Dataset& test, LossKind kind,
                           unsigned threads = 1);

struct QlpRecovery {
  double offdiag = 0.0;  // off-diagonal element of the ancilla density matrix
  double p1 = 0.0;       // post-selection probability sum_r (c / lambda_r)^2
  double c = 0.0;        // rotation constant
  double y_hat = 0.0;    // prediction after removing the known normalization
};

/// Linear-algebra simulation of the quantum linear prediction circuit: Frobenius
/// normalized encoding of X_d, eigenvalues lambda_r of the normalized Gram
/// matrix, conditional rotation by c / lambda_r and readout of the inner
/// products from the ancilla coherence. `c` defaults to min_r lambda_r.
QlpRecovery qlp_recover(const Dataset& train, SubsetIndex subset, std::span<const double> x_new,
                        std::optional<double> c = std::nullopt);

}  // namespace qbss
