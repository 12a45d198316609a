#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbss/regress.hpp"

namespace qbss {

enum class Sparsity { Strong, Weak };

Sparsity parse_sparsity(const std::string& text);
std::string to_string(Sparsity sparsity);

struct SimScenario {
  int n = 100;
  int n_test = 100;
  int p = 10;
  int s = 5;
  double rho = 0.25;
  double snr = 1.0;  // +inf gives noiseless responses
  Sparsity sparsity = Sparsity::Strong;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Sigma_ij = rho^|i-j|.
Eigen::MatrixXd toeplitz_sigma(int p, double rho);

/// Strong: s ones. Weak: 1, (s-1)/s, ..., 1/s. Zeros after the first s.
Eigen::VectorXd make_beta(int p, int s, Sparsity kind);

struct SyntheticData {
  Dataset train;  // centered
  Dataset test;   // centered with training means
  Eigen::VectorXd beta_star;
  Eigen::MatrixXd sigma;
  double sigma2 = 0.0;

  SubsetIndex truth() const;
};

/// Rows i.i.d. N_p(0, Sigma) through the Cholesky factor, noise variance
/// beta*^T Sigma beta* / SNR, independent test sample from the same law.
SyntheticData gen_linear(const SimScenario& scenario);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

/// Header row plus comma-separated numeric rows. Throws ParseError or
/// NonNumericCell with 1-based row/column positions.
CsvTable read_csv(const std::filesystem::path& path);

struct CsvSplit {
  Dataset train;
  Dataset test;
};

/// Seeded shuffle, first round(split * n) rows train, the rest test; both
/// centered with the training means.
CsvSplit load_csv(const std::filesystem::path& path, const std::string& response,
                  double split_fraction = 0.8, std::uint64_t seed = 0,
                  const std::vector<std::string>& drop = {});

}  // namespace qbss
