#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qbss/regress.hpp"
#include "qbss/rng.hpp"

namespace qbss::testing {

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline Eigen::VectorXd gaussian_vector(Eigen::Index size, Rng& rng) {
  Eigen::VectorXd v(size);
  for (Eigen::Index i = 0; i < size; ++i) v(i) = rng.normal();
  return v;
}

inline Dataset random_dataset(Eigen::Index n, Eigen::Index p, Rng& rng) {
  return make_dataset(gaussian_matrix(n, p, rng), gaussian_vector(n, rng));
}

// Pearson statistic of observed counts against expected probabilities.
inline double chi_square(const std::vector<std::uint64_t>& counts, const std::vector<double>& probs) {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  double stat = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double expected = probs[i] * static_cast<double>(total);
    const double diff = static_cast<double>(counts[i]) - expected;
    stat += diff * diff / expected;
  }
  return stat;
}

// Upper 0.1% points of the chi-square distribution.
inline double chi_square_999(int df) {
  switch (df) {
    case 1: return 10.827566170662733;
    case 3: return 16.26623619623813;
    case 7: return 24.321886347856854;
    case 15: return 37.69729821835383;
    case 31: return 61.098306081058126;
    case 127: return 181.9930452197729;
    case 255: return 330.51974363400586;
    default: return 0.0;
  }
}

}  // namespace qbss::testing
