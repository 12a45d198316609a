#include <doctest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "qbss/errors.hpp"
#include "qbss/qas.hpp"
#include "qbss/theory.hpp"

using namespace qbss;

TEST_CASE("uniform tables") {
  Rng rng(1);
  const LossTable t = uniform_loss_table(6, rng);
  CHECK(t.size() == 64);
  for (double v : t.values) CHECK((v >= 0.0 && v < 1.0));
  CHECK_THROWS_AS(uniform_loss_table(0, rng), Error);
  CHECK_THROWS_AS(uniform_loss_table(kMaxTableBits + 1, rng), Error);
}

TEST_CASE("descent chain distribution equals explicit matrix powers") {
  for (std::uint64_t dim : {1, 2, 5, 16}) {
    const auto n = static_cast<Eigen::Index>(dim + 1);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index s = 0; s < n; ++s)
      for (Eigen::Index t = s; t < n; ++t) P(s, t) = 1.0 / static_cast<double>(n - s);
    Eigen::RowVectorXd pi = Eigen::RowVectorXd::Zero(n);
    pi(0) = 1.0;
    for (std::uint64_t z = 0; z <= 12; ++z) {
      const auto got = chain_distribution(dim, z);
      for (Eigen::Index k = 0; k < n; ++k) CHECK(std::abs(got[static_cast<std::size_t>(k)] - pi(k)) < 1e-12);
      pi = pi * P;
    }
  }
}

TEST_CASE("two-step chain probabilities are harmonic sums") {
  for (std::uint64_t dim : {3, 10, 40}) {
    const auto pi = chain_distribution(dim, 2);
    for (std::uint64_t j = 0; j <= dim; ++j) {
      double sum = 0.0;
      for (std::uint64_t i = dim + 1 - j; i <= dim + 1; ++i) sum += 1.0 / static_cast<double>(i);
      CHECK(pi[j] == doctest::Approx(sum / static_cast<double>(dim + 1)).epsilon(1e-13));
    }
  }
}

TEST_CASE("absorption and hitting-time pmf") {
  Rng rng(2);
  const auto rows = descent_chain(2, 10, 200000, rng);
  CHECK(rows[0].absorbed == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  double previous = 0.0, total = 0.0;
  for (const auto& row : rows) {
    CHECK(row.absorbed >= previous);
    CHECK(row.pmf == doctest::Approx(row.absorbed - previous).epsilon(1e-12));
    CHECK(std::abs(row.mc_pmf - row.pmf) <= 4 * row.mc_sigma + 1e-12);
    previous = row.absorbed;
    total += row.pmf;
  }
  CHECK(total <= 1.0 + 1e-12);
  CHECK(total == doctest::Approx(rows.back().absorbed).epsilon(1e-12));

  const auto wide = descent_chain(32, 15, 50000, rng);
  for (const auto& row : wide) CHECK(std::abs(row.mc_pmf - row.pmf) <= 4 * row.mc_sigma + 1e-12);
}

TEST_CASE("averaged success rows agree three ways") {
  const std::vector<AvgSuccessCase> cases{{4, 1, 1}, {64, 1, 8}, {64, 16, 3}, {1024, 5, 40}, {8, 7, 2}};
  Rng rng(3);
  const auto rows = avg_success_check(cases, 20000, rng);
  REQUIRE(rows.size() == cases.size());
  CHECK(rows[0].closed_form == doctest::Approx(0.25));
  for (const auto& row : rows) {
    CHECK(std::abs(row.closed_form - row.direct_sum) < 1e-12);
    const double sigma = std::sqrt(row.closed_form * (1 - row.closed_form) / 20000.0);
    CHECK(std::abs(row.sampled - row.closed_form) <= 4 * sigma + 1e-12);
    if (row.long_enough) CHECK(row.closed_form >= 0.25);
  }
}

TEST_CASE("iteration scaling rows") {
  QasConfig c;
  c.stop_constant = 30;
  const std::vector<int> ps{4, 6};
  const auto rows = iteration_scaling(ps, 200, c, 9, 1);
  const auto again = iteration_scaling(ps, 200, c, 9, 3);
  REQUIRE(rows.size() == 2);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    CHECK(rows[k].reached == 1.0);
    CHECK(rows[k].median <= rows[k].q90);
    CHECK(rows[k].q90_over_log2 == doctest::Approx(rows[k].q90 / ps[k]));
    CHECK(rows[k].q90 == again[k].q90);
    CHECK(rows[k].median == again[k].median);
  }
  c.stop_constant = 0.1;
  const auto cut = iteration_scaling(ps, 50, c, 9, 1);
  CHECK(cut[0].reached < 1.0);
  CHECK(std::isinf(cut[0].q90));
}

TEST_CASE("update cost sweep picks the requested rank") {
  QasConfig c;
  c.stop_constant = 30;
  const std::vector<int> ps{6};
  const std::vector<double> fractions{0.25, 1.0};
  const auto rows = update_cost_sweep(ps, fractions, 500, c, 4, 2);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].rank == 16);
  CHECK(rows[1].rank == 64);
  CHECK(rows[0].episodes == 500);
  CHECK(rows[1].ratio == doctest::Approx(rows[1].mean_grover_ops));
  const std::vector<double> bad{0.0};
  CHECK_THROWS_AS(update_cost_sweep(ps, bad, 10, c, 4), Error);
}
