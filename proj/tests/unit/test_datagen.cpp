#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>

#include "qbss/datagen.hpp"
#include "qbss/errors.hpp"
#include "qbss/regress.hpp"

using namespace qbss;
namespace fs = std::filesystem;

namespace {

fs::path write_file(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "qbss_datagen_test";
  fs::create_directories(dir);
  const fs::path path = dir / name;
  std::ofstream(path) << text;
  return path;
}

std::string ten_rows() {
  std::string text = "a,b,y,id\n";
  for (int i = 0; i < 10; ++i) {
    text += std::to_string(i) + "," + std::to_string(i * i % 7) + "," + std::to_string(2 * i + 1) + "," +
            std::to_string(100 + i) + "\n";
  }
  return text;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an exception");
  return ErrorKind::InvalidArgument;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("toeplitz covariance") {
  CHECK(toeplitz_sigma(4, 0.0).isIdentity());
  const Eigen::MatrixXd s = toeplitz_sigma(2, 0.5);
  CHECK(s(0, 1) == 0.5);
  CHECK(s(1, 0) == 0.5);
  CHECK(s(1, 1) == 1.0);
  for (double rho = 0.0; rho <= 0.99; rho += 0.01) {
    const Eigen::MatrixXd m = toeplitz_sigma(12, rho);
    CHECK(Eigen::LLT<Eigen::MatrixXd>(m).info() == Eigen::Success);
    CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff() > 0.0);
  }
  CHECK_THROWS_AS(toeplitz_sigma(3, 1.0), Error);
}

TEST_CASE("true coefficient vectors") {
  Eigen::VectorXd strong(7);
  strong << 1, 1, 1, 1, 0, 0, 0;
  CHECK(make_beta(7, 4, Sparsity::Strong) == strong);
  Eigen::VectorXd weak(10);
  weak << 1, 0.8, 0.6, 0.4, 0.2, 0, 0, 0, 0, 0;
  CHECK((make_beta(10, 5, Sparsity::Weak) - weak).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(make_beta(5, 0, Sparsity::Weak).isZero(0.0));
  CHECK(parse_sparsity("weak") == Sparsity::Weak);
  CHECK_THROWS_AS(parse_sparsity("medium"), Error);
}

TEST_CASE("noise variance follows the target SNR") {
  SimScenario sc;
  sc.rho = 0.0;
  sc.p = 7;
  sc.s = 4;
  sc.snr = 1.0;
  CHECK(gen_linear(sc).sigma2 == doctest::Approx(4.0));
  sc.s = 0;
  CHECK(kind_of([&] { gen_linear(sc); }) == ErrorKind::DegenerateSignal);
  sc.snr = std::numeric_limits<double>::infinity();
  CHECK(gen_linear(sc).sigma2 == 0.0);
}

TEST_CASE("noiseless data make the true subset the minimal exact fit") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SimScenario sc;
    sc.p = 6;
    sc.s = 3;
    sc.snr = std::numeric_limits<double>::infinity();
    sc.seed = seed;
    const SyntheticData data = gen_linear(sc);
    const LossTable table = build_loss_table(data.train, data.test, LossKind::TestMse);
    // Supersets of the truth fit exactly as well and differ only by rounding;
    // they all have larger indices, so the first rounding-level minimum is the
    // minimal exact fit.
    const double slack = kRankTolerance * table[0];
    std::uint64_t first = table.size();
    for (std::uint64_t i = 0; i < table.size(); ++i) {
      if (table[i] <= slack) {
        CHECK((i & data.truth().value()) == data.truth().value());
        if (first == table.size()) first = i;
      }
    }
    CHECK(first == data.truth().value());
  }
}

TEST_CASE("sample covariance matches the Toeplitz matrix") {
  SimScenario sc;
  sc.n = 10000;
  sc.n_test = 1;
  sc.p = 6;
  sc.s = 2;
  sc.rho = 0.5;
  sc.seed = 42;
  const SyntheticData data = gen_linear(sc);
  const Eigen::MatrixXd cov = data.train.X.transpose() * data.train.X / (sc.n - 1.0);
  for (int i = 0; i < sc.p; ++i) {
    for (int j = 0; j < sc.p; ++j) {
      const double se = std::sqrt((data.sigma(i, i) * data.sigma(j, j) + data.sigma(i, j) * data.sigma(i, j)) / sc.n);
      CHECK(std::abs(cov(i, j) - data.sigma(i, j)) < 3 * se);
    }
  }
}

TEST_CASE("empirical SNR is close to the target at large n") {
  SimScenario sc;
  sc.n = 100000;
  sc.n_test = 1;
  sc.p = 10;
  sc.s = 5;
  sc.rho = 0.25;
  sc.snr = 2.0;
  sc.seed = 7;
  const SyntheticData data = gen_linear(sc);
  const Eigen::MatrixXd cov = data.train.X.transpose() * data.train.X / (sc.n - 1.0);
  const double empirical = data.beta_star.dot(cov * data.beta_star) / data.sigma2;
  CHECK(std::abs(empirical / sc.snr - 1.0) < 0.05);
}

TEST_CASE("generation is reproducible and centered with training means") {
  SimScenario sc;
  sc.seed = 5;
  const SyntheticData a = gen_linear(sc);
  const SyntheticData b = gen_linear(sc);
  CHECK(a.train.X == b.train.X);
  CHECK(a.test.y == b.test.y);
  sc.seed = 6;
  CHECK(gen_linear(sc).train.X != a.train.X);
  CHECK(a.train.X.colwise().mean().cwiseAbs().maxCoeff() < 1e-10);
  CHECK(std::abs(a.train.y.mean()) < 1e-10);
  CHECK(a.truth().value() == 0b11111);
}

TEST_CASE("csv loading and splitting") {
  const fs::path path = write_file("ten.csv", ten_rows());
  const CsvSplit split = load_csv(path, "y", 0.8, 3, {"id"});
  CHECK(split.train.n() == 8);
  CHECK(split.test.n() == 2);
  CHECK(split.train.column_names == std::vector<std::string>{"a", "b"});
  CHECK(std::abs(split.train.y.mean()) < 1e-12);

  const CsvSplit again = load_csv(path, "y", 0.8, 3, {"id"});
  CHECK(split.train.X == again.train.X);
  CHECK(split.test.y == again.test.y);

  CHECK(load_csv(path, "y").train.p() == 3);
  CHECK(kind_of([&] { load_csv(path, "target"); }) == ErrorKind::MissingColumn);
  CHECK(message_of([&] { load_csv(path, "target"); }).find("target") != std::string::npos);
  CHECK(kind_of([&] { load_csv(path, "y", 1.0); }) == ErrorKind::EmptyTestSet);
}

TEST_CASE("csv errors carry locations") {
  const fs::path bad_cell = write_file("cell.csv", "a,y\n1,2\n3,x\n");
  CHECK(kind_of([&] { read_csv(bad_cell); }) == ErrorKind::NonNumericCell);
  const std::string msg = message_of([&] { read_csv(bad_cell); });
  CHECK(msg.find("row 3, column 2") != std::string::npos);

  const fs::path ragged = write_file("ragged.csv", "a,y\n1,2\n3\n");
  CHECK(kind_of([&] { read_csv(ragged); }) == ErrorKind::ParseError);
  CHECK(kind_of([&] { read_csv(fs::temp_directory_path() / "qbss_missing_file.csv"); }) == ErrorKind::ParseError);
}
