// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Each criterion also has a wall-clock limit.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qbss/baselines.hpp"
#include "qbss/experiments.hpp"
#include "qbss/hybrid.hpp"
#include "qbss/qsim.hpp"
#include "qbss/regress.hpp"
#include "qbss/theory.hpp"

using namespace qbss;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Eigen::MatrixXd gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

Outcome backend_equivalence() {
  Rng rng(1);
  double worst = 0.0;
  for (int p = 1; p <= 8; ++p) {
    const std::uint64_t dim = std::uint64_t{1} << p;
    std::vector<std::uint64_t> order(dim);
    for (std::uint64_t i = 0; i < dim; ++i) order[i] = i;
    for (std::uint64_t m = 1; m < dim; ++m) {
      rng.shuffle(std::span<std::uint64_t>(order));
      std::vector<bool> marked(dim, false);
      for (std::uint64_t k = 0; k < m; ++k) marked[order[k]] = true;
      const MarkPredicate pred(dim, [&marked](std::uint64_t i) { return static_cast<bool>(marked[i]); });
      for (std::uint64_t j = 0; j <= 40; ++j) {
        const TwoLevelSuperposition closed = grover_closed_form(dim, m, j);
        const AmplitudeVector v = grover_statevector(dim, pred, j);
        for (std::uint64_t i = 0; i < dim; ++i) {
          worst = std::max(worst, std::abs(v[i] - (marked[i] ? closed.alpha : closed.beta)));
        }
      }
    }
  }
  return {worst <= 1e-10, "max |closed form - statevector| = " + num(worst)};
}

Outcome exact_grover_hit() {
  Rng rng(2);
  int hits = 0;
  for (int k = 0; k < 10000; ++k) hits += grover_search(4, 2, 1, rng) == 2;
  return {hits == 10000, std::to_string(hits) + "/10000 draws hit the marked index"};
}

Outcome averaged_success() {
  Rng rng(3);
  double worst = 0.0;
  int long_cases = 0, below_quarter = 0;
  for (int k = 0; k < 1000; ++k) {
    const int p = 1 + static_cast<int>(rng.below(20));
    const std::uint64_t dim = std::uint64_t{1} << p;
    const std::uint64_t m = 1 + rng.below(dim - 1);
    const std::uint64_t t = 1 + rng.below(300);
    const double theta = std::asin(std::sqrt(static_cast<double>(m) / static_cast<double>(dim)));
    double direct = 0.0;
    for (std::uint64_t j = 0; j < t; ++j) direct += std::pow(std::sin(static_cast<double>(2 * j + 1) * theta), 2);
    direct /= static_cast<double>(t);
    const double closed = avg_success_prob(dim, m, t);
    worst = std::max(worst, std::abs(closed - direct));
    if (static_cast<double>(t) >= 1.0 / std::sin(2 * theta)) {
      ++long_cases;
      below_quarter += closed < 0.25;
    }
  }
  return {worst <= 1e-12 && below_quarter == 0 && long_cases > 0,
          "max |closed - direct| = " + num(worst) + "; " + std::to_string(below_quarter) + " of " +
              std::to_string(long_cases) + " long-enough cases below 1/4"};
}

Outcome tuning() {
  TuneOptions o;
  o.k_list = {1, 5};
  o.lambda_min = o.lambda_max = 0.52;
  o.reps = 200;
  o.p = 5;
  const TuneResult r = run_tune(o);
  double k1 = 0.0, k5 = 0.0;
  for (const auto& s : r.summary) (s.k == 1 ? k1 : k5) = s.accuracy;
  return {k5 >= 0.90 && k5 >= k1, "accuracy K=5 " + num(k5) + ", K=1 " + num(k1) + " at lambda 0.52, D 32"};
}

Outcome iteration_scaling_check() {
  QasConfig c;
  c.lambda = 0.52;
  c.stop_constant = 30;
  const std::vector<int> ps{4, 6, 8, 10, 12};
  const auto rows = iteration_scaling(ps, 500, c, 5);
  double lo = INFINITY, hi = 0.0;
  std::string values;
  for (const auto& r : rows) {
    lo = std::min(lo, r.q90_over_log2);
    hi = std::max(hi, r.q90_over_log2);
    values += (values.empty() ? "" : " ") + num(r.q90_over_log2, 3);
  }
  const double ratio = hi / lo;
  return {std::isfinite(ratio) && ratio < 2.0, "q90 / log2 D = [" + values + "], max/min " + num(ratio)};
}

Outcome update_cost_check() {
  QasConfig c;
  c.lambda = 0.52;
  c.stop_constant = 30;
  const std::vector<int> ps{6, 8, 10};
  const std::vector<double> fractions{0.125, 0.25, 0.5, 0.75};
  const auto rows = update_cost_sweep(ps, fractions, 2000, c, 6);
  double hi = 0.0;
  for (const auto& r : rows) hi = std::max(hi, r.ratio);
  return {rows.size() == 12 && hi <= 16.0,
          "max mean ops / sqrt(D/r) = " + num(hi) + " over " + std::to_string(rows.size()) + " cells (limit 16)"};
}

Outcome vote_bound() {
  Rng rng(7);
  const std::vector<double> qs{0.6, 0.75, 0.9};
  const std::vector<unsigned> xis{2, 3, 4};
  const auto rows = vote_bound_check(qs, xis, 100000, rng);
  bool ok = rows.size() == 8;
  double anchor = 0.0;
  for (const auto& r : rows) {
    ok = ok && r.exact >= r.bound && r.empirical >= r.bound - 3.0 * r.mc_sigma;
    if (r.nodes == 9 && r.q == 0.75) anchor = r.bound;
  }
  ok = ok && std::abs(anchor - 0.897) < 5e-4;
  return {ok, std::to_string(rows.size()) + " admissible (q, K) points; bound(K=9, q=0.75) = " + num(anchor, 6)};
}

Outcome selection() {
  ScenarioOptions o = select_defaults();
  o.rho_list = {0.25};
  o.snr_list = {3.0};
  o.reps = 200;
  o.k = 3;
  o.lambda = 0.55;
  const auto rows = run_select(o);
  std::map<std::string, std::vector<double>> fp, fn, err;
  for (const auto& r : rows) {
    fp[r.method].push_back(r.fp);
    fn[r.method].push_back(r.fn);
    err[r.method].push_back(r.fp + r.fn);
  }
  const double med_fp = median(fp["qas"]), med_fn = median(fn["qas"]);
  const double gap = mean(err["grover_random"]) - mean(err["qas"]);
  return {med_fp == 0.0 && med_fn == 0.0 && gap >= 1.0,
          "QAS median FP " + num(med_fp) + ", median FN " + num(med_fn) + "; random minus QAS mean(FP+FN) " +
              num(gap)};
}

Outcome bss_equivalence() {
  ScenarioOptions o = compare_defaults();
  o.sparsity_list = {Sparsity::Strong};
  o.rho_list = {0.25};
  o.snr_list = {2.0};
  o.reps = 100;
  o.k = 5;
  o.lambda = 0.5;
  const auto rows = run_compare(o);
  std::map<std::uint64_t, std::uint64_t> qas, bss;
  for (const auto& r : rows) {
    if (r.method == "qas") qas[r.rep] = r.subset.value();
    if (r.method == "bss") bss[r.rep] = r.subset.value();
  }
  int same = 0;
  for (const auto& [rep, v] : qas) same += bss.at(rep) == v;
  const double share = static_cast<double>(same) / static_cast<double>(qas.size());
  return {qas.size() == 100 && share >= 0.90, "QAS equals the table argmin in " + num(share) + " of 100 replications"};
}

Outcome qlp() {
  Rng rng(10);
  double worst_qlp = 0.0, worst_ne = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto d = static_cast<Eigen::Index>(1 + rng.below(8));
    const auto n = static_cast<Eigen::Index>(d + 1 + rng.below(static_cast<std::uint64_t>(40 - d)));
    Eigen::MatrixXd X = gaussian(n, d, rng);
    Eigen::VectorXd y = gaussian(n, 1, rng).col(0);
    const Dataset train = make_dataset(X, y);
    const SubsetIndex all((std::uint64_t{1} << d) - 1, static_cast<int>(d));
    const Eigen::VectorXd x = gaussian(d, 1, rng).col(0);
    const std::vector<double> row(x.data(), x.data() + x.size());
    const double svd = predict_svd(train, all, row);
    const Eigen::VectorXd beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
    worst_ne = std::max(worst_ne, rel_diff(svd, x.dot(beta)));
    worst_qlp = std::max(worst_qlp, rel_diff(qlp_recover(train, all, row).y_hat, svd));
  }
  return {worst_qlp <= 1e-8 && worst_ne <= 1e-8,
          "max rel diff qlp vs svd " + num(worst_qlp) + ", svd vs normal equations " + num(worst_ne)};
}

Outcome metrics() {
  Rng rng(11);
  const Eigen::Index p = 10;
  const Eigen::MatrixXd A = gaussian(p, p, rng);
  const Eigen::MatrixXd sigma = A * A.transpose() + Eigen::MatrixXd::Identity(p, p);
  const Eigen::VectorXd beta = gaussian(p, 1, rng).col(0);
  const double self = rte(beta, beta, sigma, 2.5);
  int mismatches = 0;
  for (int k = 0; k < 1000; ++k) {
    const int bits = 1 + static_cast<int>(rng.below(20));
    const std::uint64_t a = rng.below(std::uint64_t{1} << bits), b = rng.below(std::uint64_t{1} << bits);
    std::set<int> sa, sb, diff_ab, diff_ba;
    for (int j = 0; j < bits; ++j) {
      if (a >> j & 1U) sa.insert(j);
      if (b >> j & 1U) sb.insert(j);
    }
    std::set_difference(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(diff_ab, diff_ab.end()));
    std::set_difference(sb.begin(), sb.end(), sa.begin(), sa.end(), std::inserter(diff_ba, diff_ba.end()));
    const FpFn e = fp_fn(SubsetIndex(a, bits), SubsetIndex(b, bits));
    mismatches += e.fp != static_cast<int>(diff_ab.size()) || e.fn != static_cast<int>(diff_ba.size());
  }
  return {self == 1.0 && mismatches == 0,
          "rte(beta*, beta*) = " + num(self, 17) + "; " + std::to_string(mismatches) + " fp/fn mismatches in 1000"};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> csvs(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") out[entry.path().filename().string()] = slurp(entry.path());
  }
  return out;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "qbss_acceptance_determinism";
  fs::remove_all(root);
  const fs::path data = root / "data.csv";
  fs::create_directories(root);
  {
    Rng rng(12);
    std::ofstream out(data);
    out << "u,v,w,z,y\n";
    for (int i = 0; i < 80; ++i) {
      const double u = rng.normal(), v = rng.normal(), w = rng.normal(), z = rng.normal();
      out << u << ',' << v << ',' << w << ',' << z << ',' << u - 0.5 * w + rng.normal() << '\n';
    }
  }
  const std::vector<std::pair<std::string, std::string>> commands{
      {"tune", "tune --reps 20 --lambda-min 0.5 --lambda-max 0.53 --seed 9"},
      {"select", "select --reps 10 --seed 9"},
      {"compare", "compare --reps 5 --seed 9"},
      {"theory", "theory --reps 50 --episodes 50 --chain-reps 2000 --samples 100 --seed 9"},
      {"run", "run --data " + data.string() + " --response y --method qas --seed 9"},
  };
  std::string failures;
  for (const auto& [name, args] : commands) {
    std::vector<std::map<std::string, std::string>> outputs;
    for (const auto& [tag, threads] : std::vector<std::pair<std::string, int>>{{"a", 1}, {"b", 1}, {"c", 3}}) {
      const fs::path dir = root / (name + "_" + tag);
      const std::string cmd = std::string(QBSS_CLI_PATH) + " " + args + " --threads " + std::to_string(threads) +
                              " --out " + dir.string() + " >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) failures += " " + name + "(exit)";
      outputs.push_back(csvs(dir));
    }
    if (outputs[0].empty() || outputs[0] != outputs[1]) failures += " " + name + "(same threads)";
    if (outputs[0] != outputs[2]) failures += " " + name + "(threads 1 vs 3)";
  }
  fs::remove_all(root);
  return {failures.empty(), failures.empty() ? "tune, select, compare, theory and run CSVs byte-identical"
                                             : "differences:" + failures};
}

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "backend equivalence", 30, backend_equivalence},
      {2, "exact Grover hit", 1, exact_grover_hit},
      {3, "averaged success probability", 5, averaged_success},
      {4, "tuning accuracy", 120, tuning},
      {5, "iteration scaling", 300, iteration_scaling_check},
      {6, "update cost scaling", 300, update_cost_check},
      {7, "vote success bound", 30, vote_bound},
      {8, "selection experiment", 180, selection},
      {9, "BSS equivalence", 180, bss_equivalence},
      {10, "QLP recovery", 5, qlp},
      {11, "metrics exactness", 1, metrics},
      {12, "CLI determinism", 120, determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds < c.limit_s;
    const bool pass = outcome.pass && in_time;
    failed += !pass;
    std::printf("%s %2d %s: %s (%.2f s, limit %g s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                outcome.detail.c_str(), seconds, c.limit_s, in_time ? "" : ", over time");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
