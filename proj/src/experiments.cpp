#include "qbss/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <tuple>

#include "qbss/baselines.hpp"
#include "qbss/errors.hpp"
#include "qbss/hybrid.hpp"
#include "qbss/parallel.hpp"
#include "qbss/qsim.hpp"
#include "qbss/theory.hpp"

#ifndef QBSS_VERSION
#define QBSS_VERSION "0.0.0"
#endif

namespace qbss {

namespace {

enum Stream : std::uint64_t { kData = 1, kNodes = 2, kOracle = 3, kRandom = 4, kLasso = 5 };

struct Scenario {
  Sparsity sparsity;
  double rho;
  double snr;
};

std::vector<Scenario> scenarios(const ScenarioOptions& options) {
  std::vector<Scenario> out;
  for (Sparsity sparsity : options.sparsity_list) {
    for (double rho : options.rho_list) {
      for (double snr : options.snr_list) out.push_back({sparsity, rho, snr});
    }
  }
  return out;
}

void validate(const ScenarioOptions& options) {
  if (options.reps == 0) raise(ErrorKind::InvalidArgument, "reps must be positive");
  if (options.rho_list.empty() || options.snr_list.empty() || options.sparsity_list.empty()) {
    raise(ErrorKind::InvalidArgument, "scenario grid is empty");
  }
  if (options.p > kMaxTableBits) {
    raise(ErrorKind::DimensionTooLarge, "p = " + std::to_string(options.p) + " exceeds the table guard of " +
                                            std::to_string(kMaxTableBits));
  }
}

class Stopwatch {
 public:
  explicit Stopwatch(bool enabled) : enabled_(enabled), start_(std::chrono::steady_clock::now()) {}

  double lap() {
    if (!enabled_) return 0.0;
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - start_).count();
    start_ = now;
    return ms;
  }

 private:
  bool enabled_;
  std::chrono::steady_clock::time_point start_;
};

// Runs one (scenario, replication) job per index and concatenates the rows in
// job order, independent of the thread count.
template <typename Job>
std::vector<MetricRow> run_grid(const ScenarioOptions& options, Experiment experiment, Job&& job) {
  validate(options);
  const std::vector<Scenario> grid = scenarios(options);
  const std::uint64_t jobs = grid.size() * options.reps;
  std::vector<std::vector<MetricRow>> results(jobs);
  parallel_for(jobs, options.threads, [&](std::uint64_t index) {
    const std::uint64_t sc = index / options.reps;
    const std::uint64_t rep = index % options.reps;
    const Scenario& scenario = grid[sc];
    const std::uint64_t seed = replication_seed(options.seed, experiment, sc, rep);

    SimScenario sim;
    sim.n = options.n;
    sim.n_test = options.n_test;
    sim.p = options.p;
    sim.s = options.s;
    sim.rho = scenario.rho;
    sim.snr = scenario.snr;
    sim.sparsity = scenario.sparsity;
    sim.seed = derive_seed(seed, {kData});
    const SyntheticData data = gen_linear(sim);

    MetricRow base;
    base.experiment = experiment;
    base.sparsity = scenario.sparsity;
    base.rho = scenario.rho;
    base.snr = scenario.snr;
    base.rep = rep;
    base.seed = seed;

    const auto record = [&](std::string method, SubsetIndex subset, const Eigen::VectorXd& beta_hat,
                            std::uint64_t grover_ops, double ms) {
      MetricRow row = base;
      row.method = std::move(method);
      const FpFn errors = fp_fn(subset, data.truth());
      row.fp = errors.fp;
      row.fn = errors.fn;
      if (data.sigma2 > 0.0) row.rte = rte(beta_hat, data.beta_star, data.sigma, data.sigma2);
      row.subset = subset;
      row.grover_ops = grover_ops;
      row.wall_time_ms = ms;
      results[index].push_back(std::move(row));
    };
    job(data, seed, record);
  });
  std::vector<MetricRow> rows;
  for (auto& block : results) {
    for (auto& row : block) rows.push_back(std::move(row));
  }
  return rows;
}

HybridConfig hybrid_config(const ScenarioOptions& options, std::uint64_t seed) {
  HybridConfig config;
  config.nodes = options.k;
  config.qas.lambda = options.lambda;
  config.qas.stop_constant = options.stop_constant;
  config.master_seed = derive_seed(seed, {kNodes});
  return config;
}

Eigen::VectorXd ols_beta(const Dataset& train, SubsetIndex subset) { return ols_fit(train, subset).full_beta; }

}  // namespace

const char* version() { return QBSS_VERSION; }

std::string to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::Tune: return "tune";
    case Experiment::Select: return "select";
    case Experiment::Compare: return "compare";
    case Experiment::Theory: return "theory";
  }
  return "unknown";
}

std::uint64_t replication_seed(std::uint64_t master, Experiment experiment, std::uint64_t scenario,
                               std::uint64_t rep) {
  return derive_seed(master, {static_cast<std::uint64_t>(experiment), scenario, rep});
}

std::vector<double> lambda_grid(double min, double max, double step) {
  if (!(step > 0.0) || !(max >= min)) raise(ErrorKind::InvalidArgument, "lambda grid needs step > 0 and max >= min");
  const auto count = static_cast<std::uint64_t>(std::floor((max - min) / step + 1e-6)) + 1;
  std::vector<double> grid;
  grid.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    // Rounded to 12 digits so 0.4 + 12 * 0.01 prints as 0.52.
    grid.push_back(std::round((min + static_cast<double>(i) * step) * 1e12) / 1e12);
  }
  return grid;
}

TuneResult run_tune(const TuneOptions& options) {
  if (options.reps == 0) raise(ErrorKind::InvalidArgument, "reps must be positive");
  if (options.k_list.empty()) raise(ErrorKind::InvalidArgument, "k list is empty");
  for (unsigned k : options.k_list) {
    if (k == 0 || k % 2 == 0) raise(ErrorKind::InvalidArgument, "node counts must be odd, got " + std::to_string(k));
  }
  const std::vector<double> lambdas = lambda_grid(options.lambda_min, options.lambda_max, options.lambda_step);
  for (double lambda : lambdas) {
    if (!(lambda > 0.0 && lambda < 1.0)) raise(ErrorKind::InvalidArgument, "lambda values must lie in (0, 1)");
  }
  const std::size_t cells = options.k_list.size() * lambdas.size();
  std::vector<std::vector<TuneRow>> per_rep(options.reps);
  parallel_for(options.reps, options.threads, [&](std::uint64_t rep) {
    const std::uint64_t seed = replication_seed(options.seed, Experiment::Tune, 0, rep);
    Rng table_rng(derive_seed(seed, {kData}));
    const LossTable table = uniform_loss_table(options.p, table_rng);
    const std::uint64_t solution = exhaustive_bss(table);
    auto& rows = per_rep[rep];
    rows.reserve(cells);
    for (unsigned k : options.k_list) {
      for (double lambda : lambdas) {
        HybridConfig config;
        config.nodes = k;
        config.qas.lambda = lambda;
        config.qas.stop_constant = options.stop_constant;
        config.master_seed = derive_seed(seed, {kNodes});
        const HybridResult result = hybrid_vote(table, config);
        rows.push_back({k, lambda, rep, seed, result.vote.winner == solution});
      }
    }
  });

  TuneResult result;
  result.rows.reserve(cells * options.reps);
  std::vector<std::uint64_t> hits(cells, 0);
  for (std::size_t cell = 0; cell < cells; ++cell) {
    for (std::uint64_t rep = 0; rep < options.reps; ++rep) {
      const TuneRow& row = per_rep[rep][cell];
      hits[cell] += row.success ? 1 : 0;
      result.rows.push_back(row);
    }
  }
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const TuneRow& first = per_rep[0][cell];
    result.summary.push_back({first.k, first.lambda, options.reps,
                              static_cast<double>(hits[cell]) / static_cast<double>(options.reps)});
  }
  return result;
}

ScenarioOptions select_defaults() { return ScenarioOptions{}; }

ScenarioOptions compare_defaults() {
  ScenarioOptions options;
  options.p = 10;
  options.s = 5;
  options.sparsity_list = {Sparsity::Strong, Sparsity::Weak};
  options.k = 5;
  options.lambda = 0.5;
  options.reps = 100;
  return options;
}

std::vector<MetricRow> run_select(const ScenarioOptions& options) {
  return run_grid(options, Experiment::Select, [&](const SyntheticData& data, std::uint64_t seed, auto& record) {
    Stopwatch clock(options.timing);
    const LossTable table = build_loss_table(data.train, data.test, LossKind::TestMse);
    const std::uint64_t dim = table.size();
    const double table_ms = clock.lap();

    const HybridResult qas = hybrid_vote(table, hybrid_config(options, seed));
    const SubsetIndex qas_subset(qas.vote.winner, options.p);
    record("qas", qas_subset, ols_beta(data.train, qas_subset), qas.grover_ops(), table_ms + clock.lap());

    const std::uint64_t iterations = default_grover_iterations(dim);
    Rng oracle_rng(derive_seed(seed, {kOracle}));
    const SubsetIndex oracle(grover_search(dim, exhaustive_bss(table), iterations, oracle_rng), options.p);
    record("grover_oracle", oracle, ols_beta(data.train, oracle), iterations, table_ms + clock.lap());

    Rng random_rng(derive_seed(seed, {kRandom}));
    const std::uint64_t marked = random_rng.below(dim);
    const SubsetIndex random(grover_search(dim, marked, iterations, random_rng), options.p);
    record("grover_random", random, ols_beta(data.train, random), iterations, clock.lap());
  });
}

std::vector<MetricRow> run_compare(const ScenarioOptions& options) {
  return run_grid(options, Experiment::Compare, [&](const SyntheticData& data, std::uint64_t seed, auto& record) {
    Stopwatch clock(options.timing);
    const LossTable table = build_loss_table(data.train, data.test, LossKind::TestMse);
    const double table_ms = clock.lap();

    const HybridResult qas = hybrid_vote(table, hybrid_config(options, seed));
    const SubsetIndex qas_subset(qas.vote.winner, options.p);
    record("qas", qas_subset, ols_beta(data.train, qas_subset), qas.grover_ops(), table_ms + clock.lap());

    const SubsetIndex bss(exhaustive_bss(table), options.p);
    record("bss", bss, ols_beta(data.train, bss), 0, table_ms + clock.lap());

    const SubsetIndex stepwise = forward_stepwise(data.train, data.test);
    record("stepwise", stepwise, ols_beta(data.train, stepwise), 0, clock.lap());

    Rng cv_rng(derive_seed(seed, {kLasso}));
    const LassoResult lasso = lasso_cv(data.train, {}, 10, cv_rng);
    record("lasso", lasso.subset, lasso.beta, 0, clock.lap());
  });
}

std::vector<SizeCount> size_histogram(const std::vector<MetricRow>& rows) {
  using Key = std::tuple<Sparsity, double, double, std::string, int>;
  std::map<Key, std::size_t> index;
  std::vector<SizeCount> out;
  for (const MetricRow& row : rows) {
    const Key key{row.sparsity, row.rho, row.snr, row.method, row.subset.size()};
    const auto [it, inserted] = index.emplace(key, out.size());
    if (inserted) out.push_back({row.experiment, row.sparsity, row.rho, row.snr, row.method, row.subset.size(), 0});
    ++out[it->second].count;
  }
  std::stable_sort(out.begin(), out.end(), [](const SizeCount& a, const SizeCount& b) {
    return std::tie(a.sparsity, a.rho, a.snr, a.method, a.size) < std::tie(b.sparsity, b.rho, b.snr, b.method, b.size);
  });
  return out;
}

std::vector<TheoryRow> run_theory(const TheoryOptions& options) {
  QasConfig config;
  config.lambda = options.lambda;
  config.stop_constant = options.stop_constant;
  std::vector<TheoryRow> rows;
  const auto add = [&rows](std::string check, std::uint64_t dim, std::string param, std::string metric, double value) {
    rows.push_back({std::move(check), dim, std::move(param), std::move(metric), value});
  };

  const std::uint64_t scaling_seed = derive_seed(options.seed, {static_cast<std::uint64_t>(Experiment::Theory), 1});
  for (const ScalingRow& r : iteration_scaling(options.scaling_p, options.scaling_runs, config, scaling_seed, options.threads)) {
    const std::string param = "runs=" + std::to_string(r.runs);
    add("scaling", r.dim, param, "reached", r.reached);
    add("scaling", r.dim, param, "median", r.median);
    add("scaling", r.dim, param, "q90", r.q90);
    add("scaling", r.dim, param, "median_over_log2", r.median_over_log2);
    add("scaling", r.dim, param, "q90_over_log2", r.q90_over_log2);
    add("scaling", r.dim, param, "q90_over_ln", r.q90_over_ln);
  }

  const std::uint64_t cost_seed = derive_seed(options.seed, {static_cast<std::uint64_t>(Experiment::Theory), 2});
  for (const UpdateCostRow& r : update_cost_sweep(options.cost_p, options.cost_fractions, options.cost_episodes,
                                                  config, cost_seed, options.threads)) {
    const std::string param = "r=" + std::to_string(r.rank);
    add("update_cost", r.dim, param, "episodes", static_cast<double>(r.episodes));
    add("update_cost", r.dim, param, "mean_grover_ops", r.mean_grover_ops);
    add("update_cost", r.dim, param, "ratio_sqrt_d_over_r", r.ratio);
  }

  Rng chain_rng(derive_seed(options.seed, {static_cast<std::uint64_t>(Experiment::Theory), 3}));
  for (std::uint64_t dim : options.chain_dims) {
    for (const ChainRow& r : descent_chain(dim, options.chain_max_z, options.chain_reps, chain_rng)) {
      const std::string param = "z=" + std::to_string(r.z);
      add("chain", dim, param, "absorbed", r.absorbed);
      add("chain", dim, param, "pmf", r.pmf);
      add("chain", dim, param, "mc_pmf", r.mc_pmf);
      add("chain", dim, param, "mc_sigma", r.mc_sigma);
    }
  }

  std::vector<AvgSuccessCase> cases;
  for (int p = 2; p <= 10; p += 2) {
    const std::uint64_t dim = std::uint64_t{1} << p;
    std::vector<std::uint64_t> marks{1, dim / 4, dim / 2, dim - 1};
    std::sort(marks.begin(), marks.end());
    marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
    for (std::uint64_t m : marks) {
      for (std::uint64_t t : {1, 2, 3, 5, 8, 13, 21, 40}) cases.push_back({dim, m, t});
    }
  }
  Rng avg_rng(derive_seed(options.seed, {static_cast<std::uint64_t>(Experiment::Theory), 4}));
  for (const AvgSuccessRow& r : avg_success_check(cases, options.avg_samples, avg_rng)) {
    const std::string param = "M=" + std::to_string(r.marked) + ";tau=" + std::to_string(r.tau);
    add("avg_success", r.dim, param, "closed_form", r.closed_form);
    add("avg_success", r.dim, param, "direct_sum", r.direct_sum);
    add("avg_success", r.dim, param, "sampled", r.sampled);
    add("avg_success", r.dim, param, "long_enough", r.long_enough ? 1.0 : 0.0);
  }
  return rows;
}

UserRunResult run_user(const UserRunOptions& options) {
  const CsvSplit split = load_csv(options.data, options.response, options.split, options.seed, options.drop);
  const Dataset& train = split.train;
  const Dataset& test = split.test;
  UserRunResult result;
  result.method = options.method;
  result.n_train = static_cast<std::uint64_t>(train.n());
  result.n_test = static_cast<std::uint64_t>(test.n());

  Eigen::VectorXd beta;
  if (options.method == "qas") {
    HybridConfig config;
    config.nodes = options.k;
    config.qas.lambda = options.lambda;
    config.qas.stop_constant = options.stop_constant;
    config.master_seed = derive_seed(options.seed, {kNodes});
    config.threads = options.threads;
    const HybridResult hybrid = hybrid_select(train, test, config);
    result.subset = SubsetIndex(hybrid.vote.winner, static_cast<int>(train.p()));
    result.grover_ops = hybrid.grover_ops();
  } else if (options.method == "bss") {
    const LossTable table = build_loss_table(train, test, LossKind::TestMse, options.threads);
    result.subset = SubsetIndex(exhaustive_bss(table), static_cast<int>(train.p()));
  } else if (options.method == "stepwise") {
    result.subset = forward_stepwise(train, test);
  } else if (options.method == "lasso") {
    Rng cv_rng(derive_seed(options.seed, {kLasso}));
    const LassoResult lasso = lasso_cv(train, {}, 10, cv_rng);
    result.subset = lasso.subset;
    beta = lasso.beta;
  } else {
    raise(ErrorKind::InvalidArgument, "unknown method '" + options.method + "'");
  }

  if (beta.size() == 0) result.test_mse = pred_error(train, test, result.subset);
  else result.test_mse = (test.y - test.X * beta).squaredNorm() / static_cast<double>(test.n());
  for (int j : result.subset.columns()) result.selected.push_back(train.column_names[static_cast<std::size_t>(j)]);
  return result;
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, end);
}

void write_tune_csv(std::ostream& out, const std::vector<TuneRow>& rows) {
  out << "experiment,k,lambda,rep,seed,success\n";
  for (const TuneRow& r : rows) {
    out << "tune," << r.k << ',' << format_number(r.lambda) << ',' << r.rep << ',' << r.seed << ','
        << (r.success ? 1 : 0) << '\n';
  }
}

void write_tune_summary_csv(std::ostream& out, const std::vector<TuneSummary>& summary) {
  out << "experiment,k,lambda,reps,accuracy\n";
  for (const TuneSummary& s : summary) {
    out << "tune," << s.k << ',' << format_number(s.lambda) << ',' << s.reps << ',' << format_number(s.accuracy)
        << '\n';
  }
}

void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows) {
  out << "experiment,sparsity,rho,snr,method,rep,seed,fp,fn,rte,subset_bitmask,size,grover_ops,wall_time_ms\n";
  for (const MetricRow& r : rows) {
    out << to_string(r.experiment) << ',' << to_string(r.sparsity) << ',' << format_number(r.rho) << ','
        << format_number(r.snr) << ',' << r.method << ',' << r.rep << ',' << r.seed << ',' << r.fp << ',' << r.fn
        << ',' << format_number(r.rte) << ',' << r.subset.value() << ',' << r.subset.size() << ',' << r.grover_ops
        << ',' << format_number(r.wall_time_ms) << '\n';
  }
}

void write_sizes_csv(std::ostream& out, const std::vector<SizeCount>& counts) {
  out << "experiment,sparsity,rho,snr,method,size,count\n";
  for (const SizeCount& c : counts) {
    out << to_string(c.experiment) << ',' << to_string(c.sparsity) << ',' << format_number(c.rho) << ','
        << format_number(c.snr) << ',' << c.method << ',' << c.size << ',' << c.count << '\n';
  }
}

void write_theory_csv(std::ostream& out, const std::vector<TheoryRow>& rows) {
  out << "check,dim,param,metric,value\n";
  for (const TheoryRow& r : rows) {
    out << r.check << ',' << r.dim << ',' << r.param << ',' << r.metric << ',' << format_number(r.value) << '\n';
  }
}

void write_run_csv(std::ostream& out, const UserRunResult& result, std::uint64_t seed) {
  out << "method,seed,n_train,n_test,selected,size,subset_bitmask,test_mse,grover_ops\n";
  std::string names;
  for (const std::string& name : result.selected) names += (names.empty() ? "" : ";") + name;
  out << result.method << ',' << seed << ',' << result.n_train << ',' << result.n_test << ',' << names << ','
      << result.subset.size() << ',' << result.subset.value() << ',' << format_number(result.test_mse) << ','
      << result.grover_ops << '\n';
}

}  // namespace qbss
