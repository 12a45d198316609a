#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "qbss/datagen.hpp"
#include "qbss/regress.hpp"

namespace qbss {

const char* version();

enum class Experiment : std::uint64_t { Tune = 1, Select = 2, Compare = 3, Theory = 4 };

std::string to_string(Experiment experiment);

/// Seed of one replication. Every stream a replication uses is derived from
/// it, so a row can be re-run from its own fields.
std::uint64_t replication_seed(std::uint64_t master, Experiment experiment, std::uint64_t scenario,
                               std::uint64_t rep);

/// min, min + step, ... up to max (inclusive, within step / 1e6).
std::vector<double> lambda_grid(double min, double max, double step);

struct TuneOptions {
  std::vector<unsigned> k_list{1, 3, 5};
  double lambda_min = 0.40;
  double lambda_max = 0.60;
  double lambda_step = 0.01;
  int p = 5;  // D = 32
  std::uint64_t reps = 200;
  double stop_constant = 3.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct TuneRow {
  unsigned k = 0;
  double lambda = 0.0;
  std::uint64_t rep = 0;
  std::uint64_t seed = 0;
  bool success = false;
};

struct TuneSummary {
  unsigned k = 0;
  double lambda = 0.0;
  std::uint64_t reps = 0;
  double accuracy = 0.0;
};

struct TuneResult {
  std::vector<TuneRow> rows;
  std::vector<TuneSummary> summary;
};

/// For each replication a fresh U[0, 1) table of size D; every (K, lambda)
/// cell of that replication sees the same table and the same node streams.
TuneResult run_tune(const TuneOptions& options);

struct ScenarioOptions {
  int n = 100;
  int n_test = 100;
  int p = 7;
  int s = 4;
  std::vector<double> rho_list{0.25, 0.5};
  std::vector<double> snr_list{0.5, 1.0, 2.0, 3.0};
  std::vector<Sparsity> sparsity_list{Sparsity::Strong};
  unsigned k = 3;
  double lambda = 0.55;
  double stop_constant = 3.0;
  std::uint64_t reps = 200;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool timing = false;
};

ScenarioOptions select_defaults();
ScenarioOptions compare_defaults();

struct MetricRow {
  Experiment experiment = Experiment::Select;
  Sparsity sparsity = Sparsity::Strong;
  double rho = 0.0;
  double snr = 0.0;
  std::string method;
  std::uint64_t rep = 0;
  std::uint64_t seed = 0;
  int fp = 0;
  int fn = 0;
  double rte = std::numeric_limits<double>::quiet_NaN();
  SubsetIndex subset;
  std::uint64_t grover_ops = 0;
  double wall_time_ms = 0.0;
};

/// QAS with voting, Grover with the table argmin as oracle, and Grover with a
/// uniformly drawn oracle index, on the same data per replication.
std::vector<MetricRow> run_select(const ScenarioOptions& options);

/// QAS with voting, exhaustive BSS, forward stepwise and cross-validated LASSO.
std::vector<MetricRow> run_compare(const ScenarioOptions& options);

struct SizeCount {
  Experiment experiment = Experiment::Compare;
  Sparsity sparsity = Sparsity::Strong;
  double rho = 0.0;
  double snr = 0.0;
  std::string method;
  int size = 0;
  std::uint64_t count = 0;
};

/// Selected-model sizes per (scenario, method), in first-seen order.
std::vector<SizeCount> size_histogram(const std::vector<MetricRow>& rows);

struct TheoryOptions {
  std::vector<int> scaling_p{4, 6, 8, 10, 12};
  std::uint64_t scaling_runs = 500;
  std::vector<int> cost_p{6, 8, 10};
  std::vector<double> cost_fractions{0.125, 0.25, 0.5, 0.75};
  std::uint64_t cost_episodes = 2000;
  std::vector<std::uint64_t> chain_dims{2, 8, 32};
  std::uint64_t chain_max_z = 15;
  std::uint64_t chain_reps = 100000;
  std::uint64_t avg_samples = 2000;
  double lambda = 0.52;
  // Long horizon so iteration counts are not cut off by the stopping rule.
  double stop_constant = 30.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct TheoryRow {
  std::string check;
  std::uint64_t dim = 0;
  std::string param;
  std::string metric;
  double value = 0.0;
};

std::vector<TheoryRow> run_theory(const TheoryOptions& options);

struct UserRunOptions {
  std::filesystem::path data;
  std::string response;
  std::vector<std::string> drop;
  double split = 0.8;
  std::string method = "qas";
  unsigned k = 5;
  double lambda = 0.5;
  double stop_constant = 3.0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct UserRunResult {
  std::string method;
  SubsetIndex subset;
  std::vector<std::string> selected;
  double test_mse = 0.0;
  std::uint64_t grover_ops = 0;
  std::uint64_t n_train = 0;
  std::uint64_t n_test = 0;
};

UserRunResult run_user(const UserRunOptions& options);

void write_tune_csv(std::ostream& out, const std::vector<TuneRow>& rows);
void write_tune_summary_csv(std::ostream& out, const std::vector<TuneSummary>& summary);
void write_metrics_csv(std::ostream& out, const std::vector<MetricRow>& rows);
void write_sizes_csv(std::ostream& out, const std::vector<SizeCount>& counts);
void write_theory_csv(std::ostream& out, const std::vector<TheoryRow>& rows);
void write_run_csv(std::ostream& out, const UserRunResult& result, std::uint64_t seed);

/// Shortest round-trip-safe text for a double ("nan" and "inf" spelled out).
std::string format_number(double value);

}  // namespace qbss
