#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "qbss/regress.hpp"
#include "qbss/rng.hpp"

namespace qbss {

struct QasConfig {
  double lambda = 0.52;         // learning rate in (0, 1)
  double stop_constant = 3.0;   // loop runs while m <= stop_constant * ln D
  std::optional<std::uint64_t> max_grover_ops;
  std::uint64_t seed = 0;
  /// Fixes the starting benchmark instead of drawing it uniformly.
  std::optional<std::uint64_t> initial_benchmark;

  void validate() const;
};

/// Number of Grover operations in iteration m: ceil(pi/4 * lambda^(-m/2)),
/// saturating at 2^62.
std::uint64_t tau(std::uint64_t m, double lambda);

/// S(i, w, g): 1 iff g(i) <= g(w).
bool local_eval(std::uint64_t i, std::uint64_t w, const LossTable& table);

/// Loss table sorted ascending (ties by index). The marked set of a benchmark
/// is then a prefix of `order()`.
class RankedTable {
 public:
  explicit RankedTable(LossTable table);

  const LossTable& table() const { return table_; }
  std::uint64_t dim() const { return table_.size(); }
  const std::shared_ptr<const std::vector<std::uint64_t>>& order() const { return order_; }

  /// Number of states i with g(i) <= g(w); the rank of w for distinct losses.
  std::uint64_t marked_count(std::uint64_t w) const;

  /// Smallest index attaining the minimum loss.
  std::uint64_t argmin() const { return (*order_)[0]; }

 private:
  LossTable table_;
  std::shared_ptr<const std::vector<std::uint64_t>> order_;
  std::vector<double> sorted_;
};

struct BenchmarkStep {
  std::uint64_t iteration = 0;  // 0 for the initial draw
  std::uint64_t state = 0;
  double loss = 0.0;
};

struct IterationRecord {
  std::uint64_t iteration = 0;
  std::uint64_t tau = 0;
  std::uint64_t benchmark = 0;
  std::uint64_t rank = 0;  // marked count of the benchmark before this iteration
  std::uint64_t observed = 0;
  bool updated = false;
};

struct QasTrace {
  std::vector<BenchmarkStep> benchmark_history;
  std::vector<IterationRecord> iterations;
  std::uint64_t grover_ops_total = 0;
  std::uint64_t iterations_total = 0;
};

struct SelectionOutcome {
  std::uint64_t state = 0;
  double loss = 0.0;
  std::uint64_t iterations = 0;
  std::uint64_t grover_ops = 0;
};

struct QasResult {
  SelectionOutcome outcome;
  QasTrace trace;
};

/// Quantum adaptive search over a loss table. Each iteration simulates tau(m)
/// Grover operations with the local evaluation marking through the closed-form
/// two-level state, measures once and keeps the reading only if its loss is
/// strictly smaller than the benchmark's.
QasResult qas_search(const RankedTable& ranked, const QasConfig& config, Rng& rng);
QasResult qas_search(const LossTable& table, const QasConfig& config, Rng& rng);

/// Uses Rng(config.seed).
QasResult qas_search(const LossTable& table, const QasConfig& config);

/// Iteration at which the benchmark first reached `solution` (0 when the
/// search started there), if it did.
std::optional<std::uint64_t> iterations_to_reach(const QasTrace& trace, std::uint64_t solution);

struct RankUpdateCost {
  std::uint64_t rank = 0;
  double mean_grover_ops = 0.0;
  std::uint64_t episodes = 0;
};

/// Mean Grover operations spent at each benchmark rank before it was
/// replaced, pooled over traces. Episodes that never ended in an update and
/// rank 1 (nothing to update to) are left out. Sorted by rank.
std::vector<RankUpdateCost> expected_update_cost(const std::vector<QasTrace>& traces);

}  // namespace qbss
