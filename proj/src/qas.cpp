#include "qbss/qas.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <numeric>

#include "qbss/errors.hpp"
#include "qbss/qsim.hpp"

namespace qbss {

namespace {

constexpr std::uint64_t kTauCap = std::uint64_t{1} << 62;

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
  return a > kTauCap - std::min(b, kTauCap) ? kTauCap : a + b;
}

}  // namespace

void QasConfig::validate() const {
  if (!(lambda > 0.0 && lambda < 1.0)) raise(ErrorKind::InvalidArgument, "lambda must lie in (0, 1)");
  if (!(stop_constant > 0.0)) raise(ErrorKind::InvalidArgument, "stop constant must be positive");
}

std::uint64_t tau(std::uint64_t m, double lambda) {
  if (m == 0) raise(ErrorKind::InvalidArgument, "iteration index starts at 1");
  const double value = std::ceil(std::numbers::pi / 4.0 * std::pow(lambda, -0.5 * static_cast<double>(m)));
  if (!(value < static_cast<double>(kTauCap))) return kTauCap;
  return static_cast<std::uint64_t>(value);
}

bool local_eval(std::uint64_t i, std::uint64_t w, const LossTable& table) {
  return table.values.at(i) <= table.values.at(w);
}

RankedTable::RankedTable(LossTable table) : table_(std::move(table)) {
  auto order = std::make_shared<std::vector<std::uint64_t>>(table_.size());
  std::iota(order->begin(), order->end(), std::uint64_t{0});
  const auto& v = table_.values;
  std::stable_sort(order->begin(), order->end(),
                   [&v](std::uint64_t a, std::uint64_t b) { return v[a] < v[b]; });
  sorted_.reserve(order->size());
  for (std::uint64_t i : *order) sorted_.push_back(v[i]);
  order_ = std::move(order);
}

std::uint64_t RankedTable::marked_count(std::uint64_t w) const {
  const double loss = table_.values.at(w);
  return static_cast<std::uint64_t>(std::upper_bound(sorted_.begin(), sorted_.end(), loss) - sorted_.begin());
}

QasResult qas_search(const RankedTable& ranked, const QasConfig& config, Rng& rng) {
  config.validate();
  const std::uint64_t dim = ranked.dim();
  if (dim == 0) raise(ErrorKind::InvalidArgument, "loss table is empty");
  const auto& g = ranked.table().values;

  std::uint64_t w = 0;
  if (config.initial_benchmark) {
    w = *config.initial_benchmark;
    if (w >= dim) raise(ErrorKind::InvalidArgument, "initial benchmark out of range");
  } else {
    w = rng.below(dim);
  }

  QasResult result;
  QasTrace& trace = result.trace;
  trace.benchmark_history.push_back({0, w, g[w]});

  const double limit = config.stop_constant * std::log(static_cast<double>(dim));
  for (std::uint64_t m = 1; static_cast<double>(m) <= limit; ++m) {
    const std::uint64_t t = tau(m, config.lambda);
    if (config.max_grover_ops && saturating_add(trace.grover_ops_total, t) > *config.max_grover_ops) break;

    const std::uint64_t marked = ranked.marked_count(w);
    std::uint64_t observed = 0;
    if (marked == dim) {
      // Every state marked: F is a global sign and the register stays uniform.
      observed = rng.below(dim);
    } else {
      const TwoLevelSuperposition state = grover_closed_form(dim, marked, t);
      observed = measure(state, StatePartition::prefix(ranked.order(), marked), rng);
    }

    const bool updated = g[observed] < g[w];
    trace.iterations.push_back({m, t, w, marked, observed, updated});
    trace.grover_ops_total = saturating_add(trace.grover_ops_total, t);
    trace.iterations_total = m;
    if (updated) {
      w = observed;
      trace.benchmark_history.push_back({m, w, g[w]});
    }
  }

  result.outcome = {w, g[w], trace.iterations_total, trace.grover_ops_total};
  return result;
}

QasResult qas_search(const LossTable& table, const QasConfig& config, Rng& rng) {
  return qas_search(RankedTable(table), config, rng);
}

QasResult qas_search(const LossTable& table, const QasConfig& config) {
  Rng rng(config.seed);
  return qas_search(table, config, rng);
}

std::optional<std::uint64_t> iterations_to_reach(const QasTrace& trace, std::uint64_t solution) {
  for (const BenchmarkStep& step : trace.benchmark_history) {
    if (step.state == solution) return step.iteration;
  }
  return std::nullopt;
}

std::vector<RankUpdateCost> expected_update_cost(const std::vector<QasTrace>& traces) {
  std::map<std::uint64_t, std::pair<double, std::uint64_t>> pooled;
  for (const QasTrace& trace : traces) {
    std::uint64_t spent = 0;
    for (const IterationRecord& it : trace.iterations) {
      spent = saturating_add(spent, it.tau);
      if (it.updated) {
        if (it.rank > 1) {
          auto& cell = pooled[it.rank];
          cell.first += static_cast<double>(spent);
          ++cell.second;
        }
        spent = 0;
      }
    }
  }
  std::vector<RankUpdateCost> out;
  out.reserve(pooled.size());
  for (const auto& [rank, cell] : pooled) {
    out.push_back({rank, cell.first / static_cast<double>(cell.second), cell.second});
  }
  return out;
}

}  // namespace qbss
