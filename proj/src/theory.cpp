#include "qbss/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "qbss/errors.hpp"
#include "qbss/parallel.hpp"
#include "qbss/qsim.hpp"

namespace qbss {

namespace {

// Nearest-rank quantile, so +inf entries stay well defined.
double quantile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const auto n = values.size();
  auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
  k = std::clamp<std::size_t>(k, 1, n);
  return values[k - 1];
}

void check_p(int p) {
  if (p < 1 || p > kMaxTableBits) {
    raise(ErrorKind::DimensionTooLarge, "p = " + std::to_string(p) + " outside [1, " +
                                            std::to_string(kMaxTableBits) + "]");
  }
}

}  // namespace

LossTable uniform_loss_table(int p, Rng& rng) {
  check_p(p);
  LossTable table;
  table.p = p;
  table.kind = LossKind::TestMse;
  table.values.resize(std::uint64_t{1} << p);
  for (double& v : table.values) v = rng.uniform();
  return table;
}

std::vector<ScalingRow> iteration_scaling(std::span<const int> p_values, std::uint64_t runs,
                                          const QasConfig& config, std::uint64_t seed, unsigned threads) {
  if (runs == 0) raise(ErrorKind::InvalidArgument, "runs must be positive");
  config.validate();
  std::vector<ScalingRow> rows;
  for (int p : p_values) {
    check_p(p);
    const std::uint64_t dim = std::uint64_t{1} << p;
    std::vector<double> hit(runs);
    parallel_for(runs, threads, [&](std::uint64_t i) {
      Rng rng(derive_seed(seed, {dim, i}));
      const RankedTable ranked(uniform_loss_table(p, rng));
      const QasResult result = qas_search(ranked, config, rng);
      const auto reached = iterations_to_reach(result.trace, ranked.argmin());
      hit[i] = reached ? static_cast<double>(*reached) : std::numeric_limits<double>::infinity();
    });
    ScalingRow row;
    row.dim = dim;
    row.runs = runs;
    row.reached = static_cast<double>(std::count_if(hit.begin(), hit.end(), [](double v) { return std::isfinite(v); })) /
                  static_cast<double>(runs);
    row.median = quantile(hit, 0.5);
    row.q90 = quantile(hit, 0.9);
    row.median_over_log2 = row.median / static_cast<double>(p);
    row.q90_over_log2 = row.q90 / static_cast<double>(p);
    row.q90_over_ln = row.q90 / std::log(static_cast<double>(dim));
    rows.push_back(row);
  }
  return rows;
}

std::vector<UpdateCostRow> update_cost_sweep(std::span<const int> p_values,
                                             std::span<const double> rank_fractions,
                                             std::uint64_t episodes, const QasConfig& config,
                                             std::uint64_t seed, unsigned threads) {
  if (episodes == 0) raise(ErrorKind::InvalidArgument, "episodes must be positive");
  config.validate();
  std::vector<UpdateCostRow> rows;
  for (int p : p_values) {
    check_p(p);
    const std::uint64_t dim = std::uint64_t{1} << p;
    for (double fraction : rank_fractions) {
      if (!(fraction > 0.0 && fraction <= 1.0)) raise(ErrorKind::InvalidArgument, "rank fraction must lie in (0, 1]");
      const auto rank = std::clamp<std::uint64_t>(
          static_cast<std::uint64_t>(std::llround(fraction * static_cast<double>(dim))), 1, dim);
      std::vector<QasTrace> traces(episodes);
      parallel_for(episodes, threads, [&](std::uint64_t e) {
        Rng rng(derive_seed(seed, {dim, rank, e}));
        const RankedTable ranked(uniform_loss_table(p, rng));
        QasConfig cfg = config;
        cfg.initial_benchmark = (*ranked.order())[rank - 1];
        traces[e] = qas_search(ranked, cfg, rng).trace;
      });
      UpdateCostRow row;
      row.dim = dim;
      row.rank = rank;
      for (const RankUpdateCost& cost : expected_update_cost(traces)) {
        if (cost.rank == rank) {
          row.episodes = cost.episodes;
          row.mean_grover_ops = cost.mean_grover_ops;
        }
      }
      row.ratio = row.mean_grover_ops / std::sqrt(static_cast<double>(dim) / static_cast<double>(rank));
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<double> chain_distribution(std::uint64_t dim, std::uint64_t z) {
  if (dim == 0) raise(ErrorKind::InvalidArgument, "dimension must be positive");
  std::vector<double> pi(dim + 1, 0.0);
  pi[0] = 1.0;
  std::vector<double> next(dim + 1);
  for (std::uint64_t step = 0; step < z; ++step) {
    // Row s of the transition matrix is uniform on {s, ..., D}.
    double carry = 0.0;
    for (std::uint64_t t = 0; t <= dim; ++t) {
      carry += pi[t] / static_cast<double>(dim + 1 - t);
      next[t] = carry;
    }
    pi.swap(next);
  }
  return pi;
}

std::vector<ChainRow> descent_chain(std::uint64_t dim, std::uint64_t max_z, std::uint64_t reps, Rng& rng) {
  if (dim == 0) raise(ErrorKind::InvalidArgument, "dimension must be positive");
  std::vector<std::uint64_t> hits(max_z + 1, 0);
  for (std::uint64_t r = 0; r < reps; ++r) {
    std::uint64_t s = 0;
    for (std::uint64_t z = 1; z <= max_z; ++z) {
      s += rng.below(dim - s + 1);
      if (s == dim) {
        ++hits[z];
        break;
      }
    }
  }
  std::vector<ChainRow> rows;
  double previous = 0.0;
  for (std::uint64_t z = 1; z <= max_z; ++z) {
    ChainRow row;
    row.z = z;
    row.absorbed = chain_distribution(dim, z)[dim];
    row.pmf = row.absorbed - previous;
    previous = row.absorbed;
    if (reps > 0) {
      row.mc_pmf = static_cast<double>(hits[z]) / static_cast<double>(reps);
      row.mc_sigma = std::sqrt(row.pmf * (1.0 - row.pmf) / static_cast<double>(reps));
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<AvgSuccessRow> avg_success_check(std::span<const AvgSuccessCase> cases,
                                             std::uint64_t samples, Rng& rng) {
  std::vector<AvgSuccessRow> rows;
  rows.reserve(cases.size());
  for (const AvgSuccessCase& c : cases) {
    AvgSuccessRow row;
    row.dim = c.dim;
    row.marked = c.marked;
    row.tau = c.tau;
    row.closed_form = avg_success_prob(c.dim, c.marked, c.tau);
    const double theta = grover_angle(c.dim, c.marked);
    double sum = 0.0;
    for (std::uint64_t j = 0; j < c.tau; ++j) {
      const double s = std::sin(static_cast<double>(2 * j + 1) * theta);
      sum += s * s;
    }
    row.direct_sum = sum / static_cast<double>(c.tau);
    row.long_enough = static_cast<double>(c.tau) >= 1.0 / std::sin(2.0 * theta);
    if (samples > 0) {
      std::uint64_t marked_hits = 0;
      for (std::uint64_t k = 0; k < samples; ++k) {
        const std::uint64_t j = rng.below(c.tau);
        if (rng.bernoulli(grover_closed_form(c.dim, c.marked, j).marked_probability())) ++marked_hits;
      }
      row.sampled = static_cast<double>(marked_hits) / static_cast<double>(samples);
      row.samples = samples;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qbss
