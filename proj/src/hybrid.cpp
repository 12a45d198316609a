#include "qbss/hybrid.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "qbss/errors.hpp"
#include "qbss/parallel.hpp"

namespace qbss {

void HybridConfig::validate() const {
  if (nodes == 0 || nodes % 2 == 0) {
    raise(ErrorKind::InvalidArgument, "node count must be odd, got " + std::to_string(nodes));
  }
  qas.validate();
}

std::uint64_t HybridResult::grover_ops() const {
  std::uint64_t total = 0;
  for (const auto& node : nodes) total += node.grover_ops;
  return total;
}

std::uint64_t node_seed(std::uint64_t master_seed, unsigned node) {
  return derive_seed(master_seed, {0x6e6f6465ULL, node});
}

VoteResult majority_vote(std::span<const std::uint64_t> votes) {
  if (votes.empty()) raise(ErrorKind::InvalidArgument, "no votes to count");
  std::map<std::uint64_t, std::uint64_t> counts;
  for (std::uint64_t v : votes) ++counts[v];
  VoteResult out;
  out.votes.assign(votes.begin(), votes.end());
  // Ascending key order, strict comparison: the smallest index keeps a tie.
  for (const auto& [state, count] : counts) {
    if (count > out.winner_count) {
      out.winner = state;
      out.winner_count = count;
    }
  }
  return out;
}

HybridResult hybrid_vote(LossTable table, const HybridConfig& config) {
  config.validate();
  const RankedTable ranked(table);
  HybridResult result;
  result.nodes.resize(config.nodes);
  parallel_for(config.nodes, config.threads, [&](std::uint64_t k) {
    Rng rng(node_seed(config.master_seed, static_cast<unsigned>(k)));
    result.nodes[k] = qas_search(ranked, config.qas, rng).outcome;
  });
  std::vector<std::uint64_t> votes;
  votes.reserve(config.nodes);
  for (const auto& node : result.nodes) votes.push_back(node.state);
  result.vote = majority_vote(votes);
  result.table = std::move(table);
  return result;
}

HybridResult hybrid_select(const Dataset& train, const Dataset& test, const HybridConfig& config) {
  config.validate();
  return hybrid_vote(build_loss_table(train, test, LossKind::TestMse, config.threads), config);
}

double kl_bernoulli(double a, double b) {
  if (!(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0)) {
    raise(ErrorKind::DomainError, "Bernoulli parameters must lie strictly inside (0, 1)");
  }
  return b * std::log(b / a) + (1.0 - b) * std::log((1.0 - b) / (1.0 - a));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double vote_lower_bound(double q, unsigned xi) {
  const double nodes = 2.0 * xi + 1.0;
  const double threshold = (xi + 1.0) / nodes;
  if (!(q > threshold)) {
    raise(ErrorKind::ConditionViolated,
          "q = " + std::to_string(q) + " must exceed (xi+1)/(2xi+1) = " + std::to_string(threshold));
  }
  if (q >= 1.0) return 1.0;
  return normal_cdf(std::sqrt(2.0 * nodes * kl_bernoulli(q, threshold)));
}

double binomial_tail(unsigned trials, double q, unsigned threshold) {
  double total = 0.0;
  for (unsigned i = threshold; i <= trials; ++i) {
    const double log_choose = std::lgamma(trials + 1.0) - std::lgamma(i + 1.0) - std::lgamma(trials - i + 1.0);
    double term = std::exp(log_choose);
    term *= std::pow(q, static_cast<double>(i)) * std::pow(1.0 - q, static_cast<double>(trials - i));
    total += term;
  }
  return total;
}

std::vector<VoteBoundRow> vote_bound_check(std::span<const double> q_grid,
                                           std::span<const unsigned> xi_grid, std::uint64_t reps,
                                           Rng& rng) {
  if (reps == 0) raise(ErrorKind::InvalidArgument, "reps must be positive");
  std::vector<VoteBoundRow> rows;
  for (unsigned xi : xi_grid) {
    const unsigned nodes = 2 * xi + 1;
    for (double q : q_grid) {
      if (!(q > (xi + 1.0) / nodes)) continue;
      std::uint64_t wins = 0;
      for (std::uint64_t r = 0; r < reps; ++r) {
        unsigned correct = 0;
        for (unsigned k = 0; k < nodes; ++k) correct += rng.bernoulli(q) ? 1U : 0U;
        if (correct >= xi + 1) ++wins;
      }
      VoteBoundRow row;
      row.q = q;
      row.xi = xi;
      row.nodes = nodes;
      row.reps = reps;
      row.empirical = static_cast<double>(wins) / static_cast<double>(reps);
      row.mc_sigma = std::sqrt(row.empirical * (1.0 - row.empirical) / static_cast<double>(reps));
      row.exact = binomial_tail(nodes, q, xi + 1);
      row.bound = vote_lower_bound(q, xi);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace qbss
