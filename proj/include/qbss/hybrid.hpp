#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qbss/qas.hpp"
#include "qbss/regress.hpp"

namespace qbss {

struct HybridConfig {
  unsigned nodes = 5;  // K = 2*xi + 1
  QasConfig qas;
  std::uint64_t master_seed = 0;
  unsigned threads = 1;

  void validate() const;
};

struct VoteResult {
  std::vector<std::uint64_t> votes;
  std::uint64_t winner = 0;
  std::uint64_t winner_count = 0;
};

struct HybridResult {
  VoteResult vote;
  LossTable table;
  std::vector<SelectionOutcome> nodes;

  std::uint64_t grover_ops() const;
};

/// Seed of the stream used by quantum node `node`.
std::uint64_t node_seed(std::uint64_t master_seed, unsigned node);

/// Plurality vote; the smallest index wins ties.
VoteResult majority_vote(std::span<const std::uint64_t> votes);

/// Stages 2 and 3: K independent searches over a shared table, then a vote.
/// `table` is carried through unchanged into the result.
HybridResult hybrid_vote(LossTable table, const HybridConfig& config);

/// All three stages: prediction-error table, K searches, vote.
HybridResult hybrid_select(const Dataset& train, const Dataset& test, const HybridConfig& config);

/// Bernoulli KL divergence D(a, b) = b ln(b/a) + (1-b) ln((1-b)/(1-a)).
double kl_bernoulli(double a, double b);

/// Standard normal CDF, via erfc.
double normal_cdf(double x);

/// Lower bound Phi(sqrt(2K D(q, (xi+1)/K))) on the probability that K = 2xi+1
/// voters, each right with probability q, elect the right model.
double vote_lower_bound(double q, unsigned xi);

/// Exact P(Binomial(K, q) >= threshold).
double binomial_tail(unsigned trials, double q, unsigned threshold);

struct VoteBoundRow {
  double q = 0.0;
  unsigned xi = 0;
  unsigned nodes = 0;
  std::uint64_t reps = 0;
  double empirical = 0.0;
  double mc_sigma = 0.0;
  double exact = 0.0;
  double bound = 0.0;

  bool consistent() const { return empirical >= bound - 3.0 * mc_sigma && exact >= bound; }
};

/// Simulates K i.i.d. Bernoulli(q) voters choosing between one correct and one
/// incorrect model. Grid points with q <= (xi+1)/(2xi+1) are skipped.
std::vector<VoteBoundRow> vote_bound_check(std::span<const double> q_grid,
                                           std::span<const unsigned> xi_grid,
                                           std::uint64_t reps, Rng& rng);

}  // namespace qbss
