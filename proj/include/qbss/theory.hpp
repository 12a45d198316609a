#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qbss/qas.hpp"
#include "qbss/regress.hpp"
#include "qbss/rng.hpp"

namespace qbss {

/// Table of D = 2^p i.i.d. U[0, 1) losses.
LossTable uniform_loss_table(int p, Rng& rng);

struct ScalingRow {
  std::uint64_t dim = 0;
  std::uint64_t runs = 0;
  double reached = 0.0;  // fraction of runs that hit the argmin before stopping
  double median = 0.0;   // iterations to reach the argmin; unreached runs count as +inf
  double q90 = 0.0;
  double median_over_log2 = 0.0;
  double q90_over_log2 = 0.0;
  double q90_over_ln = 0.0;
};

/// Iterations until QAS first holds the argmin, over `runs` fresh uniform
/// tables per D = 2^p. Each run uses its own stream derived from `seed`.
std::vector<ScalingRow> iteration_scaling(std::span<const int> p_values, std::uint64_t runs,
                                          const QasConfig& config, std::uint64_t seed,
                                          unsigned threads = 1);

struct UpdateCostRow {
  std::uint64_t dim = 0;
  std::uint64_t rank = 0;
  std::uint64_t episodes = 0;
  double mean_grover_ops = 0.0;
  double ratio = 0.0;  // mean_grover_ops / sqrt(D / rank)
};

/// Starts QAS at the benchmark of rank r = fraction * D and records the Grover
/// operations spent until the first update, `episodes` times per cell.
/// `config.stop_constant` should be large enough that every episode updates.
std::vector<UpdateCostRow> update_cost_sweep(std::span<const int> p_values,
                                             std::span<const double> rank_fractions,
                                             std::uint64_t episodes, const QasConfig& config,
                                             std::uint64_t seed, unsigned threads = 1);

/// Distribution of the descent chain S_z over {0, ..., D} after z steps,
/// started from S_0 = 0 with S_z | S_{z-1} = s uniform on {s, ..., D}.
std::vector<double> chain_distribution(std::uint64_t dim, std::uint64_t z);

struct ChainRow {
  std::uint64_t z = 0;
  double absorbed = 0.0;  // P(S_z = D) = P(Z <= z)
  double pmf = 0.0;       // P(Z = z)
  double mc_pmf = 0.0;
  double mc_sigma = 0.0;
};

/// P(Z = z) for z = 1..max_z by propagating pi_z under the transition matrix,
/// against `reps` direct simulations of the descent process.
std::vector<ChainRow> descent_chain(std::uint64_t dim, std::uint64_t max_z, std::uint64_t reps, Rng& rng);

struct AvgSuccessRow {
  std::uint64_t dim = 0;
  std::uint64_t marked = 0;
  std::uint64_t tau = 0;
  double closed_form = 0.0;
  double direct_sum = 0.0;
  double sampled = 0.0;
  std::uint64_t samples = 0;
  bool long_enough = false;  // tau >= 1 / sin(2 theta)
};

struct AvgSuccessCase {
  std::uint64_t dim = 0;
  std::uint64_t marked = 0;
  std::uint64_t tau = 0;
};

/// Averaged success probability three ways: closed form, the mean of
/// sin^2((2j+1) theta) over j < tau, and the marked frequency when j is drawn
/// uniformly and the state measured (`samples` draws; 0 skips sampling).
std::vector<AvgSuccessRow> avg_success_check(std::span<const AvgSuccessCase> cases,
                                             std::uint64_t samples, Rng& rng);

}  // namespace qbss
