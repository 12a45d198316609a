#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "qbss/rng.hpp"

namespace qbss {

/// Largest dimension the explicit amplitude-vector backend accepts.
inline constexpr std::uint64_t kMaxStatevectorDim = std::uint64_t{1} << 16;

/// Grover state restricted to the plane spanned by the marked and unmarked
/// averages. Every marked state carries amplitude `alpha`, every unmarked one
/// `beta`.
struct TwoLevelSuperposition {
  std::uint64_t dim = 0;
  std::uint64_t marked_count = 0;
  double alpha = 0.0;
  double beta = 0.0;

  double marked_probability() const { return static_cast<double>(marked_count) * alpha * alpha; }
};

/// Full real amplitude vector over the D basis states.
class AmplitudeVector {
 public:
  AmplitudeVector() = default;
  explicit AmplitudeVector(std::vector<double> amplitudes);

  static AmplitudeVector uniform(std::uint64_t dim);

  std::uint64_t dim() const { return amplitudes_.size(); }
  double operator[](std::uint64_t i) const { return amplitudes_[i]; }
  std::span<const double> amplitudes() const { return amplitudes_; }
  std::span<double> amplitudes() { return amplitudes_; }
  double norm_squared() const;

 private:
  std::vector<double> amplitudes_;
};

/// Binary evaluation function S over [0, D) with its marked count cached.
class MarkPredicate {
 public:
  MarkPredicate(std::uint64_t dim, std::function<bool(std::uint64_t)> eval);

  static MarkPredicate single(std::uint64_t dim, std::uint64_t index);

  std::uint64_t dim() const { return dim_; }
  std::uint64_t marked_count() const { return marked_count_; }
  bool operator()(std::uint64_t i) const { return eval_(i); }

 private:
  std::uint64_t dim_;
  std::function<bool(std::uint64_t)> eval_;
  std::uint64_t marked_count_ = 0;
};

/// Ordered split of [0, D) into marked and unmarked states, so that the k-th
/// marked or unmarked state can be looked up without scanning. Measurement of a
/// two-level state only needs this.
class StatePartition {
 public:
  /// Exactly one marked state.
  static StatePartition single(std::uint64_t dim, std::uint64_t index);

  /// The first `marked_count` entries of `order` are marked; `order` must be a
  /// permutation of [0, D).
  static StatePartition prefix(std::shared_ptr<const std::vector<std::uint64_t>> order,
                               std::uint64_t marked_count);

  static StatePartition from_predicate(const MarkPredicate& predicate);

  std::uint64_t dim() const { return dim_; }
  std::uint64_t marked_count() const { return marked_count_; }
  std::uint64_t marked_at(std::uint64_t k) const;
  std::uint64_t unmarked_at(std::uint64_t k) const;

 private:
  StatePartition() = default;

  std::uint64_t dim_ = 0;
  std::uint64_t marked_count_ = 0;
  std::uint64_t single_ = 0;
  std::shared_ptr<const std::vector<std::uint64_t>> order_;
};

/// theta = arcsin(sqrt(M / D)).
double grover_angle(std::uint64_t dim, std::uint64_t marked_count);

/// Amplitudes after j Grover operations from the uniform state:
/// alpha = sin((2j+1)theta)/sqrt(M), beta = cos((2j+1)theta)/sqrt(D-M).
TwoLevelSuperposition grover_closed_form(std::uint64_t dim, std::uint64_t marked_count,
                                         std::uint64_t iterations);

/// F: negate the amplitude of every marked state.
void apply_flip(std::span<double> amplitudes, const MarkPredicate& predicate);

/// G = 2|psi0><psi0| - I, i.e. inversion about the mean.
void apply_diffusion(std::span<double> amplitudes);

/// j explicit applications of GF to the uniform state. Validation backend.
AmplitudeVector grover_statevector(std::uint64_t dim, const MarkPredicate& predicate,
                                   std::uint64_t iterations);

/// Samples a basis state from a two-level state using one uniform draw.
std::uint64_t measure(const TwoLevelSuperposition& state, const StatePartition& partition, Rng& rng);

/// Samples a basis state with probability amplitude^2 (inverse CDF scan).
std::uint64_t measure(const AmplitudeVector& state, Rng& rng);

/// ceil(pi * sqrt(D) / 4).
std::uint64_t default_grover_iterations(std::uint64_t dim);

/// Grover's algorithm with a single marked (oracle) index: `iterations`
/// operations (default ceil(pi sqrt(D)/4)) and one measurement.
std::uint64_t grover_search(std::uint64_t dim, std::uint64_t oracle_index,
                            std::optional<std::uint64_t> iterations, Rng& rng);

/// Success probability averaged over an iteration count drawn uniformly from
/// {0, ..., tau-1}: 1/2 - sin(4 tau theta) / (4 tau sin(2 theta)).
double avg_success_prob(std::uint64_t dim, std::uint64_t marked_count, std::uint64_t tau);

}  // namespace qbss
