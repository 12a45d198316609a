#include "qbss/qsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "qbss/errors.hpp"

namespace qbss {

namespace {

void check_marking(std::uint64_t dim, std::uint64_t marked_count) {
  if (marked_count == 0 || marked_count >= dim) {
    raise(ErrorKind::DegenerateMarking, "marked count " + std::to_string(marked_count) +
                                            " must lie in [1, " + std::to_string(dim) + ")");
  }
}

}  // namespace

AmplitudeVector::AmplitudeVector(std::vector<double> amplitudes) : amplitudes_(std::move(amplitudes)) {}

AmplitudeVector AmplitudeVector::uniform(std::uint64_t dim) {
  return AmplitudeVector(std::vector<double>(dim, 1.0 / std::sqrt(static_cast<double>(dim))));
}

double AmplitudeVector::norm_squared() const {
  return std::inner_product(amplitudes_.begin(), amplitudes_.end(), amplitudes_.begin(), 0.0);
}

MarkPredicate::MarkPredicate(std::uint64_t dim, std::function<bool(std::uint64_t)> eval)
    : dim_(dim), eval_(std::move(eval)) {
  for (std::uint64_t i = 0; i < dim_; ++i) {
    if (eval_(i)) ++marked_count_;
  }
}

MarkPredicate MarkPredicate::single(std::uint64_t dim, std::uint64_t index) {
  return MarkPredicate(dim, [index](std::uint64_t i) { return i == index; });
}

StatePartition StatePartition::single(std::uint64_t dim, std::uint64_t index) {
  if (index >= dim) raise(ErrorKind::InvalidArgument, "oracle index out of range");
  StatePartition out;
  out.dim_ = dim;
  out.marked_count_ = 1;
  out.single_ = index;
  return out;
}

StatePartition StatePartition::prefix(std::shared_ptr<const std::vector<std::uint64_t>> order,
                                      std::uint64_t marked_count) {
  if (!order || marked_count > order->size()) {
    raise(ErrorKind::InvalidArgument, "marked prefix longer than the ordering");
  }
  StatePartition out;
  out.dim_ = order->size();
  out.marked_count_ = marked_count;
  out.order_ = std::move(order);
  return out;
}

StatePartition StatePartition::from_predicate(const MarkPredicate& predicate) {
  auto order = std::make_shared<std::vector<std::uint64_t>>();
  order->reserve(predicate.dim());
  for (std::uint64_t i = 0; i < predicate.dim(); ++i) {
    if (predicate(i)) order->push_back(i);
  }
  const std::uint64_t marked = order->size();
  for (std::uint64_t i = 0; i < predicate.dim(); ++i) {
    if (!predicate(i)) order->push_back(i);
  }
  return prefix(std::move(order), marked);
}

std::uint64_t StatePartition::marked_at(std::uint64_t k) const {
  if (order_) return (*order_)[k];
  return single_;
}

std::uint64_t StatePartition::unmarked_at(std::uint64_t k) const {
  if (order_) return (*order_)[marked_count_ + k];
  return k < single_ ? k : k + 1;
}

double grover_angle(std::uint64_t dim, std::uint64_t marked_count) {
  check_marking(dim, marked_count);
  return std::asin(std::sqrt(static_cast<double>(marked_count) / static_cast<double>(dim)));
}

TwoLevelSuperposition grover_closed_form(std::uint64_t dim, std::uint64_t marked_count,
                                         std::uint64_t iterations) {
  const double theta = grover_angle(dim, marked_count);
  const double angle = (2.0 * static_cast<double>(iterations) + 1.0) * theta;
  TwoLevelSuperposition state;
  state.dim = dim;
  state.marked_count = marked_count;
  state.alpha = std::sin(angle) / std::sqrt(static_cast<double>(marked_count));
  state.beta = std::cos(angle) / std::sqrt(static_cast<double>(dim - marked_count));
  return state;
}

void apply_flip(std::span<double> amplitudes, const MarkPredicate& predicate) {
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (predicate(i)) amplitudes[i] = -amplitudes[i];
  }
}

void apply_diffusion(std::span<double> amplitudes) {
  const double mean =
      std::accumulate(amplitudes.begin(), amplitudes.end(), 0.0) / static_cast<double>(amplitudes.size());
  for (double& a : amplitudes) a = 2.0 * mean - a;
}

AmplitudeVector grover_statevector(std::uint64_t dim, const MarkPredicate& predicate,
                                   std::uint64_t iterations) {
  if (dim == 0 || dim > kMaxStatevectorDim) {
    raise(ErrorKind::DimensionTooLarge,
          "statevector dimension " + std::to_string(dim) + " outside [1, 2^16]");
  }
  if (predicate.dim() != dim) raise(ErrorKind::InvalidArgument, "predicate dimension mismatch");
  AmplitudeVector state = AmplitudeVector::uniform(dim);
  for (std::uint64_t j = 0; j < iterations; ++j) {
    apply_flip(state.amplitudes(), predicate);
    apply_diffusion(state.amplitudes());
  }
  return state;
}

std::uint64_t measure(const TwoLevelSuperposition& state, const StatePartition& partition, Rng& rng) {
  if (partition.dim() != state.dim || partition.marked_count() != state.marked_count) {
    raise(ErrorKind::InvalidArgument, "partition does not match the superposition");
  }
  const std::uint64_t marked = state.marked_count;
  const std::uint64_t unmarked = state.dim - marked;
  const double p_marked = std::clamp(state.marked_probability(), 0.0, 1.0);
  const double u = rng.uniform();
  if (u < p_marked || unmarked == 0) {
    const auto k = static_cast<std::uint64_t>(u / p_marked * static_cast<double>(marked));
    return partition.marked_at(std::min(k, marked - 1));
  }
  const auto k = static_cast<std::uint64_t>((u - p_marked) / (1.0 - p_marked) * static_cast<double>(unmarked));
  return partition.unmarked_at(std::min(k, unmarked - 1));
}

std::uint64_t measure(const AmplitudeVector& state, Rng& rng) {
  const auto amps = state.amplitudes();
  const double target = rng.uniform() * state.norm_squared();
  double cumulative = 0.0;
  std::uint64_t last_nonzero = 0;
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const double p = amps[i] * amps[i];
    if (p > 0.0) last_nonzero = i;
    cumulative += p;
    if (target < cumulative) return i;
  }
  return last_nonzero;
}

std::uint64_t default_grover_iterations(std::uint64_t dim) {
  return static_cast<std::uint64_t>(std::ceil(std::numbers::pi * std::sqrt(static_cast<double>(dim)) / 4.0));
}

std::uint64_t grover_search(std::uint64_t dim, std::uint64_t oracle_index,
                            std::optional<std::uint64_t> iterations, Rng& rng) {
  const StatePartition partition = StatePartition::single(dim, oracle_index);
  if (dim == 1) return oracle_index;
  const TwoLevelSuperposition state =
      grover_closed_form(dim, 1, iterations.value_or(default_grover_iterations(dim)));
  return measure(state, partition, rng);
}

double avg_success_prob(std::uint64_t dim, std::uint64_t marked_count, std::uint64_t tau) {
  const double theta = grover_angle(dim, marked_count);
  if (tau == 0) raise(ErrorKind::InvalidArgument, "tau must be at least 1");
  const double t = static_cast<double>(tau);
  return 0.5 - std::sin(4.0 * t * theta) / (4.0 * t * std::sin(2.0 * theta));
}

}  // namespace qbss
