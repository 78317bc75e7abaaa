#pragma once

// Closed-form monitoring math: processing delay, energy, weighted cost,
// cosine relevance, threshold selection and the per-slot utility they
// combine into. Everything here is a pure function of its arguments.

#include <algorithm>
#include <cstdint>
#include <sstream>

#include <daahm/errors.hpp>
#include <daahm/types.hpp>

namespace daahm {

// Processing delay of the selected metrics:
//   t = sum_m alpha_m * datasize_m * cycles_m / frequency   [seconds]
template <typename DerivedA, typename DerivedD, typename DerivedC>
typename DerivedA::Scalar compute_delay(const Eigen::MatrixBase<DerivedA>& alpha,
                                        const Eigen::MatrixBase<DerivedD>& datasize,
                                        const Eigen::MatrixBase<DerivedC>& cycles,
                                        typename DerivedA::Scalar frequency) {
  if (alpha.size() != datasize.size() || alpha.size() != cycles.size()) {
    throw InvalidInput("compute_delay: selection, datasize and cycles must have equal length");
  }
  if (!(frequency > 0)) {
    throw InvalidInput("compute_delay: frequency must be positive");
  }
  return alpha.cwiseProduct(datasize).dot(cycles) / frequency;
}

template <typename DerivedA, typename Scalar>
Scalar compute_delay(const Eigen::MatrixBase<DerivedA>& alpha, const TaskSpecT<Scalar>& task,
                     Scalar frequency) {
  return compute_delay(alpha, task.datasize, task.cycles, frequency);
}

// Energy drawn while computing for `delay` seconds:
//   ec = switched_capacitance * frequency^exponent * delay   [joules]
template <typename Scalar>
Scalar compute_energy(const DeviceSpecT<Scalar>& device, Scalar delay) {
  if (delay < Scalar(0)) {
    throw InvalidInput("compute_energy: delay must be nonnegative");
  }
  return device.switched_capacitance *
         std::pow(device.frequency, device.frequency_exponent) * delay;
}

// Weighted energy/delay cost: balance * energy + (1 - balance) * delay.
template <typename Scalar>
Scalar compute_cost(Scalar balance, Scalar energy, Scalar delay) {
  if (!(balance >= Scalar(0) && balance <= Scalar(1))) {
    throw InvalidInput("compute_cost: balance must lie in [0, 1]");
  }
  return balance * energy + (Scalar(1) - balance) * delay;
}

// Cosine similarity between an activity's importance row and a binary
// selection. An empty selection has zero relevance by definition; a zero
// importance row is rejected (every activity must value some metric).
template <typename DerivedI, typename DerivedA>
typename DerivedI::Scalar compute_relevance(const Eigen::MatrixBase<DerivedI>& importance_row,
                                            const Eigen::MatrixBase<DerivedA>& alpha) {
  using Scalar = typename DerivedI::Scalar;
  if (importance_row.size() != alpha.size()) {
    throw InvalidInput("compute_relevance: importance row and selection must have equal length");
  }
  const Scalar importance_norm = importance_row.norm();
  if (!(importance_norm > Scalar(0))) {
    throw InvalidInput("compute_relevance: importance row must have a positive norm");
  }
  const Scalar alpha_norm = alpha.norm();
  if (alpha_norm == Scalar(0)) {
    return Scalar(0);
  }
  const Scalar value = importance_row.dot(alpha) / (importance_norm * alpha_norm);
  return std::min(value, Scalar(1));  // guards rounding just past 1
}

// Binary selection from continuous weights: alpha_m = 1 iff beta_m > theta.
// The comparison is strict, so weights exactly at the threshold stay off.
template <typename Derived>
VectorX<typename Derived::Scalar> threshold_select(const Eigen::MatrixBase<Derived>& beta,
                                                   typename Derived::Scalar theta) {
  using Scalar = typename Derived::Scalar;
  if (!(theta > Scalar(0) && theta < Scalar(1))) {
    throw InvalidInput("threshold_select: theta must lie in (0, 1)");
  }
  return (beta.array() > theta).template cast<Scalar>().matrix();
}

// Per-slot utility: relevance minus tradeoff-weighted cost. This is one
// device's contribution to the global objective and the learning reward.
template <typename Scalar>
Scalar per_step_utility(Scalar relevance, Scalar cost, Scalar tradeoff) {
  if (tradeoff < Scalar(0)) {
    throw InvalidInput("per_step_utility: tradeoff must be nonnegative");
  }
  return relevance - tradeoff * cost;
}

// Full evaluation of one selection on one task/device pair.
struct SelectionOutcome {
  double relevance = 0.0;
  double delay = 0.0;
  double energy = 0.0;
  double cost = 0.0;
  double utility = 0.0;
};

inline SelectionOutcome evaluate_selection(const Eigen::Ref<const Vector>& importance_row,
                                           const Eigen::Ref<const Vector>& alpha,
                                           const TaskSpec& task, const DeviceSpec& device,
                                           double tradeoff) {
  SelectionOutcome out;
  out.relevance = compute_relevance(importance_row, alpha);
  out.delay = compute_delay(alpha, task, device.frequency);
  out.energy = compute_energy(device, out.delay);
  out.cost = compute_cost(device.energy_delay_balance, out.energy, out.delay);
  out.utility = per_step_utility(out.relevance, out.cost, tradeoff);
  return out;
}

// Bitmask encoding of a selection, metric 0 in the least significant bit.
inline std::uint32_t selection_to_mask(const Eigen::Ref<const Vector>& alpha) {
  if (alpha.size() > 32) {
    throw InvalidInput("selection_to_mask: at most 32 metrics");
  }
  std::uint32_t mask = 0;
  for (Index m = 0; m < alpha.size(); ++m) {
    if (alpha[m] != 0.0) mask |= (1u << m);
  }
  return mask;
}

inline Vector mask_to_selection(std::uint32_t mask, Index num_metrics) {
  Vector alpha = Vector::Zero(num_metrics);
  for (Index m = 0; m < num_metrics; ++m) {
    if (mask & (1u << m)) alpha[m] = 1.0;
  }
  return alpha;
}

// Importance matrices must have entries in [0, 1] and at least one strictly
// positive entry per activity row.
inline void validate_importance(const Matrix& importance) {
  for (Index g = 0; g < importance.rows(); ++g) {
    bool any_positive = false;
    for (Index m = 0; m < importance.cols(); ++m) {
      const double v = importance(g, m);
      if (!(v >= 0.0 && v <= 1.0)) {
        std::ostringstream msg;
        msg << "importance(" << g << ", " << m << ") = " << v << " outside [0, 1]";
        throw InvalidInput(msg.str());
      }
      any_positive = any_positive || v > 0.0;
    }
    if (!any_positive) {
      std::ostringstream msg;
      msg << "importance row " << g << " has no positive entry";
      throw InvalidInput(msg.str());
    }
  }
}

inline void validate_device(const DeviceSpec& device, Index index) {
  std::ostringstream msg;
  msg << "devices[" << index << "]: ";
  if (!(device.frequency > 0)) {
    throw InvalidInput(msg.str() + "frequency must be positive");
  }
  if (!(device.switched_capacitance > 0)) {
    throw InvalidInput(msg.str() + "switched_capacitance must be positive");
  }
  if (!(device.frequency_exponent >= 2)) {
    throw InvalidInput(msg.str() + "frequency_exponent must be at least 2");
  }
  if (!(device.energy_delay_balance >= 0 && device.energy_delay_balance <= 1)) {
    throw InvalidInput(msg.str() + "energy_delay_balance must lie in [0, 1]");
  }
}

}  // namespace daahm
