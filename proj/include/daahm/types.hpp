#pragma once

#include <Eigen/Dense>

#include <vector>

namespace daahm {

using Index = Eigen::Index;

template <typename Scalar>
using VectorX = Eigen::Vector<Scalar, Eigen::Dynamic>;
template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// 64-bit floats everywhere; tolerances in the tests assume this width.
using Vector = VectorX<double>;
using Matrix = MatrixX<double>;

// Index into the activity set [0, num_activities).
using ActivityId = Index;
// Index into the monitoring-metric set [0, num_metrics).
using MetricId = Index;

// Per-slot computation task: datasize in bits and CPU cycles per bit,
// one entry per monitoring metric.
template <typename Scalar>
struct TaskSpecT {
  VectorX<Scalar> datasize;
  VectorX<Scalar> cycles;
};
using TaskSpec = TaskSpecT<double>;

// Wearable device constants. frequency in Hz (cycles/s), switched_capacitance
// couples frequency^frequency_exponent to power, energy_delay_balance in [0,1]
// weighs energy against delay in the cost.
template <typename Scalar>
struct DeviceSpecT {
  Scalar frequency = Scalar(1e8);
  Scalar switched_capacitance = Scalar(1e-27);
  Scalar frequency_exponent = Scalar(3);
  Scalar energy_delay_balance = Scalar(0.5);
};
using DeviceSpec = DeviceSpecT<double>;

}  // namespace daahm
