#pragma once

// Minimal dense network machinery: batched forward pass, exact analytic
// backpropagation, Adam, soft target blending and a central-difference
// gradient checker. Batches are column-major: one sample per column.

#include <cstdint>
#include <functional>
#include <vector>

#include <daahm/errors.hpp>
#include <daahm/rng.hpp>
#include <daahm/types.hpp>

namespace daahm {

enum class Activation : std::uint8_t { Identity = 0, Relu = 1, Sigmoid = 2 };

struct DenseLayer {
  Matrix weight;  // output_size x input_size
  Vector bias;    // output_size
  Activation activation = Activation::Identity;
};

struct Mlp {
  std::vector<DenseLayer> layers;

  Index input_size() const { return layers.empty() ? 0 : layers.front().weight.cols(); }
  Index output_size() const { return layers.empty() ? 0 : layers.back().weight.rows(); }
  Index parameter_count() const;
};

// Weights ~ U(-1/sqrt(fan_in), +1/sqrt(fan_in)), biases zero; one activation
// tag per layer, so activations.size() == sizes.size() - 1.
Mlp mlp_init(const std::vector<Index>& sizes, const std::vector<Activation>& activations,
             std::uint64_t seed);

// Per-layer inputs and pre-activations kept for the backward pass.
// activations[l] is the input to layer l; activations.back() is the output.
struct ForwardCache {
  std::vector<Matrix> activations;
  std::vector<Matrix> preactivations;
};

Matrix forward(const Mlp& net, const Matrix& input, ForwardCache* cache = nullptr);
Vector forward(const Mlp& net, const Vector& input);

struct MlpGradients {
  std::vector<Matrix> weight;
  std::vector<Vector> bias;
};

struct BackwardResult {
  MlpGradients gradients;
  Matrix input_gradient;  // d(loss)/d(input), input_size x batch
};

// Exact gradients for the scalar loss whose output gradient is
// `output_gradient` (output_size x batch). The cache must come from a
// forward pass of the same network on the same batch.
BackwardResult backward(const Mlp& net, const ForwardCache& cache, const Matrix& output_gradient);

struct AdamState {
  struct Slot {
    Matrix weight_m, weight_v;
    Vector bias_m, bias_v;
  };
  std::vector<Slot> slots;
  long step = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

AdamState adam_init(const Mlp& net, double learning_rate);

// Bias-corrected Adam step, in place. A non-finite gradient aborts the whole
// step (no parameter is touched) and raises PoisonedUpdate.
void adam_step(Mlp& net, const MlpGradients& gradients, AdamState& state);

// target <- tau * main + (1 - tau) * target, elementwise.
void soft_update(Mlp& target, const Mlp& main, double tau);

// Central-difference check of backward() against the given loss. Returns the
// worst relative error max |analytic - numeric| / max(|numeric|, 1e-6).
double finite_diff_check(const Mlp& net, const Vector& input,
                         const std::function<double(const Vector&)>& loss,
                         const std::function<Vector(const Vector&)>& loss_gradient, double eps);

// Runs finite_diff_check over `count` randomly shaped and initialized
// networks (sizes up to 10-64-10, mixed activations) and returns the worst
// error seen. Inputs that land a ReLU pre-activation inside a small guard
// band around its kink are redrawn, since central differences straddling the
// kink do not estimate either one-sided derivative.
double random_network_gradcheck(int count, std::uint64_t seed, double eps = 1e-5);

}  // namespace daahm
