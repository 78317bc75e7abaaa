#include <daahm/mlp.hpp>

#include <cmath>
#include <sstream>

namespace daahm {

namespace {

Matrix apply_activation(Activation activation, const Matrix& pre) {
  switch (activation) {
    case Activation::Identity:
      return pre;
    case Activation::Relu:
      return pre.cwiseMax(0.0);
    case Activation::Sigmoid:
      return ((-pre.array()).exp() + 1.0).inverse().matrix();
  }
  throw InvalidInput("unknown activation");
}

// Derivative expressed through pre- and post-activation values.
Matrix activation_gradient(Activation activation, const Matrix& pre, const Matrix& post,
                           const Matrix& upstream) {
  switch (activation) {
    case Activation::Identity:
      return upstream;
    case Activation::Relu:
      return (pre.array() > 0.0).select(upstream, 0.0);
    case Activation::Sigmoid:
      return (upstream.array() * post.array() * (1.0 - post.array())).matrix();
  }
  throw InvalidInput("unknown activation");
}

}  // namespace

Index Mlp::parameter_count() const {
  Index count = 0;
  for (const auto& layer : layers) count += layer.weight.size() + layer.bias.size();
  return count;
}

Mlp mlp_init(const std::vector<Index>& sizes, const std::vector<Activation>& activations,
             std::uint64_t seed) {
  if (sizes.size() < 2) throw InvalidInput("mlp_init: need at least input and output sizes");
  if (activations.size() != sizes.size() - 1) {
    throw InvalidInput("mlp_init: need one activation per layer");
  }
  for (Index size : sizes) {
    if (size < 1) throw InvalidInput("mlp_init: layer sizes must be positive");
  }

  Rng rng(seed);
  Mlp net;
  net.layers.resize(sizes.size() - 1);
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    DenseLayer& layer = net.layers[l];
    const Index fan_in = sizes[l];
    const Index fan_out = sizes[l + 1];
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    layer.weight.resize(fan_out, fan_in);
    for (Index r = 0; r < fan_out; ++r) {
      for (Index c = 0; c < fan_in; ++c) {
        layer.weight(r, c) = rng.uniform(-bound, bound);
      }
    }
    layer.bias = Vector::Zero(fan_out);
    layer.activation = activations[l];
  }
  return net;
}

Matrix forward(const Mlp& net, const Matrix& input, ForwardCache* cache) {
  if (!net.layers.empty() && input.rows() != net.input_size()) {
    throw InvalidInput("forward: input dimension mismatch");
  }
  if (cache) {
    cache->activations.clear();
    cache->preactivations.clear();
    cache->activations.reserve(net.layers.size() + 1);
    cache->preactivations.reserve(net.layers.size());
    cache->activations.push_back(input);
  }
  Matrix current = input;
  for (const auto& layer : net.layers) {
    Matrix pre = (layer.weight * current).colwise() + layer.bias;
    current = apply_activation(layer.activation, pre);
    if (cache) {
      cache->preactivations.push_back(std::move(pre));
      cache->activations.push_back(current);
    }
  }
  return current;
}

Vector forward(const Mlp& net, const Vector& input) {
  return forward(net, Matrix(input), nullptr).col(0);
}

BackwardResult backward(const Mlp& net, const ForwardCache& cache, const Matrix& output_gradient) {
  const std::size_t depth = net.layers.size();
  if (cache.activations.size() != depth + 1 || cache.preactivations.size() != depth) {
    throw InvalidInput("backward: cache does not match the network depth");
  }
  for (std::size_t l = 0; l < depth; ++l) {
    if (cache.activations[l].rows() != net.layers[l].weight.cols() ||
        cache.preactivations[l].rows() != net.layers[l].weight.rows()) {
      throw InvalidInput("backward: cache does not match the network shapes");
    }
  }
  if (depth > 0 && (output_gradient.rows() != net.output_size() ||
                    output_gradient.cols() != cache.activations.back().cols())) {
    throw InvalidInput("backward: output gradient shape mismatch");
  }

  BackwardResult result;
  result.gradients.weight.resize(depth);
  result.gradients.bias.resize(depth);
  Matrix upstream = output_gradient;
  for (std::size_t l = depth; l-- > 0;) {
    const DenseLayer& layer = net.layers[l];
    const Matrix dz = activation_gradient(layer.activation, cache.preactivations[l],
                                          cache.activations[l + 1], upstream);
    result.gradients.weight[l].noalias() = dz * cache.activations[l].transpose();
    result.gradients.bias[l] = dz.rowwise().sum();
    upstream.noalias() = layer.weight.transpose() * dz;
  }
  result.input_gradient = std::move(upstream);
  return result;
}

AdamState adam_init(const Mlp& net, double learning_rate) {
  AdamState state;
  state.learning_rate = learning_rate;
  state.slots.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    state.slots[l].weight_m = Matrix::Zero(layer.weight.rows(), layer.weight.cols());
    state.slots[l].weight_v = Matrix::Zero(layer.weight.rows(), layer.weight.cols());
    state.slots[l].bias_m = Vector::Zero(layer.bias.size());
    state.slots[l].bias_v = Vector::Zero(layer.bias.size());
  }
  return state;
}

void adam_step(Mlp& net, const MlpGradients& gradients, AdamState& state) {
  const std::size_t depth = net.layers.size();
  if (gradients.weight.size() != depth || gradients.bias.size() != depth ||
      state.slots.size() != depth) {
    throw InvalidInput("adam_step: gradient/state shape mismatch");
  }
  for (std::size_t l = 0; l < depth; ++l) {
    if (!gradients.weight[l].allFinite() || !gradients.bias[l].allFinite()) {
      std::ostringstream msg;
      msg << "adam_step: non-finite gradient in layer " << l << "; step aborted";
      throw PoisonedUpdate(msg.str());
    }
  }

  state.step += 1;
  const double correction1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double correction2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < depth; ++l) {
    auto& slot = state.slots[l];
    const Matrix& gw = gradients.weight[l];
    const Vector& gb = gradients.bias[l];
    slot.weight_m = state.beta1 * slot.weight_m + (1.0 - state.beta1) * gw;
    slot.weight_v = state.beta2 * slot.weight_v.array().matrix() +
                    (1.0 - state.beta2) * gw.array().square().matrix();
    slot.bias_m = state.beta1 * slot.bias_m + (1.0 - state.beta1) * gb;
    slot.bias_v = state.beta2 * slot.bias_v.array().matrix() +
                  (1.0 - state.beta2) * gb.array().square().matrix();

    net.layers[l].weight.array() -=
        state.learning_rate * (slot.weight_m.array() / correction1) /
        ((slot.weight_v.array() / correction2).sqrt() + state.epsilon);
    net.layers[l].bias.array() -= state.learning_rate * (slot.bias_m.array() / correction1) /
                                  ((slot.bias_v.array() / correction2).sqrt() + state.epsilon);
  }
}

void soft_update(Mlp& target, const Mlp& main, double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidInput("soft_update: tau must lie in (0, 1]");
  if (target.layers.size() != main.layers.size()) {
    throw InvalidInput("soft_update: network depth mismatch");
  }
  for (std::size_t l = 0; l < main.layers.size(); ++l) {
    auto& t = target.layers[l];
    const auto& m = main.layers[l];
    if (t.weight.rows() != m.weight.rows() || t.weight.cols() != m.weight.cols()) {
      throw InvalidInput("soft_update: layer shape mismatch");
    }
    t.weight = tau * m.weight + (1.0 - tau) * t.weight;
    t.bias = tau * m.bias + (1.0 - tau) * t.bias;
  }
}

double finite_diff_check(const Mlp& net, const Vector& input,
                         const std::function<double(const Vector&)>& loss,
                         const std::function<Vector(const Vector&)>& loss_gradient, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("finite_diff_check: eps must be positive");

  ForwardCache cache;
  const Matrix output = forward(net, Matrix(input), &cache);
  if (net.layers.empty()) return 0.0;
  const Matrix output_grad = Matrix(loss_gradient(output.col(0)));
  const BackwardResult analytic = backward(net, cache, output_grad);

  Mlp probe = net;
  double worst = 0.0;
  auto probe_entry = [&](double& value, double analytic_grad) {
    const double original = value;
    value = original + eps;
    const double plus = loss(forward(probe, input));
    value = original - eps;
    const double minus = loss(forward(probe, input));
    value = original;
    const double numeric = (plus - minus) / (2.0 * eps);
    const double rel = std::abs(analytic_grad - numeric) / std::max(std::abs(numeric), 1e-6);
    worst = std::max(worst, rel);
  };

  for (std::size_t l = 0; l < probe.layers.size(); ++l) {
    auto& layer = probe.layers[l];
    for (Index r = 0; r < layer.weight.rows(); ++r) {
      for (Index c = 0; c < layer.weight.cols(); ++c) {
        probe_entry(layer.weight(r, c), analytic.gradients.weight[l](r, c));
      }
    }
    for (Index r = 0; r < layer.bias.size(); ++r) {
      probe_entry(layer.bias[r], analytic.gradients.bias[l][r]);
    }
  }
  return worst;
}

double random_network_gradcheck(int count, std::uint64_t seed, double eps) {
  Rng rng(seed);
  double worst = 0.0;
  // Guard band well above the largest pre-activation shift a probe of size
  // eps can cause, so no central difference straddles a ReLU kink.
  const double kink_guard = 1e-3;

  for (int i = 0; i < count; ++i) {
    for (int attempt = 0; attempt < 100; ++attempt) {
      const Index input_size = 1 + rng.uniform_index(10);
      const Index hidden_size = 1 + rng.uniform_index(64);
      const Index output_size = 1 + rng.uniform_index(10);
      const std::vector<Activation> menu = {Activation::Relu, Activation::Sigmoid,
                                            Activation::Identity};
      const Activation hidden_act = menu[rng.uniform_index(3)];
      const Activation output_act = menu[rng.uniform_index(3)];

      const Mlp net = mlp_init({input_size, hidden_size, output_size}, {hidden_act, output_act},
                               rng.next_u64());
      Vector input(input_size);
      for (Index r = 0; r < input_size; ++r) input[r] = rng.normal();

      ForwardCache cache;
      forward(net, Matrix(input), &cache);
      bool near_kink = false;
      for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (net.layers[l].activation == Activation::Relu &&
            (cache.preactivations[l].array().abs() < kink_guard).any()) {
          near_kink = true;
          break;
        }
      }
      if (near_kink) continue;

      Vector target(output_size);
      for (Index r = 0; r < output_size; ++r) target[r] = rng.normal();
      auto loss = [&](const Vector& y) { return 0.5 * (y - target).squaredNorm(); };
      auto loss_grad = [&](const Vector& y) { return Vector(y - target); };
      worst = std::max(worst, finite_diff_check(net, input, loss, loss_grad, eps));
      break;
    }
  }
  return worst;
}

}  // namespace daahm
