#pragma once

// Comparison policies and the shared evaluation loop. All four strategies
// (learned and fixed-form) are driven through the same Policy interface so
// they face identical environment draws.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <daahm/ddpg.hpp>
#include <daahm/env.hpp>

namespace daahm {

// Monitor everything: beta = 1 for every metric.
Vector baseline_classical(Index num_metrics);

// Fresh uniform weights every slot; each metric ends up selected with
// probability 1 - theta.
Vector baseline_random(Index num_metrics, Rng& rng);

// Weight 1 on the k metrics with the highest column-mean importance across
// activities (ties to the lower metric index), 0 elsewhere.
Vector baseline_fixed(const Matrix& importance, Index k);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual Vector act(const EnvState& state, const EnvConfig& config, Rng& rng) = 0;
};

class ClassicalPolicy final : public Policy {
 public:
  std::string name() const override { return "classical"; }
  Vector act(const EnvState&, const EnvConfig& config, Rng&) override {
    return baseline_classical(config.num_metrics);
  }
};

class RandomPolicy final : public Policy {
 public:
  std::string name() const override { return "random"; }
  Vector act(const EnvState&, const EnvConfig& config, Rng& rng) override {
    return baseline_random(config.num_metrics, rng);
  }
};

class FixedPolicy final : public Policy {
 public:
  explicit FixedPolicy(Index k) : k_(k) {}
  std::string name() const override { return "fixed"; }
  Vector act(const EnvState&, const EnvConfig& config, Rng&) override {
    return baseline_fixed(config.importance, k_);
  }

 private:
  Index k_;
};

// Noise-free trained actor.
class DdpgPolicy final : public Policy {
 public:
  explicit DdpgPolicy(const DdpgAgent& agent) : agent_(&agent) {}
  std::string name() const override { return "daahm"; }
  Vector act(const EnvState& state, const EnvConfig& config, Rng& rng) override {
    return actor_act(*agent_, encode_state(state, config), 0.0, rng);
  }

 private:
  const DdpgAgent* agent_;
};

enum class EvalMode { Static, Dynamic };

struct EvalRow {
  Index episode = 0;  // flat index over (device, episode) pairs
  Index slot = 0;
  ActivityId activity = 0;
  double reward = 0.0;
  double relevance = 0.0;
  double cost = 0.0;
  std::uint32_t alpha_mask = 0;
};

struct EvalResult {
  double cumulative_reward = 0.0;
  std::vector<EvalRow> rows;  // one per slot, in (device, episode, slot) order

  double mean_slot_reward() const {
    return rows.empty() ? 0.0 : cumulative_reward / static_cast<double>(rows.size());
  }
};

// Runs episodes_per_device episodes on every device. Environment seeds depend
// only on (seed, device, episode), so different policies evaluated with the
// same seed face identical activity traces and task draws.
EvalResult evaluate_policy(Policy& policy, const EnvConfig& config, Index episodes_per_device,
                           EvalMode mode, std::uint64_t seed);

}  // namespace daahm
