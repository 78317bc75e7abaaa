#pragma once

// Deep deterministic policy gradient over the monitoring environment. The
// actor maps the encoded state to continuous metric weights in (0, 1); the
// critic scores state/action pairs; target copies of both are blended in
// softly after every update.

#include <cstdint>
#include <vector>

#include <daahm/env.hpp>
#include <daahm/mlp.hpp>
#include <daahm/replay.hpp>
#include <daahm/rng.hpp>

namespace daahm {

struct AgentConfig {
  Index hidden_size = 64;
  double gamma = 0.99;
  double tau = 0.005;
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  std::size_t replay_capacity = 50000;
  std::size_t batch_size = 64;
  std::size_t warmup = 1000;  // transitions stored before updates start
  double noise_initial = 0.2;
  double noise_final = 0.02;
  double noise_decay_fraction = 0.5;  // of total training steps

  void validate() const;
};

struct DdpgAgent {
  Index num_activities = 0;
  Index num_metrics = 0;
  AgentConfig config;

  Mlp actor;          // (G+1) -> hidden -> M, sigmoid output
  Mlp critic;         // (G+1+M) -> hidden -> 1, identity output
  Mlp target_actor;
  Mlp target_critic;
  AdamState actor_opt;
  AdamState critic_opt;

  Index state_dim() const { return num_activities + 1; }
};

DdpgAgent make_agent(Index num_activities, Index num_metrics, const AgentConfig& config,
                     std::uint64_t seed);

// One-hot activity concatenated with frequency normalized by the fleet
// maximum; length num_activities + 1.
Vector encode_state(const EnvState& state, const EnvConfig& config);

// beta = clamp(actor(state) + N(0, noise_scale^2), 0, 1). noise_scale = 0 is
// the deterministic policy and consumes no draws.
Vector actor_act(const DdpgAgent& agent, const Vector& encoded_state, double noise_scale,
                 Rng& rng);

struct UpdateStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;  // mean critic value of the actor's actions
  Vector td_targets;             // one entry per batch element
};

// One learning step: critic regresses the bootstrapped targets
// y = r + gamma * (1 - done) * Q_target(s', actor_target(s')), the actor
// ascends the critic's value of its own actions, and both targets are
// soft-updated. Throws PoisonedUpdate on non-finite losses.
UpdateStats ddpg_update(DdpgAgent& agent, const std::vector<Transition>& batch);

struct TrainHistory {
  std::vector<double> episode_reward;     // per-episode mean slot reward
  std::vector<double> critic_loss;        // per-episode mean over updates (NaN before warmup)
  std::vector<double> actor_objective;    // same cadence as critic_loss
};

struct TrainResult {
  DdpgAgent agent;
  TrainHistory history;
};

// Episode loop: act with decaying Gaussian noise, store, update after warmup
// on every slot. Devices are visited round-robin, one per episode. Fully
// deterministic for a fixed (config, seed).
TrainResult train_ddpg(const EnvConfig& env_config, const AgentConfig& agent_config,
                       Index episodes, std::uint64_t seed);

}  // namespace daahm
