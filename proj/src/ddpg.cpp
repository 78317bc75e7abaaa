#include <daahm/ddpg.hpp>

#include <cmath>
#include <limits>
#include <sstream>

namespace daahm {

void AgentConfig::validate() const {
  if (hidden_size < 1) throw InvalidInput("agent.hidden_size must be positive");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw InvalidInput("agent.gamma must lie in [0, 1)");
  if (!(tau > 0.0 && tau <= 1.0)) throw InvalidInput("agent.tau must lie in (0, 1]");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) {
    throw InvalidInput("agent learning rates must be positive");
  }
  if (replay_capacity == 0) throw InvalidInput("agent.replay_capacity must be positive");
  if (batch_size == 0) throw InvalidInput("agent.batch_size must be positive");
  if (batch_size > replay_capacity) {
    throw InvalidInput("agent.batch_size cannot exceed replay_capacity");
  }
  if (!(noise_initial >= 0.0) || !(noise_final >= 0.0)) {
    throw InvalidInput("agent noise scales must be nonnegative");
  }
  if (!(noise_decay_fraction > 0.0 && noise_decay_fraction <= 1.0)) {
    throw InvalidInput("agent.noise_decay_fraction must lie in (0, 1]");
  }
}

DdpgAgent make_agent(Index num_activities, Index num_metrics, const AgentConfig& config,
                     std::uint64_t seed) {
  if (num_activities < 1 || num_metrics < 1) {
    throw InvalidInput("make_agent: need at least one activity and one metric");
  }
  config.validate();

  DdpgAgent agent;
  agent.num_activities = num_activities;
  agent.num_metrics = num_metrics;
  agent.config = config;

  const Index state_dim = num_activities + 1;
  agent.actor = mlp_init({state_dim, config.hidden_size, num_metrics},
                         {Activation::Relu, Activation::Sigmoid}, derive_seed(seed, 1));
  agent.critic = mlp_init({state_dim + num_metrics, config.hidden_size, 1},
                          {Activation::Relu, Activation::Identity}, derive_seed(seed, 2));
  agent.target_actor = agent.actor;
  agent.target_critic = agent.critic;
  agent.actor_opt = adam_init(agent.actor, config.actor_lr);
  agent.critic_opt = adam_init(agent.critic, config.critic_lr);
  return agent;
}

Vector encode_state(const EnvState& state, const EnvConfig& config) {
  if (state.activity < 0 || state.activity >= config.num_activities) {
    throw InvalidInput("encode_state: activity out of range");
  }
  Vector encoded = Vector::Zero(config.num_activities + 1);
  encoded[state.activity] = 1.0;
  encoded[config.num_activities] = state.frequency / config.max_frequency();
  return encoded;
}

Vector actor_act(const DdpgAgent& agent, const Vector& encoded_state, double noise_scale,
                 Rng& rng) {
  Vector beta = forward(agent.actor, encoded_state);
  if (noise_scale > 0.0) {
    for (Index m = 0; m < beta.size(); ++m) beta[m] += rng.normal(0.0, noise_scale);
  }
  return beta.cwiseMax(0.0).cwiseMin(1.0);
}

UpdateStats ddpg_update(DdpgAgent& agent, const std::vector<Transition>& batch) {
  if (batch.empty()) throw InvalidInput("ddpg_update: batch must be non-empty");
  const Index batch_size = static_cast<Index>(batch.size());
  const Index state_dim = agent.state_dim();
  const Index action_dim = agent.num_metrics;

  Matrix states(state_dim, batch_size);
  Matrix actions(action_dim, batch_size);
  Matrix next_states(state_dim, batch_size);
  Vector rewards(batch_size);
  Vector continuing(batch_size);
  for (Index b = 0; b < batch_size; ++b) {
    const Transition& t = batch[b];
    if (t.state.size() != state_dim || t.next_state.size() != state_dim ||
        t.action.size() != action_dim) {
      throw InvalidInput("ddpg_update: transition dimensions do not match the agent");
    }
    states.col(b) = t.state;
    actions.col(b) = t.action;
    next_states.col(b) = t.next_state;
    rewards[b] = t.reward;
    continuing[b] = t.done ? 0.0 : 1.0;
  }

  // Bootstrapped critic targets from the frozen copies.
  const Matrix next_actions = forward(agent.target_actor, next_states);
  Matrix next_inputs(state_dim + action_dim, batch_size);
  next_inputs.topRows(state_dim) = next_states;
  next_inputs.bottomRows(action_dim) = next_actions;
  const Vector next_values = forward(agent.target_critic, next_inputs).row(0).transpose();

  UpdateStats stats;
  stats.td_targets =
      rewards + agent.config.gamma * continuing.cwiseProduct(next_values);

  // Critic: mean squared error against the targets.
  Matrix critic_inputs(state_dim + action_dim, batch_size);
  critic_inputs.topRows(state_dim) = states;
  critic_inputs.bottomRows(action_dim) = actions;
  ForwardCache critic_cache;
  const Matrix values = forward(agent.critic, critic_inputs, &critic_cache);
  const Vector residual = values.row(0).transpose() - stats.td_targets;
  stats.critic_loss = residual.squaredNorm() / static_cast<double>(batch_size);
  if (!std::isfinite(stats.critic_loss)) {
    std::ostringstream msg;
    msg << "ddpg_update: non-finite critic loss (batch " << batch_size << ", mean reward "
        << rewards.mean() << ")";
    throw PoisonedUpdate(msg.str());
  }
  const Matrix value_grad =
      (2.0 / static_cast<double>(batch_size)) * residual.transpose();
  adam_step(agent.critic, backward(agent.critic, critic_cache, value_grad).gradients,
            agent.critic_opt);

  // Actor: ascend the (just updated) critic's value of its own actions.
  ForwardCache actor_cache;
  const Matrix policy_actions = forward(agent.actor, states, &actor_cache);
  Matrix policy_inputs(state_dim + action_dim, batch_size);
  policy_inputs.topRows(state_dim) = states;
  policy_inputs.bottomRows(action_dim) = policy_actions;
  ForwardCache policy_value_cache;
  const Matrix policy_values = forward(agent.critic, policy_inputs, &policy_value_cache);
  stats.actor_objective = policy_values.row(0).mean();
  if (!std::isfinite(stats.actor_objective)) {
    throw PoisonedUpdate("ddpg_update: non-finite actor objective");
  }

  const Matrix objective_grad =
      Matrix::Constant(1, batch_size, 1.0 / static_cast<double>(batch_size));
  const Matrix input_grad =
      backward(agent.critic, policy_value_cache, objective_grad).input_gradient;
  const Matrix action_grad = input_grad.bottomRows(action_dim);
  MlpGradients actor_grads = backward(agent.actor, actor_cache, action_grad).gradients;
  for (auto& w : actor_grads.weight) w = -w;  // gradient ascent
  for (auto& b : actor_grads.bias) b = -b;
  adam_step(agent.actor, actor_grads, agent.actor_opt);

  soft_update(agent.target_actor, agent.actor, agent.config.tau);
  soft_update(agent.target_critic, agent.critic, agent.config.tau);
  return stats;
}

TrainResult train_ddpg(const EnvConfig& env_config, const AgentConfig& agent_config,
                       Index episodes, std::uint64_t seed) {
  env_config.validate();
  if (episodes < 0) throw InvalidInput("train_ddpg: episodes must be nonnegative");

  TrainResult result;
  result.agent = make_agent(env_config.num_activities, env_config.num_metrics, agent_config,
                            derive_seed(seed, seed_stream::kAgentInit));
  if (episodes == 0) return result;

  Rng noise_rng(derive_seed(seed, seed_stream::kNoise));
  Rng replay_rng(derive_seed(seed, seed_stream::kReplay));
  ReplayBuffer replay(agent_config.replay_capacity);

  const double total_steps =
      static_cast<double>(episodes) * static_cast<double>(env_config.episode_length);
  const double decay_steps = std::max(1.0, agent_config.noise_decay_fraction * total_steps);
  long step = 0;

  result.history.episode_reward.reserve(episodes);
  result.history.critic_loss.reserve(episodes);
  result.history.actor_objective.reserve(episodes);

  for (Index episode = 0; episode < episodes; ++episode) {
    MonitoringEnv env(env_config, episode % env_config.num_devices);
    EnvState state = env.reset(derive_seed(seed, seed_stream::kTrainEnv, episode));
    Vector encoded = encode_state(state, env_config);

    double reward_sum = 0.0;
    double loss_sum = 0.0;
    double objective_sum = 0.0;
    long update_count = 0;

    for (Index slot = 0; slot < env_config.episode_length; ++slot) {
      const double progress = std::min(1.0, static_cast<double>(step) / decay_steps);
      const double noise_scale =
          agent_config.noise_initial +
          (agent_config.noise_final - agent_config.noise_initial) * progress;

      const Vector action = actor_act(result.agent, encoded, noise_scale, noise_rng);
      const StepOutcome outcome = env.step(action);
      Vector next_encoded = encode_state(outcome.next_state, env_config);
      replay.push({encoded, action, outcome.reward, next_encoded, outcome.done});

      if (replay.size() >= agent_config.warmup && replay.size() >= agent_config.batch_size) {
        const UpdateStats stats =
            ddpg_update(result.agent, replay.sample(agent_config.batch_size, replay_rng));
        loss_sum += stats.critic_loss;
        objective_sum += stats.actor_objective;
        ++update_count;
      }

      reward_sum += outcome.reward;
      encoded = std::move(next_encoded);
      ++step;
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    result.history.episode_reward.push_back(reward_sum /
                                            static_cast<double>(env_config.episode_length));
    result.history.critic_loss.push_back(
        update_count > 0 ? loss_sum / static_cast<double>(update_count) : nan);
    result.history.actor_objective.push_back(
        update_count > 0 ? objective_sum / static_cast<double>(update_count) : nan);
  }
  return result;
}

}  // namespace daahm
