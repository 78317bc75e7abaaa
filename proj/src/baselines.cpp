#include <daahm/baselines.hpp>

#include <algorithm>
#include <numeric>

namespace daahm {

Vector baseline_classical(Index num_metrics) {
  if (num_metrics < 0) throw InvalidInput("baseline_classical: negative metric count");
  return Vector::Ones(num_metrics);
}

Vector baseline_random(Index num_metrics, Rng& rng) {
  if (num_metrics < 0) throw InvalidInput("baseline_random: negative metric count");
  Vector beta(num_metrics);
  for (Index m = 0; m < num_metrics; ++m) beta[m] = rng.uniform();
  return beta;
}

Vector baseline_fixed(const Matrix& importance, Index k) {
  const Index num_metrics = importance.cols();
  if (k < 0 || k > num_metrics) {
    throw InvalidInput("baseline_fixed: k must lie in [0, num_metrics]");
  }
  const Vector column_mean = importance.colwise().mean().transpose();
  std::vector<Index> order(num_metrics);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return column_mean[a] > column_mean[b]; });
  Vector beta = Vector::Zero(num_metrics);
  for (Index i = 0; i < k; ++i) beta[order[i]] = 1.0;
  return beta;
}

EvalResult evaluate_policy(Policy& policy, const EnvConfig& config, Index episodes_per_device,
                           EvalMode mode, std::uint64_t seed) {
  config.validate();
  if (episodes_per_device < 0) {
    throw InvalidInput("evaluate_policy: episodes_per_device must be nonnegative");
  }

  Rng policy_rng(derive_seed(seed, seed_stream::kEvalPolicy));
  EvalResult result;
  result.rows.reserve(static_cast<std::size_t>(config.num_devices * episodes_per_device *
                                               config.episode_length));

  for (Index device = 0; device < config.num_devices; ++device) {
    MonitoringEnv env(config, device, mode == EvalMode::Static);
    for (Index episode = 0; episode < episodes_per_device; ++episode) {
      EnvState state = env.reset(derive_seed(seed, seed_stream::kEvalEnv, device, episode));
      const Index flat_episode = device * episodes_per_device + episode;
      for (Index slot = 0; slot < config.episode_length; ++slot) {
        const Vector beta = policy.act(state, config, policy_rng);
        const StepOutcome outcome = env.step(beta);
        EvalRow row;
        row.episode = flat_episode;
        row.slot = slot;
        row.activity = state.activity;
        row.reward = outcome.reward;
        row.relevance = outcome.info.relevance;
        row.cost = outcome.info.cost;
        row.alpha_mask = selection_to_mask(outcome.info.alpha);
        result.rows.push_back(row);
        result.cumulative_reward += outcome.reward;
        state = outcome.next_state;
      }
    }
  }
  return result;
}

}  // namespace daahm
