#include <daahm/baselines.hpp>
#include <daahm/ddpg.hpp>
#include <daahm/replay.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace daahm {
namespace {

Vector make_vector(std::initializer_list<double> values) {
  Vector v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

EnvConfig tiny_env(Index activities = 3, Index metrics = 4, Index devices = 2) {
  EnvConfig cfg;
  cfg.num_activities = activities;
  cfg.num_metrics = metrics;
  cfg.num_devices = devices;
  cfg.episode_length = 10;
  cfg.importance = Matrix::Constant(activities, metrics, 0.3);
  for (Index g = 0; g < activities; ++g) cfg.importance(g, g % metrics) = 1.0;
  cfg.devices.resize(devices);
  for (Index n = 0; n < devices; ++n) {
    cfg.devices[n].frequency = 8e7 + 2e7 * static_cast<double>(n);
  }
  cfg.datasize_min = Vector::Constant(metrics, 1e5);
  cfg.datasize_max = Vector::Constant(metrics, 2e5);
  cfg.cycles = Vector::Constant(metrics, 100.0);
  cfg.dynamics = ActivityDynamics::iid_uniform(activities);
  return cfg;
}

Transition make_transition(const DdpgAgent& agent, Rng& rng, double reward, bool done) {
  Transition t;
  t.state = Vector::Zero(agent.state_dim());
  t.state[rng.uniform_index(agent.num_activities)] = 1.0;
  t.state[agent.num_activities] = rng.uniform(0.5, 1.0);
  t.action = Vector::Zero(agent.num_metrics);
  for (Index m = 0; m < agent.num_metrics; ++m) t.action[m] = rng.uniform();
  t.reward = reward;
  t.next_state = t.state;
  t.done = done;
  return t;
}

TEST(Replay, RingEvictionAndErrors) {
  ReplayBuffer buffer(2);
  Rng rng(1);
  EXPECT_THROW(buffer.sample(1, rng), NotReady);

  Transition t;
  t.state = make_vector({1.0});
  t.action = make_vector({0.5});
  t.next_state = make_vector({0.0});
  t.reward = 1.0;
  buffer.push(t);
  t.reward = 2.0;
  buffer.push(t);
  t.reward = 3.0;
  buffer.push(t);  // evicts reward 1.0

  EXPECT_EQ(buffer.size(), 2u);
  EXPECT_EQ(buffer.at(0).reward, 3.0);
  EXPECT_EQ(buffer.at(1).reward, 2.0);
  EXPECT_THROW(buffer.sample(3, rng), NotReady);
  EXPECT_THROW(ReplayBuffer(0), InvalidInput);
}

TEST(Replay, SeededSamplingIsDeterministic) {
  ReplayBuffer buffer(16);
  for (int i = 0; i < 16; ++i) {
    Transition t;
    t.state = make_vector({static_cast<double>(i)});
    t.action = make_vector({0.5});
    t.next_state = make_vector({0.0});
    t.reward = static_cast<double>(i);
    buffer.push(t);
  }
  Rng a(9), b(9);
  const auto batch_a = buffer.sample(8, a);
  const auto batch_b = buffer.sample(8, b);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(batch_a[i].reward, batch_b[i].reward);
}

TEST(Replay, SamplingIsUniform) {
  ReplayBuffer buffer(10);
  for (int i = 0; i < 10; ++i) {
    Transition t;
    t.state = make_vector({static_cast<double>(i)});
    t.action = make_vector({0.5});
    t.next_state = make_vector({0.0});
    t.reward = static_cast<double>(i);
    buffer.push(t);
  }
  Rng rng(31);
  std::vector<int> counts(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; i += 10) {
    for (const Transition& t : buffer.sample(10, rng)) {
      counts[static_cast<int>(t.reward)] += 1;
    }
  }
  for (int i = 0; i < 10; ++i) {
    EXPECT_NEAR(static_cast<double>(counts[i]) / draws, 0.1, 0.01) << "item " << i;
  }
}

TEST(StateEncoding, OneHotPlusNormalizedFrequency) {
  const EnvConfig cfg = tiny_env();
  const EnvState state{2, cfg.devices[0].frequency, 0};
  const Vector encoded = encode_state(state, cfg);
  ASSERT_EQ(encoded.size(), cfg.num_activities + 1);
  EXPECT_EQ(encoded[0], 0.0);
  EXPECT_EQ(encoded[1], 0.0);
  EXPECT_EQ(encoded[2], 1.0);
  EXPECT_NEAR(encoded[3], 0.8, 1e-12);
  EXPECT_EQ(encoded.head(3).sum(), 1.0);

  const EnvState fastest{0, cfg.devices[1].frequency, 0};
  EXPECT_EQ(encode_state(fastest, cfg)[3], 1.0);
  EXPECT_THROW(encode_state(EnvState{5, 1e8, 0}, cfg), InvalidInput);
}

TEST(ActorAct, DeterministicNoiselessAndClamped) {
  const EnvConfig cfg = tiny_env();
  const DdpgAgent agent = make_agent(cfg.num_activities, cfg.num_metrics, AgentConfig{}, 17);
  const Vector s = encode_state(EnvState{1, cfg.devices[1].frequency, 0}, cfg);

  Rng rng(3);
  const Vector a = actor_act(agent, s, 0.0, rng);
  const Vector b = actor_act(agent, s, 0.0, rng);
  EXPECT_TRUE((a.array() == b.array()).all());

  // Fresh networks have zero biases, so the sigmoid head sits at 1/2.
  DdpgAgent blank = agent;
  for (auto& layer : blank.actor.layers) layer.weight.setZero();
  const Vector half = actor_act(blank, s, 0.0, rng);
  for (Index m = 0; m < half.size(); ++m) EXPECT_DOUBLE_EQ(half[m], 0.5);

  for (int trial = 0; trial < 200; ++trial) {
    const Vector noisy = actor_act(agent, s, 5.0, rng);
    for (Index m = 0; m < noisy.size(); ++m) {
      EXPECT_GE(noisy[m], 0.0);
      EXPECT_LE(noisy[m], 1.0);
    }
  }
}

TEST(DdpgUpdate, TdTargetHandArithmetic) {
  const EnvConfig cfg = tiny_env();
  DdpgAgent agent = make_agent(cfg.num_activities, cfg.num_metrics, AgentConfig{}, 11);

  Rng rng(5);
  Transition t = make_transition(agent, rng, 0.5, false);

  // Pin the frozen target value at exactly 1.0: constant-output critic.
  agent.target_critic.layers[0].weight.setZero();
  agent.target_critic.layers[0].bias.setZero();
  agent.target_critic.layers[1].weight.setZero();
  agent.target_critic.layers[1].bias.setConstant(1.0);

  const UpdateStats stats = ddpg_update(agent, {t});
  ASSERT_EQ(stats.td_targets.size(), 1);
  EXPECT_NEAR(stats.td_targets[0], 1.49, 1e-9);  // 0.5 + 0.99 * 1.0
}

TEST(DdpgUpdate, DoneCutsBootstrap) {
  const EnvConfig cfg = tiny_env();
  DdpgAgent agent = make_agent(cfg.num_activities, cfg.num_metrics, AgentConfig{}, 11);
  Rng rng(6);
  Transition t = make_transition(agent, rng, 0.37, true);
  const UpdateStats stats = ddpg_update(agent, {t});
  EXPECT_DOUBLE_EQ(stats.td_targets[0], 0.37);
}

TEST(DdpgUpdate, TdTargetsMatchIndependentRecomputation) {
  const EnvConfig cfg = tiny_env();
  DdpgAgent agent = make_agent(cfg.num_activities, cfg.num_metrics, AgentConfig{}, 23);
  Rng rng(7);
  std::vector<Transition> batch;
  for (int i = 0; i < 16; ++i) {
    batch.push_back(make_transition(agent, rng, rng.uniform(-1.0, 1.0), i % 5 == 0));
  }

  // Recompute targets from the frozen copies before the update mutates them.
  Vector expected(16);
  for (int i = 0; i < 16; ++i) {
    const Vector next_action = forward(agent.target_actor, batch[i].next_state);
    Vector critic_input(agent.state_dim() + agent.num_metrics);
    critic_input << batch[i].next_state, next_action;
    const double next_value = forward(agent.target_critic, critic_input)[0];
    expected[i] =
        batch[i].reward +
        agent.config.gamma * (batch[i].done ? 0.0 : 1.0) * next_value;
  }

  const UpdateStats stats = ddpg_update(agent, batch);
  for (int i = 0; i < 16; ++i) EXPECT_DOUBLE_EQ(stats.td_targets[i], expected[i]);
}

TEST(DdpgUpdate, TargetsMoveExactlyTauTowardMains) {
  const EnvConfig cfg = tiny_env();
  DdpgAgent agent = make_agent(cfg.num_activities, cfg.num_metrics, AgentConfig{}, 29);
  Rng rng(8);
  std::vector<Transition> batch;
  for (int i = 0; i < 8; ++i) batch.push_back(make_transition(agent, rng, 0.1, false));

  const Mlp target_before = agent.target_actor;
  const Mlp actor_before = agent.actor;
  const UpdateStats stats = ddpg_update(agent, batch);
  (void)stats;

  const double tau = agent.config.tau;
  for (std::size_t l = 0; l < agent.actor.layers.size(); ++l) {
    const Matrix expected =
        tau * agent.actor.layers[l].weight + (1.0 - tau) * target_before.layers[l].weight;
    EXPECT_TRUE(agent.target_actor.layers[l].weight.isApprox(expected, 1e-12));
  }
  EXPECT_FALSE(agent.actor.layers[0].weight.isApprox(actor_before.layers[0].weight, 1e-15));
}

TEST(DdpgUpdate, EmptyBatchAndDimensionErrors) {
  const EnvConfig cfg = tiny_env();
  DdpgAgent agent = make_agent(cfg.num_activities, cfg.num_metrics, AgentConfig{}, 31);
  EXPECT_THROW(ddpg_update(agent, {}), InvalidInput);

  Transition bad;
  bad.state = Vector::Zero(2);
  bad.action = Vector::Zero(agent.num_metrics);
  bad.next_state = Vector::Zero(agent.state_dim());
  EXPECT_THROW(ddpg_update(agent, {bad}), InvalidInput);
}

TEST(Baselines, ClassicalAllOnes) {
  const Vector beta = baseline_classical(3);
  EXPECT_TRUE(beta.isApprox(Vector::Ones(3)));
  EXPECT_TRUE(threshold_select(beta, 0.5).isApprox(Vector::Ones(3)));

  // With everything monitored, relevance is the cosine against the all-ones
  // direction, recomputable by hand.
  const Vector importance = make_vector({1.0, 0.8, 0.6, 0.0});
  const double expected = 2.4 / (std::sqrt(2.0) * 2.0);
  EXPECT_NEAR(compute_relevance(importance, threshold_select(baseline_classical(4), 0.5)),
              expected, 1e-12);
}

TEST(Baselines, RandomSelectionFrequencies) {
  Rng rng(1234);
  const double theta = 0.5;
  const int slots = 100000;
  Vector selected = Vector::Zero(3);
  for (int i = 0; i < slots; ++i) {
    selected += threshold_select(baseline_random(3, rng), theta);
  }
  for (Index m = 0; m < 3; ++m) {
    EXPECT_NEAR(selected[m] / slots, 1.0 - theta, 0.01);
  }

  Rng a(5), b(5);
  EXPECT_TRUE((baseline_random(4, a).array() == baseline_random(4, b).array()).all());
  EXPECT_EQ(baseline_random(0, a).size(), 0);
}

TEST(Baselines, FixedTopKByColumnMean) {
  Matrix importance(2, 3);
  importance << 0.9, 0.3, 0.8, 0.9, 0.1, 0.6;  // column means 0.9, 0.2, 0.7
  EXPECT_TRUE(baseline_fixed(importance, 2).isApprox(make_vector({1, 0, 1})));
  EXPECT_TRUE(baseline_fixed(importance, 3).isApprox(Vector::Ones(3)));
  EXPECT_TRUE(baseline_fixed(importance, 0).isZero());
  EXPECT_THROW(baseline_fixed(importance, 4), InvalidInput);

  Matrix tied = Matrix::Constant(2, 3, 0.5);
  EXPECT_TRUE(baseline_fixed(tied, 1).isApprox(make_vector({1, 0, 0})));
  EXPECT_TRUE(baseline_fixed(tied, 2).isApprox(make_vector({1, 1, 0})));
}

TEST(Evaluate, SingleSlotEpisodeEqualsOneUtility) {
  EnvConfig cfg = tiny_env(2, 2, 1);
  cfg.episode_length = 1;
  cfg.datasize_min = make_vector({1e5, 4e5});
  cfg.datasize_max = make_vector({1e5, 4e5});
  cfg.importance.resize(2, 2);
  cfg.importance << 1.0, 0.5, 1.0, 0.5;
  cfg.devices[0].frequency = 1e8;

  // The weights (0.9, 0.1) select exactly the first metric; the single-slot
  // cumulative reward is that one utility.
  class OptimalFixed final : public Policy {
   public:
    std::string name() const override { return "probe"; }
    Vector act(const EnvState&, const EnvConfig&, Rng&) override {
      Vector beta(2);
      beta << 0.9, 0.1;
      return beta;
    }
  };
  OptimalFixed policy;
  const EvalResult result = evaluate_policy(policy, cfg, 1, EvalMode::Static, 99);
  ASSERT_EQ(result.rows.size(), 1u);
  EXPECT_NEAR(result.cumulative_reward, 0.8443771909999159, 1e-9);
  EXPECT_EQ(result.rows[0].alpha_mask, 1u);
}

TEST(Evaluate, SharedSeedsGiveIdenticalTraces) {
  const EnvConfig cfg = tiny_env();
  ClassicalPolicy classical;
  FixedPolicy fixed(2);
  const EvalResult a = evaluate_policy(classical, cfg, 3, EvalMode::Dynamic, 1717);
  const EvalResult b = evaluate_policy(fixed, cfg, 3, EvalMode::Dynamic, 1717);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    EXPECT_EQ(a.rows[i].activity, b.rows[i].activity);
    EXPECT_EQ(a.rows[i].episode, b.rows[i].episode);
    EXPECT_EQ(a.rows[i].slot, b.rows[i].slot);
  }
}

TEST(Evaluate, StaticModeFreezesActivity) {
  const EnvConfig cfg = tiny_env();
  ClassicalPolicy policy;
  const EvalResult result = evaluate_policy(policy, cfg, 4, EvalMode::Static, 2);
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i].episode == result.rows[i - 1].episode) {
      EXPECT_EQ(result.rows[i].activity, result.rows[i - 1].activity);
    }
  }
}

TEST(Evaluate, CumulativeMatchesRowSum) {
  const EnvConfig cfg = tiny_env();
  RandomPolicy policy;
  const EvalResult result = evaluate_policy(policy, cfg, 2, EvalMode::Dynamic, 3);
  double sum = 0.0;
  for (const EvalRow& row : result.rows) sum += row.reward;
  EXPECT_NEAR(result.cumulative_reward, sum, 1e-12);
}

TEST(Train, ZeroEpisodesGiveEmptyHistory) {
  const EnvConfig cfg = tiny_env();
  const TrainResult result = train_ddpg(cfg, AgentConfig{}, 0, 1);
  EXPECT_TRUE(result.history.episode_reward.empty());
  EXPECT_TRUE(result.history.critic_loss.empty());
}

TEST(Train, DeterministicHistories) {
  EnvConfig cfg = tiny_env();
  AgentConfig agent;
  agent.warmup = 20;
  agent.batch_size = 8;
  const TrainResult a = train_ddpg(cfg, agent, 5, 77);
  const TrainResult b = train_ddpg(cfg, agent, 5, 77);
  ASSERT_EQ(a.history.episode_reward.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(a.history.episode_reward[i], b.history.episode_reward[i]);
  }
  const Vector probe = encode_state(EnvState{0, cfg.devices[0].frequency, 0}, cfg);
  Rng rng(0);
  EXPECT_TRUE((actor_act(a.agent, probe, 0.0, rng).array() ==
               actor_act(b.agent, probe, 0.0, rng).array())
                  .all());
}

TEST(Train, ActionsStayInUnitBoxDuringTraining) {
  EnvConfig cfg = tiny_env();
  cfg.episode_length = 5;
  AgentConfig agent;
  agent.warmup = 10;
  agent.batch_size = 4;
  agent.noise_initial = 0.5;
  const TrainResult result = train_ddpg(cfg, agent, 4, 13);
  (void)result;
  // Covered structurally: actor_act clamps; environment rejects widths only.
  // Replay here is small enough to inspect every stored action.
  ReplayBuffer buffer(64);
  Rng noise(1);
  MonitoringEnv env(cfg, 0);
  EnvState s = env.reset(5);
  for (int slot = 0; slot < 5; ++slot) {
    const Vector a = actor_act(result.agent, encode_state(s, cfg), 0.5, noise);
    EXPECT_TRUE((a.array() >= 0.0).all());
    EXPECT_TRUE((a.array() <= 1.0).all());
    s = env.step(a).next_state;
  }
}

}  // namespace
}  // namespace daahm
