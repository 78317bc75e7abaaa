#pragma once

// Episode-based simulation environment. One instance simulates one wearable
// device: activities evolve along a configurable trace, a computation task
// arrives each slot, and a continuous weight vector is thresholded into the
// monitored-metric selection whose utility is the reward.

#include <cstdint>
#include <vector>

#include <daahm/monitoring.hpp>
#include <daahm/rng.hpp>
#include <daahm/types.hpp>

namespace daahm {

// Activity process over time slots: either i.i.d. draws from a fixed
// distribution or a first-order Markov chain.
struct ActivityDynamics {
  enum class Kind { Iid, Markov };

  Kind kind = Kind::Iid;
  Vector probabilities;  // Iid: length-G distribution
  Matrix transition;     // Markov: row-stochastic G x G

  static ActivityDynamics iid_uniform(Index num_activities);
  static ActivityDynamics iid(Vector probabilities);
  static ActivityDynamics markov(Matrix transition);
};

struct EnvConfig {
  Index num_activities = 0;
  Index num_metrics = 0;
  Index num_devices = 0;
  Index episode_length = 200;

  Matrix importance;  // num_activities x num_metrics, entries in [0, 1]
  std::vector<DeviceSpec> devices;

  // Per-metric task model: datasizes drawn uniformly per slot, cycles fixed.
  Vector datasize_min;
  Vector datasize_max;
  Vector cycles;

  double theta = 0.5;   // selection threshold
  double lambda = 1.0;  // relevance/cost tradeoff

  ActivityDynamics dynamics;
  std::uint64_t seed = 0;

  double max_frequency() const;
  // Throws InvalidInput naming the offending field.
  void validate() const;
};

struct EnvState {
  ActivityId activity = 0;
  double frequency = 0.0;
  Index slot = 0;
};

struct StepInfo {
  double relevance = 0.0;
  double delay = 0.0;
  double energy = 0.0;
  double cost = 0.0;
  Vector alpha;
  TaskSpec task;
};

struct StepOutcome {
  EnvState next_state;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

// Next activity along the configured process.
ActivityId trace_next(ActivityId current, const ActivityDynamics& dynamics, Rng& rng);

// Per-slot task draw: datasize_m ~ U[datasize_min_m, datasize_max_m].
TaskSpec sample_tasks(const EnvConfig& config, Rng& rng);

class MonitoringEnv {
 public:
  // freeze_activity keeps the reset-time activity for the whole episode
  // (static evaluation); otherwise the trace advances every slot.
  MonitoringEnv(EnvConfig config, Index device, bool freeze_activity = false);

  EnvState reset(std::uint64_t seed);

  // Thresholds beta, samples the slot's task, scores the selection and
  // advances the trace. Throws EpisodeExhausted past the episode end.
  StepOutcome step(const Eigen::Ref<const Vector>& beta);

  const EnvState& state() const { return state_; }
  const EnvConfig& config() const { return config_; }
  Index device() const { return device_; }

 private:
  EnvConfig config_;
  Index device_ = 0;
  bool freeze_activity_ = false;
  bool started_ = false;
  EnvState state_;
  Rng rng_{0};
};

struct OracleResult {
  Vector alpha;
  std::uint32_t mask = 0;
  double utility = 0.0;
  SelectionOutcome outcome;
};

// Exhaustively scores all 2^M selections for the given state and task and
// returns the best; ties resolve to the lowest bitmask. Refuses M > 20.
OracleResult brute_force_best(const EnvState& state, const TaskSpec& task,
                              const EnvConfig& config, Index device);

}  // namespace daahm
