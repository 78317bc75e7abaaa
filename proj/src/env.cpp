#include <daahm/env.hpp>

#include <cmath>
#include <sstream>
#include <utility>

namespace daahm {

namespace {

Index categorical(const Eigen::Ref<const Vector>& probabilities, Rng& rng) {
  const double u = rng.uniform();
  double cumulative = 0.0;
  for (Index i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (u < cumulative) return i;
  }
  return probabilities.size() - 1;  // cumulative fell short of 1 by rounding
}

constexpr double kRowSumTolerance = 1e-9;

}  // namespace

ActivityDynamics ActivityDynamics::iid_uniform(Index num_activities) {
  ActivityDynamics d;
  d.kind = Kind::Iid;
  d.probabilities = Vector::Constant(num_activities, 1.0 / static_cast<double>(num_activities));
  return d;
}

ActivityDynamics ActivityDynamics::iid(Vector probabilities) {
  ActivityDynamics d;
  d.kind = Kind::Iid;
  d.probabilities = std::move(probabilities);
  return d;
}

ActivityDynamics ActivityDynamics::markov(Matrix transition) {
  ActivityDynamics d;
  d.kind = Kind::Markov;
  d.transition = std::move(transition);
  return d;
}

double EnvConfig::max_frequency() const {
  double fmax = 0.0;
  for (const auto& device : devices) fmax = std::max(fmax, device.frequency);
  return fmax;
}

void EnvConfig::validate() const {
  if (num_activities < 1) throw InvalidInput("num_activities must be at least 1");
  if (num_metrics < 1) throw InvalidInput("num_metrics must be at least 1");
  if (num_devices < 1) throw InvalidInput("num_devices must be at least 1");
  if (episode_length < 1) throw InvalidInput("episode_length must be at least 1");
  if (importance.rows() != num_activities || importance.cols() != num_metrics) {
    throw InvalidInput("importance must be num_activities x num_metrics");
  }
  validate_importance(importance);
  if (static_cast<Index>(devices.size()) != num_devices) {
    throw InvalidInput("devices list length must equal num_devices");
  }
  for (Index n = 0; n < num_devices; ++n) validate_device(devices[n], n);
  if (datasize_min.size() != num_metrics || datasize_max.size() != num_metrics ||
      cycles.size() != num_metrics) {
    throw InvalidInput("task vectors (datasize_min, datasize_max, cycles) must have num_metrics entries");
  }
  for (Index m = 0; m < num_metrics; ++m) {
    if (!(datasize_min[m] >= 0.0)) throw InvalidInput("datasize_min entries must be nonnegative");
    if (!(datasize_max[m] >= datasize_min[m])) {
      std::ostringstream msg;
      msg << "datasize_max[" << m << "] is below datasize_min[" << m << "]";
      throw InvalidInput(msg.str());
    }
    if (!(cycles[m] >= 0.0)) throw InvalidInput("cycles entries must be nonnegative");
  }
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidInput("theta must lie in (0, 1)");
  if (!(lambda >= 0.0)) throw InvalidInput("lambda must be nonnegative");

  if (dynamics.kind == ActivityDynamics::Kind::Iid) {
    if (dynamics.probabilities.size() != num_activities) {
      throw InvalidInput("dynamics.probabilities must have num_activities entries");
    }
    if ((dynamics.probabilities.array() < 0.0).any()) {
      throw InvalidInput("dynamics.probabilities must be nonnegative");
    }
    if (std::abs(dynamics.probabilities.sum() - 1.0) > kRowSumTolerance) {
      throw InvalidInput("dynamics.probabilities must sum to 1");
    }
  } else {
    if (dynamics.transition.rows() != num_activities ||
        dynamics.transition.cols() != num_activities) {
      throw InvalidInput("dynamics.transition must be num_activities x num_activities");
    }
    if ((dynamics.transition.array() < 0.0).any()) {
      throw InvalidInput("dynamics.transition entries must be nonnegative");
    }
    for (Index g = 0; g < num_activities; ++g) {
      if (std::abs(dynamics.transition.row(g).sum() - 1.0) > kRowSumTolerance) {
        std::ostringstream msg;
        msg << "dynamics.transition row " << g << " must sum to 1";
        throw InvalidInput(msg.str());
      }
    }
  }
}

ActivityId trace_next(ActivityId current, const ActivityDynamics& dynamics, Rng& rng) {
  if (dynamics.kind == ActivityDynamics::Kind::Iid) {
    if (current < 0 || current >= dynamics.probabilities.size()) {
      throw InvalidInput("trace_next: activity out of range");
    }
    return categorical(dynamics.probabilities, rng);
  }
  if (current < 0 || current >= dynamics.transition.rows()) {
    throw InvalidInput("trace_next: activity out of range");
  }
  return categorical(dynamics.transition.row(current).transpose(), rng);
}

TaskSpec sample_tasks(const EnvConfig& config, Rng& rng) {
  TaskSpec task;
  task.datasize.resize(config.num_metrics);
  for (Index m = 0; m < config.num_metrics; ++m) {
    task.datasize[m] = rng.uniform(config.datasize_min[m], config.datasize_max[m]);
  }
  task.cycles = config.cycles;
  return task;
}

MonitoringEnv::MonitoringEnv(EnvConfig config, Index device, bool freeze_activity)
    : config_(std::move(config)), device_(device), freeze_activity_(freeze_activity) {
  config_.validate();
  if (device < 0 || device >= config_.num_devices) {
    throw InvalidInput("MonitoringEnv: device index out of range");
  }
}

EnvState MonitoringEnv::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  if (config_.dynamics.kind == ActivityDynamics::Kind::Iid) {
    state_.activity = categorical(config_.dynamics.probabilities, rng_);
  } else {
    // The chain needs a start; draw it uniformly.
    state_.activity = rng_.uniform_index(config_.num_activities);
  }
  state_.frequency = config_.devices[device_].frequency;
  state_.slot = 0;
  started_ = true;
  return state_;
}

StepOutcome MonitoringEnv::step(const Eigen::Ref<const Vector>& beta) {
  if (!started_) throw InvalidInput("MonitoringEnv: step before reset");
  if (state_.slot >= config_.episode_length) {
    throw EpisodeExhausted("MonitoringEnv: episode is over, call reset");
  }
  if (beta.size() != config_.num_metrics) {
    throw InvalidInput("MonitoringEnv: beta must have num_metrics entries");
  }

  StepOutcome out;
  out.info.alpha = threshold_select(beta, config_.theta);
  out.info.task = sample_tasks(config_, rng_);
  const SelectionOutcome scored =
      evaluate_selection(config_.importance.row(state_.activity), out.info.alpha, out.info.task,
                         config_.devices[device_], config_.lambda);
  out.info.relevance = scored.relevance;
  out.info.delay = scored.delay;
  out.info.energy = scored.energy;
  out.info.cost = scored.cost;
  out.reward = scored.utility;

  out.next_state = state_;
  out.next_state.slot = state_.slot + 1;
  if (!freeze_activity_) {
    out.next_state.activity = trace_next(state_.activity, config_.dynamics, rng_);
  }
  out.done = out.next_state.slot == config_.episode_length;

  state_ = out.next_state;
  return out;
}

OracleResult brute_force_best(const EnvState& state, const TaskSpec& task,
                              const EnvConfig& config, Index device) {
  constexpr Index kMaxMetrics = 20;
  if (config.num_metrics > kMaxMetrics) {
    throw CapacityError("brute_force_best: enumeration is limited to 20 metrics");
  }
  if (device < 0 || device >= config.num_devices) {
    throw InvalidInput("brute_force_best: device index out of range");
  }

  const auto importance_row = config.importance.row(state.activity);
  OracleResult best;
  bool have_best = false;
  const std::uint32_t count = 1u << config.num_metrics;
  for (std::uint32_t mask = 0; mask < count; ++mask) {
    const Vector alpha = mask_to_selection(mask, config.num_metrics);
    const SelectionOutcome outcome =
        evaluate_selection(importance_row, alpha, task, config.devices[device], config.lambda);
    if (!have_best || outcome.utility > best.utility) {
      best.alpha = alpha;
      best.mask = mask;
      best.utility = outcome.utility;
      best.outcome = outcome;
      have_best = true;
    }
  }
  return best;
}

}  // namespace daahm
