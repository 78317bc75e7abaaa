#pragma once

// Experiment configuration: JSON ingestion with validated defaults, the two
// bundled presets, and the importance-matrix CSV loader.

#include <cstdint>
#include <filesystem>
#include <string>

#include <daahm/baselines.hpp>
#include <daahm/ddpg.hpp>
#include <daahm/env.hpp>

namespace daahm {

struct ExperimentConfig {
  EnvConfig env;
  AgentConfig agent;
  Index episodes = 3000;       // training episodes
  Index eval_episodes = 10;    // evaluation episodes per device
  Index fixed_k = 5;           // subset size of the fixed baseline
  EvalMode mode = EvalMode::Dynamic;
  std::string out_dir = "out";
  std::uint64_t seed = 1;

  void validate() const;
};

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// Deterministic structured importance matrix used when a config does not
// supply one: clustered activity profiles with mild per-activity variation.
Matrix default_importance(Index num_activities, Index num_metrics);

// Defaults for arbitrary problem dimensions.
ExperimentConfig make_default_config(Index num_activities, Index num_metrics, Index num_devices);

// Full-scale setting: 30 activities, 10 metrics.
ExperimentConfig paper_preset();

// Small setting sized so the whole compare pipeline runs in minutes on one
// core: 6 activities, 6 metrics, 3 devices.
ExperimentConfig desk_preset();

// Parses the JSON configuration, overlaying the file's keys onto `base`.
// An empty file yields `base` unchanged. Unknown dimensions regenerate the
// dimension-dependent defaults before the overlay. Errors name the key.
ExperimentConfig load_config(const std::filesystem::path& path,
                             const ExperimentConfig& base = paper_preset());

void save_config(const ExperimentConfig& config, const std::filesystem::path& path);

// CSV with one header row of metric names and one row per activity; entries
// must be reals in [0, 1].
Matrix load_importance(const std::filesystem::path& path);

}  // namespace daahm
