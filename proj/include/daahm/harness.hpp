#pragma once

// Experiment orchestration behind the CLI: train, evaluate, compare, oracle
// and gradcheck pipelines plus the argument-parsing entry point.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <daahm/config.hpp>
#include <daahm/results.hpp>

namespace daahm {

inline constexpr const char* kCheckpointFile = "ddpg_checkpoint.bin";
inline constexpr const char* kTrainingCsv = "training.csv";
inline constexpr const char* kCompareSummaryCsv = "compare_summary.csv";
inline constexpr const char* kCompareTimeseriesCsv = "compare_timeseries.csv";

struct TrainOutput {
  TrainHistory history;
  std::filesystem::path checkpoint_path;
  std::filesystem::path history_csv;
};

// Trains the agent, then writes the checkpoint and the per-episode history.
TrainOutput run_train(const ExperimentConfig& config);

struct EvaluateOutput {
  EvalResult result;
  std::filesystem::path csv_path;
};

// Evaluates one strategy; "daahm" loads the checkpoint from the output dir.
EvaluateOutput run_evaluate(const ExperimentConfig& config, const std::string& strategy);

struct StrategySummary {
  std::string strategy;
  double cumulative_reward = 0.0;
  double mean_slot_reward = 0.0;
};

struct CompareOutput {
  std::vector<StrategySummary> summaries;  // daahm, classical, random, fixed
  TrainHistory history;
  std::filesystem::path summary_csv;
  std::filesystem::path timeseries_csv;
  std::filesystem::path checkpoint_path;
};

// Trains the agent, then evaluates all four strategies against identical
// environment draws and writes the summary and time-series CSVs.
CompareOutput run_compare(const ExperimentConfig& config);

struct OracleOutput {
  Index samples = 0;
  double mean_oracle_utility = 0.0;
  std::map<std::string, double> mean_policy_utility;
  // Fraction of sampled states where the trained policy reaches at least
  // 90% of the exhaustive-search utility; only meaningful with a checkpoint.
  double daahm_within_fraction = 0.0;
  bool has_daahm = false;
  std::filesystem::path csv_path;
};

OracleOutput run_oracle(const ExperimentConfig& config, Index samples = 1000);

// Worst relative backpropagation error over `networks` random networks.
double run_gradcheck(int networks, std::uint64_t seed);

// CLI front end; returns the process exit status.
int run_command(const std::vector<std::string>& args);

}  // namespace daahm
