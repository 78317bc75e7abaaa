#include <daahm/harness.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include <daahm/checkpoint.hpp>

namespace daahm {

namespace {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::filesystem::path ensure_out_dir(const ExperimentConfig& config) {
  std::filesystem::path dir(config.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory: " + dir.string());
  return dir;
}

void write_history_csv(const TrainHistory& history, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write training history: " + path.string());
  out << "episode,mean_reward,critic_loss,actor_objective\n";
  for (std::size_t e = 0; e < history.episode_reward.size(); ++e) {
    out << e << ',' << format_double(history.episode_reward[e]) << ','
        << format_double(history.critic_loss[e]) << ','
        << format_double(history.actor_objective[e]) << "\n";
  }
}

std::unique_ptr<Policy> make_policy(const std::string& strategy, const ExperimentConfig& config,
                                    const DdpgAgent* agent) {
  if (strategy == "classical") return std::make_unique<ClassicalPolicy>();
  if (strategy == "random") return std::make_unique<RandomPolicy>();
  if (strategy == "fixed") return std::make_unique<FixedPolicy>(config.fixed_k);
  if (strategy == "daahm") {
    if (!agent) throw InvalidInput("daahm strategy needs a trained checkpoint");
    return std::make_unique<DdpgPolicy>(*agent);
  }
  throw InvalidInput("unknown strategy '" + strategy +
                     "' (expected daahm, classical, random or fixed)");
}

std::vector<ResultRow> to_result_rows(const std::string& strategy, const EvalResult& result) {
  std::vector<ResultRow> rows;
  rows.reserve(result.rows.size());
  for (const EvalRow& r : result.rows) {
    rows.push_back({strategy, r.episode, r.slot, r.activity, r.reward, r.relevance, r.cost,
                    r.alpha_mask});
  }
  return rows;
}

}  // namespace

TrainOutput run_train(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path dir = ensure_out_dir(config);

  TrainResult trained = train_ddpg(config.env, config.agent, config.episodes, config.seed);

  TrainOutput out;
  out.history = std::move(trained.history);
  out.checkpoint_path = dir / kCheckpointFile;
  out.history_csv = dir / kTrainingCsv;
  save_checkpoint(trained.agent, out.checkpoint_path);
  write_history_csv(out.history, out.history_csv);
  return out;
}

EvaluateOutput run_evaluate(const ExperimentConfig& config, const std::string& strategy) {
  config.validate();
  const std::filesystem::path dir = ensure_out_dir(config);

  std::optional<DdpgAgent> agent;
  if (strategy == "daahm") {
    agent = load_checkpoint(dir / kCheckpointFile);
    if (agent->num_activities != config.env.num_activities ||
        agent->num_metrics != config.env.num_metrics) {
      throw InvalidInput("checkpoint dimensions do not match the configuration");
    }
  }
  const std::unique_ptr<Policy> policy =
      make_policy(strategy, config, agent ? &*agent : nullptr);

  EvaluateOutput out;
  out.result = evaluate_policy(*policy, config.env, config.eval_episodes, config.mode, config.seed);
  out.csv_path = dir / ("evaluate_" + strategy + ".csv");
  emit_results(to_result_rows(strategy, out.result), out.csv_path);
  return out;
}

CompareOutput run_compare(const ExperimentConfig& config) {
  config.validate();
  const std::filesystem::path dir = ensure_out_dir(config);

  TrainResult trained = train_ddpg(config.env, config.agent, config.episodes, config.seed);

  CompareOutput out;
  out.history = std::move(trained.history);
  out.checkpoint_path = dir / kCheckpointFile;
  save_checkpoint(trained.agent, out.checkpoint_path);
  write_history_csv(out.history, dir / kTrainingCsv);

  const std::vector<std::string> strategies = {"daahm", "classical", "random", "fixed"};
  std::vector<ResultRow> all_rows;
  for (const std::string& strategy : strategies) {
    const std::unique_ptr<Policy> policy = make_policy(strategy, config, &trained.agent);
    // Every strategy evaluates under the same seed, hence identical activity
    // traces and task draws slot for slot.
    const EvalResult result =
        evaluate_policy(*policy, config.env, config.eval_episodes, config.mode, config.seed);
    out.summaries.push_back({strategy, result.cumulative_reward, result.mean_slot_reward()});
    std::vector<ResultRow> rows = to_result_rows(strategy, result);
    all_rows.insert(all_rows.end(), rows.begin(), rows.end());
  }

  out.summary_csv = dir / kCompareSummaryCsv;
  out.timeseries_csv = dir / kCompareTimeseriesCsv;
  std::ofstream summary(out.summary_csv, std::ios::binary);
  if (!summary) throw IoError("cannot write summary: " + out.summary_csv.string());
  summary << "strategy,cumulative_reward,mean_slot_reward\n";
  for (const StrategySummary& s : out.summaries) {
    summary << s.strategy << ',' << format_double(s.cumulative_reward) << ','
            << format_double(s.mean_slot_reward) << "\n";
  }
  emit_results(all_rows, out.timeseries_csv);
  return out;
}

OracleOutput run_oracle(const ExperimentConfig& config, Index samples) {
  config.validate();
  if (samples < 1) throw InvalidInput("oracle needs at least one sample");
  const std::filesystem::path dir = ensure_out_dir(config);

  std::optional<DdpgAgent> agent;
  const std::filesystem::path checkpoint = dir / kCheckpointFile;
  if (std::filesystem::exists(checkpoint)) {
    agent = load_checkpoint(checkpoint);
  }

  Rng rng(derive_seed(config.seed, seed_stream::kOracle));
  Rng policy_rng(derive_seed(config.seed, seed_stream::kOracle, 1));

  OracleOutput out;
  out.samples = samples;
  out.has_daahm = agent.has_value();
  out.csv_path = dir / "oracle.csv";

  std::ofstream csv(out.csv_path, std::ios::binary);
  if (!csv) throw IoError("cannot write oracle report: " + out.csv_path.string());
  csv << "sample,activity,device,oracle_mask,oracle_utility,daahm,classical,random,fixed\n";

  const Vector classical_beta = baseline_classical(config.env.num_metrics);
  const Vector fixed_beta = baseline_fixed(config.env.importance, config.fixed_k);

  double oracle_sum = 0.0;
  std::map<std::string, double> policy_sum = {
      {"daahm", 0.0}, {"classical", 0.0}, {"random", 0.0}, {"fixed", 0.0}};
  Index daahm_within = 0;

  for (Index i = 0; i < samples; ++i) {
    const ActivityId activity = rng.uniform_index(config.env.num_activities);
    const Index device = rng.uniform_index(config.env.num_devices);
    const TaskSpec task = sample_tasks(config.env, rng);
    EnvState state{activity, config.env.devices[device].frequency, 0};

    const OracleResult best = brute_force_best(state, task, config.env, device);
    oracle_sum += best.utility;

    auto utility_of = [&](const Vector& beta) {
      const Vector alpha = threshold_select(beta, config.env.theta);
      return evaluate_selection(config.env.importance.row(activity), alpha, task,
                                config.env.devices[device], config.env.lambda)
          .utility;
    };

    const double classical_u = utility_of(classical_beta);
    const double random_u = utility_of(baseline_random(config.env.num_metrics, policy_rng));
    const double fixed_u = utility_of(fixed_beta);
    policy_sum["classical"] += classical_u;
    policy_sum["random"] += random_u;
    policy_sum["fixed"] += fixed_u;

    double daahm_u = std::numeric_limits<double>::quiet_NaN();
    if (agent) {
      daahm_u = utility_of(actor_act(*agent, encode_state(state, config.env), 0.0, policy_rng));
      policy_sum["daahm"] += daahm_u;
      if (daahm_u >= 0.9 * best.utility) ++daahm_within;
    }

    csv << i << ',' << activity << ',' << device << ',' << best.mask << ','
        << format_double(best.utility) << ',' << format_double(daahm_u) << ','
        << format_double(classical_u) << ',' << format_double(random_u) << ','
        << format_double(fixed_u) << "\n";
  }

  out.mean_oracle_utility = oracle_sum / static_cast<double>(samples);
  for (auto& [name, sum] : policy_sum) {
    out.mean_policy_utility[name] =
        (name == "daahm" && !agent) ? std::numeric_limits<double>::quiet_NaN()
                                    : sum / static_cast<double>(samples);
  }
  out.daahm_within_fraction =
      agent ? static_cast<double>(daahm_within) / static_cast<double>(samples) : 0.0;
  return out;
}

double run_gradcheck(int networks, std::uint64_t seed) {
  return random_network_gradcheck(networks, seed);
}

namespace {

struct CliOptions {
  std::string config_path;
  std::string preset;
  std::string mode;
  std::string out_dir;
  std::string strategy = "daahm";
  std::int64_t episodes = -1;
  std::int64_t seed = -1;
};

void add_common_options(CLI::App* cmd, CliOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON configuration file");
  cmd->add_option("--preset", opts.preset, "Configuration preset")
      ->check(CLI::IsMember({"desk", "paper"}));
  cmd->add_option("--seed", opts.seed, "Experiment seed");
  cmd->add_option("--mode", opts.mode, "Evaluation mode")
      ->check(CLI::IsMember({"static", "dynamic"}));
  cmd->add_option("--out", opts.out_dir, "Output directory");
  cmd->add_option("--episodes", opts.episodes, "Training episode count");
}

ExperimentConfig resolve_config(const CliOptions& opts) {
  ExperimentConfig cfg = opts.preset == "desk" ? desk_preset() : paper_preset();
  if (!opts.config_path.empty()) cfg = load_config(opts.config_path, cfg);
  if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
  if (!opts.mode.empty()) cfg.mode = opts.mode == "static" ? EvalMode::Static : EvalMode::Dynamic;
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.episodes >= 0) cfg.episodes = opts.episodes;
  if (const char* env_seed = std::getenv("DAAHM_SEED")) {
    cfg.seed = std::strtoull(env_seed, nullptr, 10);
  }
  cfg.env.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

}  // namespace

int run_command(const std::vector<std::string>& args) {
  CLI::App app{"Activity-aware health-metric monitoring: simulator, learner and baselines"};
  app.require_subcommand(1);

  CliOptions opts;
  CLI::App* train_cmd = app.add_subcommand("train", "Train the learner and write a checkpoint");
  CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate one strategy");
  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Train, then evaluate all strategies on shared traces");
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "Exhaustive-search utilities next to policy utilities");
  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "Finite-difference check of backpropagation");
  for (CLI::App* cmd : {train_cmd, evaluate_cmd, compare_cmd, oracle_cmd}) {
    add_common_options(cmd, opts);
  }
  evaluate_cmd->add_option("--strategy", opts.strategy,
                           "One of daahm, classical, random, fixed");
  gradcheck_cmd->add_option("--seed", opts.seed, "Generator seed");

  // CLI11 wants argv in reverse order without the program name.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (gradcheck_cmd->parsed()) {
      const std::uint64_t seed = opts.seed >= 0 ? static_cast<std::uint64_t>(opts.seed) : 1;
      const double worst = run_gradcheck(100, seed);
      std::cout << "gradcheck: max relative error " << format_double(worst)
                << " over 100 random networks\n";
      if (worst >= 1e-4) {
        std::cout << "gradcheck: FAIL (tolerance 1e-4)\n";
        return 1;
      }
      std::cout << "gradcheck: PASS (tolerance 1e-4)\n";
      return 0;
    }

    const ExperimentConfig cfg = resolve_config(opts);

    if (train_cmd->parsed()) {
      const TrainOutput out = run_train(cfg);
      const std::size_t n = out.history.episode_reward.size();
      std::cout << "trained " << n << " episodes; checkpoint: " << out.checkpoint_path.string()
                << "\n";
      if (n > 0) {
        const std::size_t tail = std::min<std::size_t>(100, n);
        double sum = 0.0;
        for (std::size_t i = n - tail; i < n; ++i) sum += out.history.episode_reward[i];
        std::cout << "mean reward over last " << tail << " episodes: "
                  << format_double(sum / static_cast<double>(tail)) << "\n";
      }
      return 0;
    }
    if (evaluate_cmd->parsed()) {
      const EvaluateOutput out = run_evaluate(cfg, opts.strategy);
      std::cout << opts.strategy << ": cumulative reward "
                << format_double(out.result.cumulative_reward) << " over "
                << out.result.rows.size() << " slots (mean "
                << format_double(out.result.mean_slot_reward()) << ")\n"
                << "rows: " << out.csv_path.string() << "\n";
      return 0;
    }
    if (compare_cmd->parsed()) {
      const CompareOutput out = run_compare(cfg);
      std::cout << "strategy    cumulative      mean/slot\n";
      for (const StrategySummary& s : out.summaries) {
        std::printf("%-10s  %-14.6f  %.6f\n", s.strategy.c_str(), s.cumulative_reward,
                    s.mean_slot_reward);
      }
      std::cout << "summary: " << out.summary_csv.string() << "\n"
                << "timeseries: " << out.timeseries_csv.string() << "\n";
      return 0;
    }
    if (oracle_cmd->parsed()) {
      const OracleOutput out = run_oracle(cfg);
      std::cout << "mean utility over " << out.samples << " sampled states\n";
      std::cout << "  oracle     " << format_double(out.mean_oracle_utility) << "\n";
      for (const auto& [name, mean] : out.mean_policy_utility) {
        std::cout << "  " << name << std::string(11 - std::min<std::size_t>(10, name.size()), ' ')
                  << format_double(mean) << "\n";
      }
      if (out.has_daahm) {
        std::cout << "daahm within 0.9x of oracle on "
                  << format_double(100.0 * out.daahm_within_fraction) << "% of states\n";
      } else {
        std::cout << "no checkpoint in " << cfg.out_dir << "; train first to score daahm\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace daahm
