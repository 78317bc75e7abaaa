#include <daahm/config.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace daahm {

using nlohmann::json;

namespace {

bool matrix_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

bool vector_equal(const Vector& a, const Vector& b) {
  return a.size() == b.size() && (a.array() == b.array()).all();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

bool is_blank(const std::string& text) {
  return text.find_first_not_of(" \t\r\n") == std::string::npos;
}

double require_number(const json& j, const std::string& key) {
  if (!j.is_number()) throw InvalidInput("config key '" + key + "' must be a number");
  return j.get<double>();
}

Vector parse_vector(const json& j, const std::string& key) {
  if (!j.is_array()) throw InvalidInput("config key '" + key + "' must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Index>(i)] = require_number(j[i], key);
  }
  return v;
}

Matrix parse_matrix(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) throw InvalidInput("config key '" + key + "' must be a 2D array");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = static_cast<Index>(j[0].size());
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    if (!j[r].is_array() || static_cast<Index>(j[r].size()) != cols) {
      std::ostringstream msg;
      msg << "config key '" << key << "' row " << r << " has ragged length";
      throw InvalidInput(msg.str());
    }
    for (Index c = 0; c < cols; ++c) m(r, c) = require_number(j[r][c], key);
  }
  return m;
}

json vector_to_json(const Vector& v) {
  json j = json::array();
  for (Index i = 0; i < v.size(); ++i) j.push_back(v[i]);
  return j;
}

json matrix_to_json(const Matrix& m) {
  json j = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    j.push_back(row);
  }
  return j;
}

DeviceSpec parse_device(const json& j, Index index) {
  DeviceSpec device;
  std::ostringstream key;
  key << "env.devices[" << index << "]";
  if (!j.is_object()) throw InvalidInput("config key '" + key.str() + "' must be an object");
  if (j.contains("frequency")) device.frequency = require_number(j["frequency"], key.str());
  if (j.contains("switched_capacitance")) {
    device.switched_capacitance = require_number(j["switched_capacitance"], key.str());
  }
  if (j.contains("frequency_exponent")) {
    device.frequency_exponent = require_number(j["frequency_exponent"], key.str());
  }
  if (j.contains("energy_delay_balance")) {
    device.energy_delay_balance = require_number(j["energy_delay_balance"], key.str());
  }
  return device;
}

json device_to_json(const DeviceSpec& d) {
  return json{{"frequency", d.frequency},
              {"switched_capacitance", d.switched_capacitance},
              {"frequency_exponent", d.frequency_exponent},
              {"energy_delay_balance", d.energy_delay_balance}};
}

}  // namespace

void ExperimentConfig::validate() const {
  env.validate();
  agent.validate();
  if (episodes < 0) throw InvalidInput("episodes must be nonnegative");
  if (eval_episodes < 1) throw InvalidInput("eval_episodes must be at least 1");
  if (fixed_k < 0 || fixed_k > env.num_metrics) {
    throw InvalidInput("fixed_k must lie in [0, num_metrics]");
  }
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  auto device_equal = [](const DeviceSpec& x, const DeviceSpec& y) {
    return x.frequency == y.frequency && x.switched_capacitance == y.switched_capacitance &&
           x.frequency_exponent == y.frequency_exponent &&
           x.energy_delay_balance == y.energy_delay_balance;
  };
  if (a.env.num_activities != b.env.num_activities || a.env.num_metrics != b.env.num_metrics ||
      a.env.num_devices != b.env.num_devices || a.env.episode_length != b.env.episode_length ||
      !matrix_equal(a.env.importance, b.env.importance) ||
      a.env.devices.size() != b.env.devices.size() ||
      !vector_equal(a.env.datasize_min, b.env.datasize_min) ||
      !vector_equal(a.env.datasize_max, b.env.datasize_max) ||
      !vector_equal(a.env.cycles, b.env.cycles) || a.env.theta != b.env.theta ||
      a.env.lambda != b.env.lambda || a.env.seed != b.env.seed ||
      a.env.dynamics.kind != b.env.dynamics.kind) {
    return false;
  }
  for (std::size_t i = 0; i < a.env.devices.size(); ++i) {
    if (!device_equal(a.env.devices[i], b.env.devices[i])) return false;
  }
  if (a.env.dynamics.kind == ActivityDynamics::Kind::Iid) {
    if (!vector_equal(a.env.dynamics.probabilities, b.env.dynamics.probabilities)) return false;
  } else {
    if (!matrix_equal(a.env.dynamics.transition, b.env.dynamics.transition)) return false;
  }
  const AgentConfig& x = a.agent;
  const AgentConfig& y = b.agent;
  return x.hidden_size == y.hidden_size && x.gamma == y.gamma && x.tau == y.tau &&
         x.actor_lr == y.actor_lr && x.critic_lr == y.critic_lr &&
         x.replay_capacity == y.replay_capacity && x.batch_size == y.batch_size &&
         x.warmup == y.warmup && x.noise_initial == y.noise_initial &&
         x.noise_final == y.noise_final && x.noise_decay_fraction == y.noise_decay_fraction &&
         a.episodes == b.episodes && a.eval_episodes == b.eval_episodes &&
         a.fixed_k == b.fixed_k && a.mode == b.mode && a.out_dir == b.out_dir && a.seed == b.seed;
}

Matrix default_importance(Index num_activities, Index num_metrics) {
  Matrix importance(num_activities, num_metrics);
  for (Index g = 0; g < num_activities; ++g) {
    // Activities cluster around a handful of metric profiles.
    const double peak =
        static_cast<double>((g * 7) % num_metrics);
    for (Index m = 0; m < num_metrics; ++m) {
      double distance = std::abs(static_cast<double>(m) - peak);
      distance = std::min(distance, static_cast<double>(num_metrics) - distance);
      const double bump = std::exp(-0.5 * (distance / 1.5) * (distance / 1.5));
      const double ripple =
          0.05 * std::sin(3.7 * static_cast<double>(g + 1) + 1.3 * static_cast<double>(m + 1));
      importance(g, m) = std::clamp(0.1 + 0.85 * bump + ripple, 0.05, 1.0);
    }
  }
  return importance;
}

ExperimentConfig make_default_config(Index num_activities, Index num_metrics, Index num_devices) {
  ExperimentConfig cfg;
  cfg.env.num_activities = num_activities;
  cfg.env.num_metrics = num_metrics;
  cfg.env.num_devices = num_devices;
  cfg.env.episode_length = 200;
  cfg.env.importance = default_importance(num_activities, num_metrics);
  cfg.env.devices.resize(num_devices);
  for (Index n = 0; n < num_devices; ++n) {
    DeviceSpec device;
    device.frequency = num_devices == 1
                           ? 1e8
                           : 8e7 + 4e7 * static_cast<double>(n) / static_cast<double>(num_devices - 1);
    cfg.env.devices[n] = device;
  }
  cfg.env.datasize_min = Vector::Constant(num_metrics, 1e5);
  cfg.env.datasize_max = Vector::Constant(num_metrics, 3e5);
  cfg.env.cycles = Vector::Constant(num_metrics, 100.0);
  cfg.env.theta = 0.5;
  cfg.env.lambda = 1.0;
  if (num_activities == 1) {
    cfg.env.dynamics = ActivityDynamics::markov(Matrix::Ones(1, 1));
  } else {
    const double off = 0.5 / static_cast<double>(num_activities - 1);
    Matrix transition = Matrix::Constant(num_activities, num_activities, off);
    transition.diagonal().setConstant(0.5);
    cfg.env.dynamics = ActivityDynamics::markov(std::move(transition));
  }
  cfg.fixed_k = std::max<Index>(1, num_metrics / 2);
  return cfg;
}

ExperimentConfig paper_preset() { return make_default_config(30, 10, 5); }

ExperimentConfig desk_preset() {
  ExperimentConfig cfg = make_default_config(6, 6, 3);
  // Activities: running, cycling, strength, yoga, walking, resting.
  // Metrics: heart rate, breathing rate, SpO2, cadence, HRV, skin temp.
  cfg.env.importance.resize(6, 6);
  cfg.env.importance << 1.00, 0.80, 0.40, 0.90, 0.10, 0.30,  // running
      0.90, 0.70, 0.40, 1.00, 0.10, 0.20,                     // cycling
      0.80, 0.60, 0.30, 0.10, 0.20, 0.40,                     // strength
      0.30, 0.90, 0.20, 0.00, 1.00, 0.20,                     // yoga
      0.50, 0.40, 0.30, 0.70, 0.20, 0.10,                     // walking
      0.40, 0.30, 0.60, 0.00, 0.90, 0.50;                     // resting
  cfg.env.datasize_min.resize(6);
  cfg.env.datasize_min << 0.5e5, 0.5e5, 2.0e5, 1.0e5, 1.0e5, 0.5e5;
  cfg.env.datasize_max.resize(6);
  cfg.env.datasize_max << 1.5e5, 1.5e5, 4.0e5, 2.0e5, 2.0e5, 1.5e5;
  cfg.env.cycles.resize(6);
  cfg.env.cycles << 100.0, 80.0, 150.0, 90.0, 120.0, 60.0;
  cfg.episodes = 600;
  cfg.eval_episodes = 10;
  cfg.fixed_k = 3;
  // A higher late-stage noise floor keeps both sides of the selection
  // threshold present in replay, which the critic needs to rank near-tied
  // subsets; 0.02 provably stalls fine discrimination at this scale.
  cfg.agent.noise_final = 0.08;
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const ExperimentConfig& base) {
  if (!std::filesystem::exists(path)) {
    throw IoError("config file does not exist: " + path.string());
  }
  const std::string content = read_file(path);
  if (is_blank(content)) return base;

  json j;
  try {
    j = json::parse(content);
  } catch (const json::parse_error& e) {
    throw InvalidInput(std::string("config parse error: ") + e.what());
  }

  ExperimentConfig cfg = base;
  if (j.contains("env")) {
    const json& e = j["env"];
    const Index G =
        e.contains("num_activities") ? e["num_activities"].get<Index>() : base.env.num_activities;
    const Index M = e.contains("num_metrics") ? e["num_metrics"].get<Index>() : base.env.num_metrics;
    Index N = e.contains("num_devices") ? e["num_devices"].get<Index>() : base.env.num_devices;
    if (e.contains("devices")) {
      const Index listed = static_cast<Index>(e["devices"].size());
      if (e.contains("num_devices") && listed != N) {
        throw InvalidInput("env.num_devices disagrees with the env.devices list length");
      }
      N = listed;
    }
    if (G != base.env.num_activities || M != base.env.num_metrics || N != base.env.num_devices) {
      // New dimensions invalidate the base's matrices; restart from
      // dimension-appropriate defaults, keeping the base's scalars.
      ExperimentConfig regenerated = make_default_config(G, M, N);
      regenerated.env.episode_length = cfg.env.episode_length;
      regenerated.env.theta = cfg.env.theta;
      regenerated.env.lambda = cfg.env.lambda;
      regenerated.agent = cfg.agent;
      regenerated.episodes = cfg.episodes;
      regenerated.eval_episodes = cfg.eval_episodes;
      regenerated.mode = cfg.mode;
      regenerated.out_dir = cfg.out_dir;
      regenerated.seed = cfg.seed;
      cfg = regenerated;
    }

    if (e.contains("episode_length")) cfg.env.episode_length = e["episode_length"].get<Index>();
    if (e.contains("theta")) cfg.env.theta = require_number(e["theta"], "env.theta");
    if (e.contains("lambda")) cfg.env.lambda = require_number(e["lambda"], "env.lambda");
    if (e.contains("importance") && e.contains("importance_csv")) {
      throw InvalidInput("specify either env.importance or env.importance_csv, not both");
    }
    if (e.contains("importance")) cfg.env.importance = parse_matrix(e["importance"], "env.importance");
    if (e.contains("importance_csv")) {
      cfg.env.importance = load_importance(e["importance_csv"].get<std::string>());
    }
    if (e.contains("devices")) {
      cfg.env.devices.clear();
      for (Index n = 0; n < N; ++n) cfg.env.devices.push_back(parse_device(e["devices"][n], n));
    }
    if (e.contains("task")) {
      const json& t = e["task"];
      if (t.contains("datasize_min")) {
        cfg.env.datasize_min = parse_vector(t["datasize_min"], "env.task.datasize_min");
      }
      if (t.contains("datasize_max")) {
        cfg.env.datasize_max = parse_vector(t["datasize_max"], "env.task.datasize_max");
      }
      if (t.contains("cycles")) cfg.env.cycles = parse_vector(t["cycles"], "env.task.cycles");
    }
    if (e.contains("dynamics")) {
      const json& d = e["dynamics"];
      const std::string kind = d.value("kind", "markov");
      if (kind == "iid") {
        cfg.env.dynamics = ActivityDynamics::iid(
            parse_vector(d.at("probabilities"), "env.dynamics.probabilities"));
      } else if (kind == "markov") {
        cfg.env.dynamics =
            ActivityDynamics::markov(parse_matrix(d.at("transition"), "env.dynamics.transition"));
      } else {
        throw InvalidInput("env.dynamics.kind must be 'iid' or 'markov'");
      }
    }
  }

  if (j.contains("agent")) {
    const json& a = j["agent"];
    if (a.contains("hidden_size")) cfg.agent.hidden_size = a["hidden_size"].get<Index>();
    if (a.contains("gamma")) cfg.agent.gamma = require_number(a["gamma"], "agent.gamma");
    if (a.contains("tau")) cfg.agent.tau = require_number(a["tau"], "agent.tau");
    if (a.contains("actor_lr")) cfg.agent.actor_lr = require_number(a["actor_lr"], "agent.actor_lr");
    if (a.contains("critic_lr")) {
      cfg.agent.critic_lr = require_number(a["critic_lr"], "agent.critic_lr");
    }
    if (a.contains("replay_capacity")) {
      cfg.agent.replay_capacity = a["replay_capacity"].get<std::size_t>();
    }
    if (a.contains("batch_size")) cfg.agent.batch_size = a["batch_size"].get<std::size_t>();
    if (a.contains("warmup")) cfg.agent.warmup = a["warmup"].get<std::size_t>();
    if (a.contains("noise_initial")) {
      cfg.agent.noise_initial = require_number(a["noise_initial"], "agent.noise_initial");
    }
    if (a.contains("noise_final")) {
      cfg.agent.noise_final = require_number(a["noise_final"], "agent.noise_final");
    }
    if (a.contains("noise_decay_fraction")) {
      cfg.agent.noise_decay_fraction =
          require_number(a["noise_decay_fraction"], "agent.noise_decay_fraction");
    }
  }

  if (j.contains("episodes")) cfg.episodes = j["episodes"].get<Index>();
  if (j.contains("eval_episodes")) cfg.eval_episodes = j["eval_episodes"].get<Index>();
  if (j.contains("fixed_k")) cfg.fixed_k = j["fixed_k"].get<Index>();
  if (j.contains("mode")) {
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "static") {
      cfg.mode = EvalMode::Static;
    } else if (mode == "dynamic") {
      cfg.mode = EvalMode::Dynamic;
    } else {
      throw InvalidInput("mode must be 'static' or 'dynamic'");
    }
  }
  if (j.contains("out_dir")) cfg.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();

  cfg.env.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

void save_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
  json env{{"num_activities", cfg.env.num_activities},
           {"num_metrics", cfg.env.num_metrics},
           {"num_devices", cfg.env.num_devices},
           {"episode_length", cfg.env.episode_length},
           {"theta", cfg.env.theta},
           {"lambda", cfg.env.lambda},
           {"importance", matrix_to_json(cfg.env.importance)},
           {"task",
            {{"datasize_min", vector_to_json(cfg.env.datasize_min)},
             {"datasize_max", vector_to_json(cfg.env.datasize_max)},
             {"cycles", vector_to_json(cfg.env.cycles)}}}};
  json devices = json::array();
  for (const auto& device : cfg.env.devices) devices.push_back(device_to_json(device));
  env["devices"] = devices;
  if (cfg.env.dynamics.kind == ActivityDynamics::Kind::Iid) {
    env["dynamics"] = {{"kind", "iid"},
                       {"probabilities", vector_to_json(cfg.env.dynamics.probabilities)}};
  } else {
    env["dynamics"] = {{"kind", "markov"},
                       {"transition", matrix_to_json(cfg.env.dynamics.transition)}};
  }

  json j{{"env", env},
         {"agent",
          {{"hidden_size", cfg.agent.hidden_size},
           {"gamma", cfg.agent.gamma},
           {"tau", cfg.agent.tau},
           {"actor_lr", cfg.agent.actor_lr},
           {"critic_lr", cfg.agent.critic_lr},
           {"replay_capacity", cfg.agent.replay_capacity},
           {"batch_size", cfg.agent.batch_size},
           {"warmup", cfg.agent.warmup},
           {"noise_initial", cfg.agent.noise_initial},
           {"noise_final", cfg.agent.noise_final},
           {"noise_decay_fraction", cfg.agent.noise_decay_fraction}}},
         {"episodes", cfg.episodes},
         {"eval_episodes", cfg.eval_episodes},
         {"fixed_k", cfg.fixed_k},
         {"mode", cfg.mode == EvalMode::Static ? "static" : "dynamic"},
         {"out_dir", cfg.out_dir},
         {"seed", cfg.seed}};

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write config file: " + path.string());
  out << j.dump(2) << "\n";
}

Matrix load_importance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open importance file: " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("importance file is empty: " + path.string());
  Index columns = 1;
  for (char c : line) {
    if (c == ',') ++columns;
  }

  std::vector<Vector> rows;
  Index line_number = 1;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    std::vector<std::string> fields;
    std::stringstream splitter(line);
    std::string field;
    while (std::getline(splitter, field, ',')) fields.push_back(field);
    if (static_cast<Index>(fields.size()) != columns) {
      std::ostringstream msg;
      msg << "importance file line " << line_number << " has " << fields.size()
          << " fields, expected " << columns;
      throw InvalidInput(msg.str());
    }
    Vector row(columns);
    for (Index column = 0; column < columns; ++column) {
      try {
        std::size_t used = 0;
        row[column] = std::stod(fields[column], &used);
        while (used < fields[column].size() && std::isspace(fields[column][used])) ++used;
        if (used != fields[column].size()) throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        std::ostringstream msg;
        msg << "importance file line " << line_number << ", column " << column + 1
            << ": not a number: '" << fields[column] << "'";
        throw InvalidInput(msg.str());
      }
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("importance file has no data rows: " + path.string());

  Matrix importance(static_cast<Index>(rows.size()), columns);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    importance.row(static_cast<Index>(r)) = rows[r].transpose();
  }
  validate_importance(importance);
  return importance;
}

}  // namespace daahm
