#include <daahm/checkpoint.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <string>

namespace daahm {

namespace {

constexpr char kMagic[8] = {'D', 'A', 'A', 'H', 'M', 'C', 'K', 'P'};

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
 public:
  Reader(const std::string& bytes, std::size_t end) : bytes_(bytes), end_(end) {}

  std::uint32_t u32() {
    require(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(byte()) << (8 * i);
    return v;
  }

  std::uint64_t u64() {
    require(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(byte()) << (8 * i);
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::uint8_t u8() {
    require(1);
    return byte();
  }

  std::size_t position() const { return pos_; }

 private:
  void require(std::size_t n) const {
    if (pos_ + n > end_) throw IntegrityError("checkpoint: truncated payload");
  }
  std::uint8_t byte() { return static_cast<std::uint8_t>(bytes_[pos_++]); }

  const std::string& bytes_;
  std::size_t end_;
  std::size_t pos_ = 0;
};

void put_network(std::string& out, const Mlp& net) {
  put_u32(out, static_cast<std::uint32_t>(net.layers.size()));
  for (const auto& layer : net.layers) {
    put_u32(out, static_cast<std::uint32_t>(layer.weight.rows()));
    put_u32(out, static_cast<std::uint32_t>(layer.weight.cols()));
    out.push_back(static_cast<char>(layer.activation));
    for (Index r = 0; r < layer.weight.rows(); ++r) {
      for (Index c = 0; c < layer.weight.cols(); ++c) put_f64(out, layer.weight(r, c));
    }
    for (Index r = 0; r < layer.bias.size(); ++r) put_f64(out, layer.bias[r]);
  }
}

Mlp read_network(Reader& reader) {
  Mlp net;
  const std::uint32_t layer_count = reader.u32();
  if (layer_count > 64) throw IntegrityError("checkpoint: implausible layer count");
  net.layers.resize(layer_count);
  for (std::uint32_t l = 0; l < layer_count; ++l) {
    DenseLayer& layer = net.layers[l];
    const std::uint32_t rows = reader.u32();
    const std::uint32_t cols = reader.u32();
    if (rows == 0 || cols == 0 || rows > 1'000'000 || cols > 1'000'000) {
      throw IntegrityError("checkpoint: implausible layer shape");
    }
    const std::uint8_t activation = reader.u8();
    if (activation > 2) throw IntegrityError("checkpoint: unknown activation tag");
    layer.activation = static_cast<Activation>(activation);
    layer.weight.resize(rows, cols);
    for (std::uint32_t r = 0; r < rows; ++r) {
      for (std::uint32_t c = 0; c < cols; ++c) layer.weight(r, c) = reader.f64();
    }
    layer.bias.resize(rows);
    for (std::uint32_t r = 0; r < rows; ++r) layer.bias[r] = reader.f64();
  }
  return net;
}

}  // namespace

void save_checkpoint(const DdpgAgent& agent, const std::filesystem::path& path) {
  std::string payload;
  payload.append(kMagic, sizeof(kMagic));
  put_u32(payload, kCheckpointVersion);
  put_u32(payload, static_cast<std::uint32_t>(agent.num_activities));
  put_u32(payload, static_cast<std::uint32_t>(agent.num_metrics));
  put_f64(payload, agent.config.gamma);
  put_f64(payload, agent.config.tau);
  put_u32(payload, 4);
  put_network(payload, agent.actor);
  put_network(payload, agent.critic);
  put_network(payload, agent.target_actor);
  put_network(payload, agent.target_critic);
  put_u64(payload, fnv1a(payload));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path.string());
  out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("checkpoint write failed: " + path.string());
}

DdpgAgent load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < sizeof(kMagic) + 4 + 8) throw IntegrityError("checkpoint: file too short");
  if (std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IntegrityError("checkpoint: bad magic, not a checkpoint file");
  }

  // Version is checked before the checksum so a deliberate format bump is
  // reported as such rather than as corruption.
  Reader body(bytes, bytes.size() - 8);
  body.u64();  // magic
  const std::uint32_t version = body.u32();
  if (version != kCheckpointVersion) {
    throw IntegrityError("checkpoint: unsupported version " + std::to_string(version));
  }

  const std::string payload = bytes.substr(0, bytes.size() - 8);
  std::uint64_t stored = 0;
  for (int i = 0; i < 8; ++i) {
    stored |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(bytes[bytes.size() - 8 + i]))
              << (8 * i);
  }
  if (fnv1a(payload) != stored) throw IntegrityError("checkpoint: checksum mismatch");

  DdpgAgent agent;
  agent.num_activities = static_cast<Index>(body.u32());
  agent.num_metrics = static_cast<Index>(body.u32());
  agent.config.gamma = body.f64();
  agent.config.tau = body.f64();
  const std::uint32_t network_count = body.u32();
  if (network_count != 4) throw IntegrityError("checkpoint: expected 4 networks");
  agent.actor = read_network(body);
  agent.critic = read_network(body);
  agent.target_actor = read_network(body);
  agent.target_critic = read_network(body);

  if (agent.actor.layers.empty() || agent.actor.input_size() != agent.state_dim() ||
      agent.actor.output_size() != agent.num_metrics ||
      agent.critic.input_size() != agent.state_dim() + agent.num_metrics ||
      agent.critic.output_size() != 1) {
    throw IntegrityError("checkpoint: network shapes do not match the recorded dimensions");
  }
  agent.config.hidden_size = agent.actor.layers.front().weight.rows();
  agent.actor_opt = adam_init(agent.actor, agent.config.actor_lr);
  agent.critic_opt = adam_init(agent.critic, agent.config.critic_lr);
  return agent;
}

}  // namespace daahm
