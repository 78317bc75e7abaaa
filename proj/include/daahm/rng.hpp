#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <daahm/types.hpp>

namespace daahm {

// splitmix64 finalizer; mixes a word into a well-distributed seed.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives an independent seed stream from a base seed and up to three ids.
// Distinct id tuples give unrelated streams; used to keep environment draws,
// exploration noise and replay sampling decoupled.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                    std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix64(base);
  s = mix64(s ^ mix64(a));
  s = mix64(s ^ mix64(b + 0x632be59bd9b4e019ull));
  s = mix64(s ^ mix64(c + 0x9e6c63d0876a9a47ull));
  return s;
}

// Seeded generator with hand-rolled distributions so that draws are
// bit-identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n). Multiply-shift map; bias is O(n / 2^64).
  Index uniform_index(Index n) {
    return static_cast<Index>(
        (static_cast<unsigned __int128>(next_u64()) * static_cast<std::uint64_t>(n)) >> 64);
  }

  // Standard normal via Box-Muller with a cached spare.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Stream ids for derive_seed; one per independent consumer of randomness.
namespace seed_stream {
inline constexpr std::uint64_t kTrainEnv = 1;
inline constexpr std::uint64_t kAgentInit = 2;
inline constexpr std::uint64_t kNoise = 3;
inline constexpr std::uint64_t kReplay = 4;
inline constexpr std::uint64_t kEvalEnv = 5;
inline constexpr std::uint64_t kEvalPolicy = 6;
inline constexpr std::uint64_t kOracle = 7;
}  // namespace seed_stream

}  // namespace daahm
