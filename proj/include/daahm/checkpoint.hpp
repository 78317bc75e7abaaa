#pragma once

// Versioned binary agent checkpoints. Layout (little-endian):
//   magic "DAAHMCKP" | u32 version | u32 activities | u32 metrics
//   f64 gamma | f64 tau | u32 network count (4: actor, critic, targets)
//   per network: u32 layers; per layer: u32 out, u32 in, u8 activation,
//                f64 weights (row-major), f64 biases
//   u64 FNV-1a checksum of everything above
// Optimizer state is not persisted; loading yields fresh Adam accumulators.

#include <filesystem>

#include <daahm/ddpg.hpp>

namespace daahm {

inline constexpr std::uint32_t kCheckpointVersion = 1;

void save_checkpoint(const DdpgAgent& agent, const std::filesystem::path& path);

// Bit-exact restore of all four networks. Throws IntegrityError on a bad
// magic, version mismatch, checksum failure or truncation.
DdpgAgent load_checkpoint(const std::filesystem::path& path);

}  // namespace daahm
