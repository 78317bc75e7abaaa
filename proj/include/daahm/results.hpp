#pragma once

// Result rows and their CSV form, the contract consumed by plotting tools.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <daahm/types.hpp>

namespace daahm {

struct ResultRow {
  std::string strategy;
  Index episode = 0;
  Index slot = 0;
  ActivityId activity = 0;
  double reward = 0.0;
  double relevance = 0.0;
  double cost = 0.0;
  std::uint32_t alpha_mask = 0;  // metric 0 in the least significant bit
};

inline constexpr const char* kResultsHeader =
    "strategy,episode,slot,activity,reward,relevance,cost,alpha_mask";

// Writes the fixed-header CSV. Floats carry 17 significant digits so a
// round-trip parse recovers the exact values.
void emit_results(const std::vector<ResultRow>& rows, const std::filesystem::path& path);

std::vector<ResultRow> read_results(const std::filesystem::path& path);

}  // namespace daahm
