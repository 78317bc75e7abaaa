#pragma once

#include <stdexcept>
#include <string>

namespace daahm {

// Bad argument values or mismatched dimensions.
struct InvalidInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// step() called past the end of an episode.
struct EpisodeExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sampling from a buffer that has not reached the requested batch size yet.
struct NotReady : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Non-finite loss or gradient; the offending update is aborted.
struct PoisonedUpdate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Checkpoint corruption, truncation or version mismatch.
struct IntegrityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Request exceeds a hard enumeration bound.
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace daahm
