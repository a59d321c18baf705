#pragma once

#include <stdexcept>
#include <string>

namespace hriex {

/// Non-finite state or control handed to a dynamics function.
struct InvalidStateError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Degenerate geometry (coincident agents, d == 0).
struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Inconsistent dimensions or invalid configuration values.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numerical failure inside an episode; carries the offending timestep.
struct NumericalError : std::runtime_error {
  NumericalError(int step_index, const std::string& what_arg)
      : std::runtime_error("step " + std::to_string(step_index) + ": " + what_arg),
        step(step_index) {}
  int step;
};

/// Training loss blew past the divergence guard.
struct TrainingDivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace hriex
