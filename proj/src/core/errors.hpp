#pragma once

#include <stdexcept>
#include <string>

namespace mcr {

// File and parse failures on external inputs/outputs.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mismatch between artifacts that must agree (e.g. pool fingerprints).
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical blow-up in a simulation.
struct BlowupError : std::runtime_error {
  size_t step;
  double max_abs;
  BlowupError(size_t step_, double max_abs_)
      : std::runtime_error("phase-field blow-up at step " + std::to_string(step_) +
                           ": max|c| = " + std::to_string(max_abs_)),
        step(step_),
        max_abs(max_abs_) {}
};

}  // namespace mcr
