#pragma once

#include <stdexcept>

namespace deepcurves {

// Invalid experiment or operator configuration (maps to CLI exit code 2).
struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerical procedure failed to meet its tolerance (CLI exit code 3).
struct numeric_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Sampling grid too coarse for the requested geometric quantity.
struct resolution_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct degenerate_curve_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct construction_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace deepcurves
