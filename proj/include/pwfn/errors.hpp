#pragma once

#include <stdexcept>
#include <string>

namespace pwfn {

// Config mistakes (bad JSON, out-of-range values, unknown keys). CLI maps these to exit 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical contract violations (non-finite values, sigma=0 distances, codebook blow-up).
// CLI maps these to exit 3.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape disagreements between tensors; always a programming error, never data-dependent.
struct ShapeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File problems: missing paths, truncated checkpoints, bad magic.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pwfn
