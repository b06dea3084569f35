#pragma once

#include <stdexcept>

namespace wavesq {

// Bad user input or configuration (CLI exit code 2).
struct validation_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// File or stream failure (CLI exit code 3).
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical breakdown, e.g. a refinement fixed point that does not converge
// (CLI exit code 4).
struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace wavesq
