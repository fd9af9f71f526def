#pragma once

#include <stdexcept>

namespace rcs {

/// Distribution or model parameter outside its admissible range.
struct ParameterError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Relay placement has no admissible law-of-cosines solution.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Bit stream length incompatible with the constellation, or tx/rx mismatch.
struct FramingError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Product-density evaluation requested beyond the supported nesting depth.
struct UnsupportedDepthError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Training loss became NaN/Inf; message names the offending step.
struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Model file unreadable, wrong magic/version, or checksum mismatch.
struct ModelIoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed, unknown, or contradictory run configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace rcs
