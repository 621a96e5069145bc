#pragma once

#include <stdexcept>
#include <string>

namespace kinetic {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SizeMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CapExceeded : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct MissingAux : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct DegenerateCutoff : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroVector : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NegativeDuration : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct QuadratureUnderResolved : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ThresholdFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace kinetic
