#pragma once

#include <stdexcept>
#include <string>

namespace amp {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument or precondition violation.
struct ParamError : Error {
    explicit ParamError(const std::string& msg) : Error(msg) {}
};

/// Non-finite or otherwise corrupt vehicle state.
struct InvalidStateError : Error {
    explicit InvalidStateError(const std::string& msg) : Error(msg) {}
};

/// Tube fitting failed (e.g. an empty time bin).
struct FitError : Error {
    explicit FitError(const std::string& msg) : Error(msg) {}
};

/// Estimated disturbance exceeds the top of the precomputed variance grid.
struct AboveGridError : Error {
    explicit AboveGridError(const std::string& msg) : Error(msg) {}
};

/// Mismatched or malformed configuration (LUT vs. library, bad config keys, ...).
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// File could not be read, written, or parsed.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace amp
