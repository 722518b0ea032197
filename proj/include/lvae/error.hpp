#pragma once

#include <stdexcept>
#include <string>

namespace lvae {

// Base class for all toolkit errors. The CLI maps subclasses to distinct
// exit codes (see tools/layoutvae.cpp).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape disagreement between two grids or between a grid and a model.
struct DimensionError : Error {
    using Error::Error;
};

// Bad configuration key, value, or parameter combination.
struct ConfigError : Error {
    using Error::Error;
};

// File I/O failures.
struct IoError : Error {
    using Error::Error;
};
struct FileError : IoError {          // cannot open / missing file
    using IoError::IoError;
};
struct MalformedHeaderError : IoError {
    using IoError::IoError;
};
struct TruncatedPayloadError : IoError {
    using IoError::IoError;
};
struct DimensionOverflowError : IoError {
    using IoError::IoError;
};

// Numerical breakdown inside the phase-field solver; carries the step at
// which non-finite values first appeared.
struct SolverError : Error {
    long step;
    SolverError(const std::string& msg, long step_index)
        : Error(msg + " (step " + std::to_string(step_index) + ")"), step(step_index) {}
};

}  // namespace lvae
