#pragma once

#include <stdexcept>
#include <string>

namespace wnet {

/// Base class for all errors raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tensor/layer dimension mismatches.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration values (bad keep probability, zero fans, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed manifest or report input; message carries file/line context.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Filesystem failures; message carries the offending path.
class IoError : public Error {
public:
    using Error::Error;
};

/// Checkpoint container violations: bad magic, version, truncation.
class CheckpointError : public Error {
public:
    using Error::Error;
};

/// Operation invoked in the wrong order or mode (backward without forward,
/// predict on a train-mode model, ...).
class StateError : public Error {
public:
    using Error::Error;
};

/// Command-line usage problems; maps to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

}  // namespace wnet
