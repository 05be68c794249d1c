#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace powerbench {

/// Collected non-fatal diagnostics. Warnings never abort a computation.
using Warnings = std::vector<std::string>;

/// Base class for all powerbench errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed file structure (wrong header, wrong field set).
class FormatError : public Error {
public:
    using Error::Error;
};

/// Unparseable content (bad number, bad JSON), cites row/column when known.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Data violates a model invariant (non-monotonic timestamps, duplicate ids...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Metric is mathematically undefined for the given inputs.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Bad calibration or tool configuration (e.g. non-positive max gear torque).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Wear inputs (target/actual currents) are missing; alpha must be reported
/// as absent, never as zero.
class WearUnavailableError : public Error {
public:
    using Error::Error;
};

/// Filesystem failure (unreadable input, unwritable output).
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace powerbench
