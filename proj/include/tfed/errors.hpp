#pragma once

#include <stdexcept>
#include <string>

namespace tfed {

/// Input data too short for the requested statistical procedure.
class InsufficientDataError : public std::runtime_error {
public:
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

/// Signal has no usable variation (constant column, zero variance).
class DegenerateSignalError : public std::runtime_error {
public:
    explicit DegenerateSignalError(const std::string& what) : std::runtime_error(what) {}
};

/// Windowing produced no windows (ts larger than the series/segment).
class EmptyWindowError : public std::runtime_error {
public:
    explicit EmptyWindowError(const std::string& what) : std::runtime_error(what) {}
};

/// Serialized model payload failed magic/version/digest/length checks.
class CorruptPayloadError : public std::runtime_error {
public:
    explicit CorruptPayloadError(const std::string& what) : std::runtime_error(what) {}
};

/// CSV/config parse failure; message carries file location where known.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite value appeared inside a numeric computation.
class NumericOverflowError : public std::runtime_error {
public:
    explicit NumericOverflowError(const std::string& what) : std::runtime_error(what) {}
};

/// Experiment/partition configuration is inconsistent; message names the field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tfed
