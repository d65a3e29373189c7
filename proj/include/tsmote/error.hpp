#pragma once

#include <stdexcept>
#include <string>

namespace tsmote {

// Every error raised by the library carries a short machine-readable kind so
// the CLI can map it onto an exit code and an error JSON document.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

/// Invalid parameters (n_T < 1, bad window, t_max <= t_min, ...).
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& message) : Error("config", message) {}
};

/// Input data that cannot support the requested operation.
class DataError : public Error {
public:
    explicit DataError(const std::string& message) : Error("data", message) {}
};

/// Malformed CSV / JSON input.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& message) : Error("parse", message) {}
};

/// A without-replacement synthetic pool ran dry.
class PoolUnderflowError : public Error {
public:
    explicit PoolUnderflowError(const std::string& message) : Error("pool_underflow", message) {}
};

} // namespace tsmote
