#pragma once

#include <stdexcept>
#include <string>

namespace tschac {

/// Raised when a configuration value violates its documented constraints.
/// `field()` carries the dotted path of the offending key, e.g. "ac.t_min".
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field.empty() ? message : field + ": " + message),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Raised when a run cannot complete (broken internal invariant, I/O failure).
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tschac
