#pragma once

#include <stdexcept>
#include <string>

namespace sagbell {

/// Violated operation precondition (non-unitary matrix, bad physical
/// parameter, malformed argument).
class PreconditionError : public std::invalid_argument {
public:
    explicit PreconditionError(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Mode or registry mismatch: unknown mode label, state/registry pairing
/// broken, role missing from a registry.
class RegistryError : public std::runtime_error {
public:
    explicit RegistryError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A circuit that cannot be assembled against its registry (wrong layout,
/// missing roles, invalid element wiring).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sagbell
