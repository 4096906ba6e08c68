#pragma once

#include <stdexcept>
#include <string>

namespace tsolve {

struct DomainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConstructionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Raised when an enumeration or dense block would exceed a hard cap.
struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    ConfigError(std::string field_path, const std::string& msg)
        : std::runtime_error(msg), field(std::move(field_path)) {}
    std::string field;
};

} // namespace tsolve
