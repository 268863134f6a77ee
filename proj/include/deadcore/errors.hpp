#pragma once

#include <stdexcept>
#include <string>

namespace deadcore {

// Error taxonomy. std::domain_error is used directly for out-of-domain
// arguments; everything else gets a named type so callers can map failures
// to exit codes (2 = configuration/validation, 3 = numerical).

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct precondition_error : std::invalid_argument {
    explicit precondition_error(const std::string& msg) : std::invalid_argument(msg) {}
};

struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct nonconvergence_error : std::runtime_error {
    explicit nonconvergence_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct geometry_error : std::invalid_argument {
    explicit geometry_error(const std::string& msg) : std::invalid_argument(msg) {}
};

struct bracket_error : std::runtime_error {
    explicit bracket_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace deadcore
