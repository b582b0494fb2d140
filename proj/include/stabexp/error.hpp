#pragma once

#include <stdexcept>
#include <string>

namespace stabexp {

// Raised when an exhaustive computation would exceed the configured caps.
class instance_too_large : public std::runtime_error {
public:
    explicit instance_too_large(const std::string& what) : std::runtime_error(what) {}
};

// Raised when a checked mathematical inequality or structural invariant fails.
// This always indicates a bug, never a numerical warning.
class invariant_violation : public std::logic_error {
public:
    explicit invariant_violation(const std::string& what) : std::logic_error(what) {}
};

// Malformed input files or command-line configuration.
class parse_error : public std::runtime_error {
public:
    explicit parse_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stabexp
