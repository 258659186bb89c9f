#pragma once

#include <stdexcept>
#include <string>

namespace iscdet {

/// A value handed to an operation violates its precondition
/// (non-positive dt, non-finite current, unsorted events, ...).
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

/// Cell parameters or a configuration file are malformed. The message
/// names the offending field.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace iscdet
