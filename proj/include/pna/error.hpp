#pragma once

#include <stdexcept>
#include <string>

namespace pna {

// Base for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid parameters, out-of-grid values, bad flag combinations. CLI exit code 2.
struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed or inconsistent input data (files, networks, datasets). CLI exit code 3.
struct DataError : Error {
    explicit DataError(const std::string& msg) : Error(msg) {}
};

}  // namespace pna
