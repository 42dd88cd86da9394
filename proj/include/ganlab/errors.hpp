#pragma once

#include <stdexcept>
#include <string>

namespace ganlab {

/// Bad user input: malformed config, missing fields, constraint violations.
/// CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical or domain failure: shape mismatches, measuring-function domain
/// violations, oracle cap violations, non-finite objectives. Exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem failure with path context. Exit code 4.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ganlab
