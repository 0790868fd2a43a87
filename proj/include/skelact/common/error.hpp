#pragma once

#include <stdexcept>
#include <string>

namespace skelact {

// Error categories map onto CLI exit codes: config/data problems exit 2,
// runtime failures exit 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid configuration: bad parameter values, unknown keys, missing joints.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

// Malformed or inconsistent input data: parse failures, schema violations,
// contract violations between data and configuration.
class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(msg) {}
};

// Failures while running: non-finite loss, I/O on live streams, etc.
class RuntimeError : public Error {
public:
    explicit RuntimeError(const std::string& msg) : Error(msg) {}
};

}  // namespace skelact
