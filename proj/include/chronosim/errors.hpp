#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chronosim {

// Base class for everything the simulator can throw. The CLI maps
// ConfigError subclasses to exit code 2 and the rest to exit code 3.
class SimError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// --- configuration-time errors (exit code 2) ---

class ConfigError : public SimError {
public:
    using SimError::SimError;
};

class ParseError : public ConfigError {
public:
    ParseError(std::string msg, int line, int column)
        : ConfigError("parse error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + msg),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Carries the violated rule name (DuplicateNetworkNumber, MissingPosition, ...).
class ValidationError : public ConfigError {
public:
    ValidationError(std::string rule, const std::string& msg)
        : ConfigError(rule + ": " + msg), rule_(std::move(rule)) {}

    const std::string& rule() const { return rule_; }

private:
    std::string rule_;
};

class UnknownParameterError : public ConfigError {
public:
    explicit UnknownParameterError(const std::string& path)
        : ConfigError("unknown parameter path: " + path) {}
};

class MalformedTraceError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// --- runtime errors (exit code 3) ---

// Scheduling an event before the current simulation time is a module bug;
// the run is aborted rather than silently clamped.
class PastEventError : public SimError {
public:
    using SimError::SimError;
};

class BadIntervalError : public SimError {
public:
    using SimError::SimError;
};

class UnknownNetworkError : public SimError {
public:
    using SimError::SimError;
};

class MissingPositionError : public SimError {
public:
    using SimError::SimError;
};

class DivergedError : public SimError {
public:
    using SimError::SimError;
};

class GridMismatchError : public SimError {
public:
    using SimError::SimError;
};

class NonFiniteError : public SimError {
public:
    using SimError::SimError;
};

}  // namespace chronosim
