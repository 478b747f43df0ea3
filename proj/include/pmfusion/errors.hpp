#pragma once

#include <stdexcept>
#include <string>

namespace pmfusion {

/// Invalid argument to a pure operation (index out of range, size mismatch, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

/// Input that cannot be normalized into a probability vector.
class DegenerateInputError : public std::domain_error {
public:
    explicit DegenerateInputError(const std::string& what) : std::domain_error(what) {}
};

/// Missing or inconsistent scenario / table configuration.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class PreconditionError : public std::logic_error {
public:
    explicit PreconditionError(const std::string& what) : std::logic_error(what) {}
};

/// Operation invoked in the wrong lifecycle state (e.g. settling an open market).
class StateError : public std::logic_error {
public:
    explicit StateError(const std::string& what) : std::logic_error(what) {}
};

/// Dempster combination with a zero normalizer.
class ConflictError : public std::domain_error {
public:
    explicit ConflictError(const std::string& what) : std::domain_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace pmfusion
