#pragma once

#include <stdexcept>
#include <string>

namespace metamorph {

// Caller passed something outside an operation's domain (site index, length, range).
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical object failed a structural check (Hermiticity, unitarity, normalization).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UndefinedFidelityError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    IoError(const std::string& what, std::string path)
        : std::runtime_error(what + ": " + path), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace metamorph
