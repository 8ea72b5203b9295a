#pragma once

#include <stdexcept>
#include <string>

namespace starris {

// Operand dimensions do not conform.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Argument outside the function's mathematical domain.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// An assignment matrix violates the one-user-per-element rule.
class ConstraintError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Cascaded channel is identically zero, so MRT is undefined.
class DegenerateBeamformerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Brute-force enumeration requested on an instance that is too large.
class SizeError : public std::length_error {
public:
    using std::length_error::length_error;
};

}  // namespace starris
