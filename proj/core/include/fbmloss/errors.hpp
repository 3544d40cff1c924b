#pragma once

#include <stdexcept>
#include <string>

namespace fbm {

// Argument outside the mathematical domain of an operation (negative time,
// non-positive scale, ordering violations).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A bound was requested outside the Hurst range it is stated for.
class ScopeError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Floating-point breakdown inside a sampler: non-positive Cholesky pivot,
// partial correlation of magnitude >= 1, negative embedding eigenvalue.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed experiment configuration (file or flags).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace fbm
