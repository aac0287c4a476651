#pragma once

#include <stdexcept>
#include <string>

namespace mtd {

/// Numerical procedure failed to reach its target (quadrature, root finding,
/// degenerate update). Maps to CLI exit code 3.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Input data violates a requirement (bad CSV, rank-deficient design, values
/// outside the state space). Maps to CLI exit code 4.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration / schema violation. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace detail

}  // namespace mtd
