#ifndef TAILINV_ERRORS_HPP
#define TAILINV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tailinv {

/// Rejected input: bad dimensions, nonpositive masses, malformed sets, ...
/// Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A computation that cannot proceed on valid input: infeasible contraction
/// certificate, divergent radial integral, degenerate estimator, ...
/// Maps to CLI exit code 2.
class ComputeError : public std::runtime_error {
public:
    explicit ComputeError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace tailinv

#endif
