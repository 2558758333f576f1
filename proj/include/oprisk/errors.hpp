#pragma once

#include <stdexcept>
#include <string>

namespace oprisk {

// Input violates a documented precondition or type invariant.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Inputs are individually valid but admit no solution (e.g. a negative
// discriminant when inverting a quantile ratio).
class InfeasibleError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Adaptive quadrature ran out of subdivisions. Carries the best estimate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

#define OPRISK_REQUIRE(cond, msg)                                                   \
    do {                                                                            \
        if (!(cond)) throw ::oprisk::ValidationError(std::string(msg));             \
    } while (false)

} // namespace oprisk
