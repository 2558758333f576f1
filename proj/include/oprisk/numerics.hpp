#pragma once

#include <cstddef>
#include <functional>

#include "oprisk/errors.hpp"

namespace oprisk {

/// A probability strictly inside (0, 1). Construction validates.
class Probability {
public:
    explicit Probability(double p);

    double value() const noexcept { return p_; }
    Probability complement() const { return Probability(1.0 - p_); }

    friend bool operator==(const Probability&, const Probability&) = default;

private:
    double p_;
};

/// Standard-normal quantile F_q = N^{-1}(1 - q) of a tail confidence level q.
/// Negative for q > 1/2; at q = 99.9% it is about -3.090232.
struct FactorQuantile {
    double value;

    static FactorQuantile at_confidence(Probability q);
};

struct QuadratureSpec {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    std::size_t max_subdivisions = 2000;

    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t subdivisions = 0;
    bool converged = false;
};

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSqrt2 = 1.414213562373095048801688724209698079;
constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;

// Half-width of the truncated domain used for Gaussian-weighted integrals,
// in standard deviations. Mass beyond it is below 1e-32.
constexpr double kGaussianTruncation = 12.0;

double norm_pdf(double x);
double norm_cdf(double x);
/// Upper tail 1 - N(x), accurate when N(x) is close to one.
double norm_sf(double x);
/// Inverse of norm_cdf. Rational approximation refined by one Halley step.
double norm_inv(double p);
inline double norm_inv(Probability p) { return norm_inv(p.value()); }

/// log(N(b) - N(a)) for a < b, without cancellation in either tail.
double log_norm_interval(double a, double b);

/// Adaptive Gauss-Kronrod (7/15) on [a, b]. Never throws on non-convergence;
/// inspect `converged`.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureSpec& spec = {});

/// Like integrate_adaptive but throws ConvergenceError when the error target
/// is not met within spec.max_subdivisions.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});

/// Integral of n(t) g(t) over the real line, n the standard normal density.
/// Evaluated on [-12, 12].
double integrate_gaussian_weighted(const std::function<double(double)>& g,
                                   const QuadratureSpec& spec = {});

} // namespace oprisk
