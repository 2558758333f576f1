#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "oprisk/numerics.hpp"

namespace oprisk {

struct LossEvent {
    std::string cell_id;
    int year = 0;
    double amount = 0.0;
};

/// Compound-Poisson parameters of one cell: Poisson(lambda) counts and
/// LN(m, s) severities.
struct FrequencySeverityFit {
    std::string cell_id;
    double lambda = 0.0;
    double m = 0.0;
    double s = 0.0;
    std::size_t n_events = 0;

    void validate() const;
};

/// Which solution of the quadratic in sigma to keep when inverting the
/// EV/VaR ratio. The two roots sit symmetrically around -F_q.
enum class RootBranch { minus_root, plus_root };

struct AggregateSigma {
    std::string cell_id;
    double q = 0.0;
    double sigma = 0.0;
    RootBranch branch = RootBranch::minus_root;
    double ratio = 0.0; // EV / VaR_q the sigma was implied from
    bool feasible = true;
    std::string failure; // set when !feasible; sigma is NaN then
    std::uint64_t seed = 0;
    std::size_t n_scenarios = 0;
};

struct SigmaSummary {
    double mean = 0.0;
    double stdev = 0.0;
    double median = 0.0;
    double medmed = 0.0; // median absolute deviation from the median
    std::size_t count = 0;
};

struct LogIntensityModel {
    double alpha = 0.0; // mean of ln lambda
    double gamma = 0.0; // stdev of ln lambda
};

struct LogIntensityEstimate {
    LogIntensityModel model;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
    std::size_t count = 0;
};

/// Ratio E[L] / VaR_q(L) of a lognormal loss with log-scale sigma:
/// exp(sigma^2 / 2 + sigma * F_q).
double ev_var_ratio(double sigma, Probability q);

/// Inverse of ev_var_ratio: sigma = -F_q -/+ sqrt(F_q^2 + 2 ln ratio).
/// Throws InfeasibleError when the discriminant is negative.
double sigma_from_ratio(double ratio, Probability q, RootBranch branch = RootBranch::minus_root);

/// Poisson MLE for the frequency (count / window) and sample mean / unbiased
/// stdev of log-severities for the cell's events.
FrequencySeverityFit fit_frequency_severity(std::span<const LossEvent> events,
                                            std::string_view cell_id, int window_years);

/// n annual compound-Poisson losses of `fit`, one substream per block of
/// scenarios so the result depends only on (fit, n, seed).
std::vector<double> simulate_annual_losses(const FrequencySeverityFit& fit, std::size_t n,
                                           std::uint64_t seed);

/// Implied aggregate sigma at several confidence levels from one shared
/// simulation of n_scenarios years. Minus-root branch throughout. Levels
/// that cannot be inverted come back with feasible == false.
std::vector<AggregateSigma> implied_aggregate_sigmas(const FrequencySeverityFit& fit,
                                                     std::span<const Probability> levels,
                                                     std::size_t n_scenarios, std::uint64_t seed);

/// Single-level variant; throws InfeasibleError instead of flagging.
AggregateSigma implied_aggregate_sigma(const FrequencySeverityFit& fit, Probability q,
                                       std::size_t n_scenarios, std::uint64_t seed);

SigmaSummary summarize_sigmas(std::span<const double> values);

LogIntensityEstimate estimate_gamma(std::span<const double> lambdas);

} // namespace oprisk
