#include "oprisk/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "oprisk/random.hpp"
#include "oprisk/sample_stats.hpp"

namespace oprisk {

void FrequencySeverityFit::validate() const {
    OPRISK_REQUIRE(std::isfinite(lambda) && lambda > 0.0, "frequency fit: lambda must be positive");
    OPRISK_REQUIRE(std::isfinite(m), "frequency fit: m must be finite");
    OPRISK_REQUIRE(std::isfinite(s) && s > 0.0, "frequency fit: s must be positive");
}

namespace {

double tail_quantile(Probability q) {
    OPRISK_REQUIRE(q.value() > 0.5, "confidence level must exceed 0.5 (tail quantile)");
    return FactorQuantile::at_confidence(q).value;
}

} // namespace

double ev_var_ratio(double sigma, Probability q) {
    OPRISK_REQUIRE(std::isfinite(sigma) && sigma >= 0.0, "ev_var_ratio: sigma must be >= 0");
    const double fq = tail_quantile(q);
    return std::exp(0.5 * sigma * sigma + sigma * fq);
}

double sigma_from_ratio(double ratio, Probability q, RootBranch branch) {
    OPRISK_REQUIRE(std::isfinite(ratio) && ratio > 0.0, "sigma_from_ratio: ratio must be positive");
    OPRISK_REQUIRE(ratio <= 1.0, "sigma_from_ratio: ratio must not exceed 1");
    const double fq = tail_quantile(q);
    const double disc = fq * fq + 2.0 * std::log(ratio);
    if (disc < 0.0) {
        throw InfeasibleError("sigma_from_ratio: ratio " + std::to_string(ratio) +
                              " is below exp(-F_q^2/2) at q = " + std::to_string(q.value()));
    }
    const double root = std::sqrt(disc);
    return branch == RootBranch::minus_root ? -fq - root : -fq + root;
}

FrequencySeverityFit fit_frequency_severity(std::span<const LossEvent> events,
                                            std::string_view cell_id, int window_years) {
    OPRISK_REQUIRE(window_years >= 1, "window_years must be >= 1");
    std::vector<double> logs;
    for (const LossEvent& e : events) {
        if (e.cell_id != cell_id) continue;
        OPRISK_REQUIRE(std::isfinite(e.amount) && e.amount > 0.0,
                       "non-positive loss amount in cell " + std::string(cell_id));
        logs.push_back(std::log(e.amount));
    }
    OPRISK_REQUIRE(logs.size() >= 2, "cell " + std::string(cell_id) +
                                         " needs at least 2 events to fit a severity scale");
    const MeanAndError stats = mean_and_error(logs);
    FrequencySeverityFit fit;
    fit.cell_id = std::string(cell_id);
    fit.n_events = logs.size();
    fit.lambda = static_cast<double>(logs.size()) / window_years;
    fit.m = stats.mean;
    fit.s = stats.stdev;
    return fit;
}

std::vector<double> simulate_annual_losses(const FrequencySeverityFit& fit, std::size_t n,
                                           std::uint64_t seed) {
    fit.validate();
    constexpr std::size_t kBlock = 4096;
    std::vector<double> out(n);
    for (std::size_t start = 0; start < n; start += kBlock) {
        Engine rng = substream(seed, start / kBlock);
        std::poisson_distribution<long> count(fit.lambda);
        std::lognormal_distribution<double> severity(fit.m, fit.s);
        const std::size_t stop = std::min(n, start + kBlock);
        for (std::size_t i = start; i < stop; ++i) {
            const long k = count(rng);
            double total = 0.0;
            for (long j = 0; j < k; ++j) total += severity(rng);
            out[i] = total;
        }
    }
    return out;
}

std::vector<AggregateSigma> implied_aggregate_sigmas(const FrequencySeverityFit& fit,
                                                     std::span<const Probability> levels,
                                                     std::size_t n_scenarios, std::uint64_t seed) {
    OPRISK_REQUIRE(n_scenarios >= 2, "implied_aggregate_sigma: need at least 2 scenarios");
    const std::vector<double> losses = simulate_annual_losses(fit, n_scenarios, seed);
    const double mean = mean_and_error(losses).mean;

    std::vector<AggregateSigma> out;
    out.reserve(levels.size());
    for (const Probability& q : levels) {
        AggregateSigma a;
        a.cell_id = fit.cell_id;
        a.q = q.value();
        a.seed = seed;
        a.n_scenarios = n_scenarios;
        a.sigma = std::numeric_limits<double>::quiet_NaN();
        const double var = empirical_quantile(losses, q.value());
        if (var <= 0.0) {
            a.feasible = false;
            a.failure = "empirical VaR is zero (frequency too low for this level)";
        } else {
            a.ratio = mean / var;
            if (a.ratio > 1.0) {
                a.feasible = false;
                a.failure = "expected value exceeds VaR";
            } else {
                try {
                    a.sigma = sigma_from_ratio(a.ratio, q, RootBranch::minus_root);
                } catch (const InfeasibleError& e) {
                    a.feasible = false;
                    a.failure = e.what();
                }
            }
        }
        out.push_back(std::move(a));
    }
    return out;
}

AggregateSigma implied_aggregate_sigma(const FrequencySeverityFit& fit, Probability q,
                                       std::size_t n_scenarios, std::uint64_t seed) {
    const Probability levels[] = {q};
    AggregateSigma a = implied_aggregate_sigmas(fit, levels, n_scenarios, seed).front();
    if (!a.feasible) throw InfeasibleError("cell " + fit.cell_id + ": " + a.failure);
    return a;
}

namespace {

double median_of(std::vector<double> v) {
    const std::size_t n = v.size();
    auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    const double upper = *mid;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

} // namespace

SigmaSummary summarize_sigmas(std::span<const double> values) {
    OPRISK_REQUIRE(!values.empty(), "summarize_sigmas: empty input");
    const MeanAndError stats = mean_and_error(values);
    SigmaSummary out;
    out.count = values.size();
    out.mean = stats.mean;
    out.stdev = stats.stdev;
    out.median = median_of({values.begin(), values.end()});
    std::vector<double> spread;
    spread.reserve(values.size());
    for (double x : values) spread.push_back(std::fabs(x - out.median));
    out.medmed = median_of(std::move(spread));
    return out;
}

LogIntensityEstimate estimate_gamma(std::span<const double> lambdas) {
    OPRISK_REQUIRE(lambdas.size() >= 2, "estimate_gamma: need at least 2 intensities");
    std::vector<double> logs;
    logs.reserve(lambdas.size());
    for (double l : lambdas) {
        OPRISK_REQUIRE(std::isfinite(l) && l > 0.0, "estimate_gamma: intensities must be positive");
        logs.push_back(std::log(l));
    }
    const MeanAndError stats = mean_and_error(logs);
    const auto n = static_cast<double>(logs.size());
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (double x : logs) {
        const double d = x - stats.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    LogIntensityEstimate out;
    out.count = logs.size();
    out.model.alpha = stats.mean;
    out.model.gamma = stats.stdev;
    if (m2 > 0.0) {
        out.skewness = m3 / std::pow(m2, 1.5);
        out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    }
    return out;
}

} // namespace oprisk
