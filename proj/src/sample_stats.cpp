#include "oprisk/sample_stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "oprisk/errors.hpp"

namespace oprisk {

double empirical_quantile(std::span<const double> samples, double q) {
    OPRISK_REQUIRE(!samples.empty(), "empirical_quantile: empty sample");
    OPRISK_REQUIRE(q > 0.0 && q < 1.0, "empirical_quantile: q must lie in (0, 1)");
    const auto n = static_cast<double>(samples.size());
    double qn = q * n;
    // q * n that is integral up to round-off (0.999 * 1e6) must not round up.
    if (std::fabs(qn - std::round(qn)) < 1e-9 * std::max(1.0, qn)) qn = std::round(qn);
    auto rank = static_cast<std::size_t>(std::ceil(qn));
    rank = std::clamp<std::size_t>(rank, 1, samples.size());

    std::vector<double> work(samples.begin(), samples.end());
    auto nth = work.begin() + static_cast<std::ptrdiff_t>(rank - 1);
    std::nth_element(work.begin(), nth, work.end());
    return *nth;
}

namespace {

struct Moments {
    double mean_x, mean_y, sxx, syy, sxy;
};

Moments central_moments(std::span<const double> x, std::span<const double> y) {
    OPRISK_REQUIRE(!x.empty(), "correlation: empty input");
    OPRISK_REQUIRE(x.size() == y.size(), "correlation: series lengths differ");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    OPRISK_REQUIRE(sxx > 0.0 && syy > 0.0, "correlation: zero-variance series");
    return {mx, my, sxx / n, syy / n, sxy / n};
}

} // namespace

double empirical_corr(std::span<const double> x, std::span<const double> y) {
    const Moments m = central_moments(x, y);
    return std::clamp(m.sxy / std::sqrt(m.sxx * m.syy), -1.0, 1.0);
}

double corr_standard_error(std::span<const double> x, std::span<const double> y) {
    const Moments m = central_moments(x, y);
    const double r = m.sxy / std::sqrt(m.sxx * m.syy);
    const double sx = std::sqrt(m.sxx);
    const double sy = std::sqrt(m.syy);
    double m22 = 0.0, m31 = 0.0, m13 = 0.0, m40 = 0.0, m04 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = (x[i] - m.mean_x) / sx;
        const double v = (y[i] - m.mean_y) / sy;
        const double u2 = u * u;
        const double v2 = v * v;
        m22 += u2 * v2;
        m31 += u2 * u * v;
        m13 += u * v2 * v;
        m40 += u2 * u2;
        m04 += v2 * v2;
    }
    const auto n = static_cast<double>(x.size());
    m22 /= n;
    m31 /= n;
    m13 /= n;
    m40 /= n;
    m04 /= n;
    const double var = m22 - r * (m31 + m13) + 0.25 * r * r * (m40 + m04 + 2.0 * m22);
    return std::sqrt(std::max(var, 0.0) / n);
}

MeanAndError mean_and_error(std::span<const double> samples) {
    OPRISK_REQUIRE(!samples.empty(), "mean_and_error: empty sample");
    MeanAndError out;
    out.count = samples.size();
    const auto n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= n;
    double ss = 0.0;
    for (double s : samples) ss += (s - mean) * (s - mean);
    out.mean = mean;
    out.stdev = samples.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    out.std_error = out.stdev / std::sqrt(n);
    return out;
}

} // namespace oprisk
