#pragma once

#include <cstddef>
#include <span>

namespace oprisk {

/// Order statistic of rank ceil(q * n) (1-based), no interpolation.
double empirical_quantile(std::span<const double> samples, double q);

/// Pearson correlation. Throws ValidationError on empty input, mismatched
/// lengths or a zero-variance series.
double empirical_corr(std::span<const double> x, std::span<const double> y);

/// Delta-method standard error of the Pearson correlation of (x, y), using
/// the sample fourth-order cross moments; valid without normality.
double corr_standard_error(std::span<const double> x, std::span<const double> y);

struct MeanAndError {
    double mean = 0.0;
    double stdev = 0.0;     // unbiased
    double std_error = 0.0; // stdev / sqrt(n)
    std::size_t count = 0;
};

MeanAndError mean_and_error(std::span<const double> samples);

} // namespace oprisk
