#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oprisk/numerics.hpp"

using namespace oprisk;

namespace {

// Bisection on norm_cdf: slow but shares nothing with the rational
// approximation behind norm_inv.
double bisect_inverse(double p) {
    double lo = -40.0, hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (norm_cdf(mid) < p) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Upper tail by the Laplace continued fraction for the Mills ratio.
double upper_tail_continued_fraction(double x) {
    double frac = 0.0;
    for (int k = 200; k >= 1; --k) frac = k / (x + frac);
    return norm_pdf(x) / (x + frac);
}

} // namespace

TEST_CASE("norm_pdf values and symmetry") {
    CHECK(norm_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
    // mpmath npdf(1) = 0.241970724519143349797...
    CHECK(norm_pdf(1.0) == doctest::Approx(0.24197072451914335).epsilon(1e-14));
    CHECK(norm_pdf(-1.0) == norm_pdf(1.0));
    CHECK_THROWS_AS(norm_pdf(std::numeric_limits<double>::quiet_NaN()), ValidationError);
    CHECK_THROWS_AS(norm_pdf(std::numeric_limits<double>::infinity()), ValidationError);
}

TEST_CASE("norm_cdf against integration of the density") {
    CHECK(norm_cdf(0.0) == 0.5);
    const double oracle = integrate(norm_pdf, -40.0, -1.66170, QuadratureSpec{1e-15, 1e-13, 4000});
    CHECK(norm_cdf(-1.66170) == doctest::Approx(oracle).epsilon(1e-11));
    // Frozen from the same quadrature at 30 digits: 0.04828647057230625
    CHECK(norm_cdf(-1.66170) == doctest::Approx(0.04828647057230625).epsilon(1e-12));

    const double tail6 = upper_tail_continued_fraction(6.0);
    CHECK(tail6 == doctest::Approx(9.865876450376981e-10).epsilon(1e-12));
    CHECK(1.0 - norm_cdf(6.0) == doctest::Approx(tail6).epsilon(1e-6)); // cancellation in 1 - N
    CHECK(norm_sf(6.0) == doctest::Approx(tail6).epsilon(1e-12));
    CHECK_THROWS_AS(norm_cdf(std::numeric_limits<double>::infinity()), ValidationError);
}

TEST_CASE("norm_cdf is antisymmetric and monotone") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-8.0, 8.0);
    double prev_x = -9.0, prev = norm_cdf(-9.0);
    for (int i = 0; i < 2000; ++i) {
        const double x = u(rng);
        CHECK(std::fabs(norm_cdf(-x) - (1.0 - norm_cdf(x))) <= 1e-14);
    }
    for (double x = -9.0; x <= 9.0; x += 0.01) {
        const double v = norm_cdf(x);
        CHECK(v >= prev);
        prev = v;
        prev_x = x;
    }
    CHECK(prev_x > 8.9);
}

TEST_CASE("derivative of norm_cdf matches norm_pdf") {
    const double h = 1e-5;
    for (double x = -5.0; x <= 5.0; x += 0.25) {
        const double fd = (norm_cdf(x + h) - norm_cdf(x - h)) / (2.0 * h);
        CHECK(fd == doctest::Approx(norm_pdf(x)).epsilon(1e-6));
    }
}

TEST_CASE("norm_inv against bisection") {
    CHECK(norm_inv(0.5) == 0.0);
    const double f = norm_inv(0.001);
    CHECK(f == doctest::Approx(bisect_inverse(0.001)).epsilon(1e-12));
    // mpmath: N^{-1}(0.001) = -3.0902323061678135415...
    CHECK(std::fabs(f - (-3.0902323061678135)) < 1e-12);
    CHECK(norm_inv(0.999) == doctest::Approx(-f).epsilon(1e-12));
    CHECK(std::fabs(norm_inv(Probability(0.001)) - f) == 0.0);

    for (double p : {1e-300, 1e-100, 1e-10, 1e-7, 0.01, 0.2, 0.7, 0.95})
        CHECK(norm_inv(p) == doctest::Approx(bisect_inverse(p)).epsilon(1e-13));
    // Near 1 the input itself carries the error: dp ~ 1e-16 moves x by dp / n(x).
    for (double p : {1e-7, 1e-10})
        CHECK(std::fabs(norm_inv(1.0 - p) + norm_inv(p)) < 2e-16 / norm_pdf(norm_inv(p)));

    CHECK_THROWS_AS(norm_inv(0.0), ValidationError);
    CHECK_THROWS_AS(norm_inv(1.0), ValidationError);
    CHECK_THROWS_AS(norm_inv(-0.1), ValidationError);
}

TEST_CASE("norm_cdf inverts norm_inv across (0, 1)") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::uniform_real_distribution<double> expo(-10.0, -1.0);
    for (int i = 0; i < 5000; ++i) {
        const double p = u(rng);
        if (p <= 0.0) continue;
        CHECK(std::fabs(norm_cdf(norm_inv(p)) - p) <= 1e-12);
        const double tiny = std::pow(10.0, expo(rng));
        CHECK(std::fabs(norm_cdf(norm_inv(tiny)) - tiny) <= 1e-12 * std::max(tiny, 1e-3));
    }
}

TEST_CASE("factor quantile sign convention") {
    const FactorQuantile fq = FactorQuantile::at_confidence(Probability(0.999));
    CHECK(fq.value < 0.0);
    CHECK(fq.value == doctest::Approx(-3.090232).epsilon(1e-7));
    CHECK_THROWS_AS(Probability(1.0), ValidationError);
    CHECK_THROWS_AS(Probability(0.0), ValidationError);
}

TEST_CASE("log_norm_interval agrees with a direct difference") {
    for (auto [a, b] : {std::pair{-1.0, 1.0}, {-6.0, -4.5}, {3.0, 7.0}, {0.2, 0.2005}, {-9.0, -8.99}}) {
        const double direct = std::log(integrate(norm_pdf, a, b, QuadratureSpec{1e-300, 1e-13, 4000}));
        CHECK(log_norm_interval(a, b) == doctest::Approx(direct).epsilon(1e-11));
    }
    CHECK_THROWS_AS(log_norm_interval(1.0, 1.0), ValidationError);
}

TEST_CASE("Gaussian-weighted quadrature reproduces normal moments") {
    const QuadratureSpec spec{};
    CHECK(integrate_gaussian_weighted([](double) { return 1.0; }, spec) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK(integrate_gaussian_weighted([](double t) { return t * t; }, spec) ==
          doctest::Approx(1.0).epsilon(1e-12));
    double double_factorial = 1.0;
    for (int k = 0; k <= 8; ++k) {
        const double moment = integrate_gaussian_weighted([k](double t) { return std::pow(t, k); }, spec);
        if (k % 2 == 1) {
            CHECK(std::fabs(moment) <= spec.abs_tol);
        } else {
            if (k >= 2) double_factorial *= (k - 1);
            CHECK(std::fabs(moment - double_factorial) <= std::max(spec.abs_tol, 1e-10 * double_factorial));
        }
    }
    // Moment-generating function e^{a^2/2}, a = 0.7.
    CHECK(integrate_gaussian_weighted([](double t) { return std::exp(0.7 * t); }, spec) ==
          doctest::Approx(std::exp(0.245)).epsilon(1e-10));
}

TEST_CASE("quadrature reports non-convergence with its best estimate") {
    const QuadratureSpec tight{1e-14, 1e-14, 2};
    auto spiky = [](double x) { return 1.0 / (1e-4 + x * x); };
    const QuadratureResult r = integrate_adaptive(spiky, -1.0, 1.0, tight);
    CHECK_FALSE(r.converged);
    CHECK(r.subdivisions == 2);
    try {
        integrate(spiky, -1.0, 1.0, tight);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.estimate() == r.value);
        CHECK(e.error_bound() == r.error);
    }
    CHECK_THROWS_AS(integrate_adaptive(spiky, -1.0, 1.0, QuadratureSpec{0.0, 1e-10, 10}), ValidationError);
    // Reversed bounds flip the sign.
    CHECK(integrate([](double x) { return x; }, 1.0, 0.0) == doctest::Approx(-0.5));
}
