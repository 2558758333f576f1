#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oprisk/calibration.hpp"
#include "oprisk/mcsim.hpp"
#include "oprisk/sample_stats.hpp"

using namespace oprisk;

namespace {

const double kLevels[] = {0.95, 0.975, 0.99, 0.995, 0.999};

double sigma_of_sample(std::vector<double> losses, double q) {
    const double mean = mean_and_error(losses).mean;
    const double var = empirical_quantile(losses, q);
    return sigma_from_ratio(mean / var, Probability(q));
}

} // namespace

TEST_CASE("ev_var_ratio examples") {
    CHECK(ev_var_ratio(0.0, Probability(0.999)) == 1.0);
    // 30-digit reference: 0.0649525310381893871466591773911
    CHECK(ev_var_ratio(1.07, Probability(0.999)) == doctest::Approx(0.06495253103818939).epsilon(1e-13));
    CHECK(ev_var_ratio(1.5, Probability(0.95)) == doctest::Approx(0.2612492254669789).epsilon(1e-13));
    CHECK_THROWS_AS(ev_var_ratio(1.0, Probability(0.5)), ValidationError);
    CHECK_THROWS_AS(ev_var_ratio(-0.1, Probability(0.99)), ValidationError);
}

TEST_CASE("ev_var_ratio agrees with a simulated lognormal mean over quantile") {
    const double sigma = 1.07;
    std::mt19937_64 rng(424242);
    std::lognormal_distribution<double> ln(0.0, sigma);
    std::vector<double> x(10'000'000);
    for (double& v : x) v = ln(rng);
    const double mean = mean_and_error(x).mean;
    const double var = empirical_quantile(x, 0.999);
    const double ratio = mean / var;
    // The 99.9% order statistic at 1e7 draws is good to about half a percent.
    CHECK(ratio == doctest::Approx(ev_var_ratio(sigma, Probability(0.999))).epsilon(0.01));
}

TEST_CASE("sigma_from_ratio examples") {
    const Probability q(0.999);
    CHECK(sigma_from_ratio(1.0, q) == 0.0);
    CHECK(sigma_from_ratio(0.06496, q) == doctest::Approx(1.0699430843419349).epsilon(1e-12));
    CHECK(sigma_from_ratio(0.06496, q, RootBranch::plus_root) ==
          doctest::Approx(6.180464612335627 - 1.0699430843419349).epsilon(1e-12));
    CHECK(sigma_from_ratio(ev_var_ratio(1.07, q), q, RootBranch::plus_root) ==
          doctest::Approx(5.110464612335627).epsilon(1e-12));

    CHECK_THROWS_AS(sigma_from_ratio(1e-3, q), InfeasibleError); // below e^{-F_q^2/2} ~ 8.4e-3
    CHECK_THROWS_AS(sigma_from_ratio(1.01, q), ValidationError);
    CHECK_THROWS_AS(sigma_from_ratio(0.0, q), ValidationError);
    CHECK_THROWS_AS(sigma_from_ratio(0.5, Probability(0.4)), ValidationError);
}

TEST_CASE("round trip over the calibration grid") {
    for (double qv : kLevels) {
        const Probability q(qv);
        const double vertex = -FactorQuantile::at_confidence(q).value;
        for (int i = 0; i <= 400; ++i) {
            const double sigma = 0.01 * i;
            const double ratio = ev_var_ratio(sigma, q);
            if (sigma <= vertex) {
                CHECK(std::fabs(sigma_from_ratio(ratio, q) - sigma) <= 1e-10);
            }
            if (sigma >= vertex && ratio <= 1.0) {
                CHECK(std::fabs(sigma_from_ratio(ratio, q, RootBranch::plus_root) - sigma) <= 1e-10);
            }
        }
    }
}

TEST_CASE("the two roots sum to -2 F_q") {
    for (double qv : kLevels) {
        const Probability q(qv);
        const double fq = FactorQuantile::at_confidence(q).value;
        const double floor = std::exp(-0.5 * fq * fq);
        for (double t : {0.001, 0.1, 0.3, 0.5, 0.9, 1.0}) {
            const double ratio = floor + t * (1.0 - floor);
            const double lo = sigma_from_ratio(ratio, q);
            const double hi = sigma_from_ratio(ratio, q, RootBranch::plus_root);
            CHECK(lo <= hi);
            CHECK(lo + hi == doctest::Approx(-2.0 * fq).epsilon(1e-13));
        }
    }
}

TEST_CASE("ratio decreases in sigma up to the vertex") {
    for (double qv : kLevels) {
        const Probability q(qv);
        const double vertex = -FactorQuantile::at_confidence(q).value;
        double prev = ev_var_ratio(0.0, q);
        for (double s = 0.01; s <= vertex; s += 0.01) {
            const double r = ev_var_ratio(s, q);
            CHECK(r < prev);
            prev = r;
        }
        // Minus root therefore decreases as the ratio grows.
        CHECK(sigma_from_ratio(0.5, q) > sigma_from_ratio(0.6, q));
    }
}

TEST_CASE("fit_frequency_severity examples and errors") {
    const std::vector<LossEvent> two{{"a", 2000, std::exp(1.0)}, {"a", 2000, std::exp(2.0)},
                                     {"b", 2000, 5.0}};
    const auto fit = fit_frequency_severity(two, "a", 1);
    CHECK(fit.lambda == 2.0);
    CHECK(fit.m == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(fit.s == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(fit.n_events == 2);
    CHECK(fit_frequency_severity(two, "a", 4).lambda == 0.5);

    CHECK_THROWS_AS(fit_frequency_severity(two, "b", 1), ValidationError);
    CHECK_THROWS_AS(fit_frequency_severity(two, "a", 0), ValidationError);
    const std::vector<LossEvent> bad{{"a", 2000, 1.0}, {"a", 2000, -1.0}};
    CHECK_THROWS_AS(fit_frequency_severity(bad, "a", 1), ValidationError);

    const std::vector<LossEvent> flat{{"a", 2000, 3.0}, {"a", 2001, 3.0}};
    const auto degenerate = fit_frequency_severity(flat, "a", 2);
    CHECK(degenerate.s == 0.0);
    CHECK_THROWS_AS(degenerate.validate(), ValidationError);
}

TEST_CASE("fit recovers severity parameters of a large synthetic sample") {
    std::mt19937_64 rng(99);
    const double m = 2.03, s = 0.42;
    std::lognormal_distribution<double> ln(m, s);
    std::vector<LossEvent> events;
    for (int i = 0; i < 10'000; ++i) events.push_back({"c", 2010 + i % 10, ln(rng)});
    const auto fit = fit_frequency_severity(events, "c", 10);
    const double n = 10'000.0;
    CHECK(fit.lambda == 1000.0);
    CHECK(std::fabs(fit.m - m) <= 3.0 * s / std::sqrt(n));
    CHECK(std::fabs(fit.s - s) <= 3.0 * s / std::sqrt(2.0 * (n - 1.0)));
}

TEST_CASE("implied sigma is near zero for a nearly deterministic aggregate") {
    const FrequencySeverityFit fit{"dense", 1e4, 0.0, 0.1, 0};
    const auto a = implied_aggregate_sigma(fit, Probability(0.999), 100'000, 3);
    CHECK(a.feasible);
    CHECK(a.ratio > 0.95);
    CHECK(a.sigma >= 0.0);
    CHECK(a.sigma < 0.05);
    CHECK(ev_var_ratio(a.sigma, Probability(0.999)) == doctest::Approx(a.ratio).epsilon(1e-10));
}

TEST_CASE("implied sigma of a heavy-tailed cell is stable across seeds") {
    const FrequencySeverityFit fit{"heavy", 5.0, 2.03, 2.0, 0};
    const std::size_t n = 1'000'000;
    const Probability q(0.999);
    const auto a = implied_aggregate_sigma(fit, q, n, 101);
    const auto b = implied_aggregate_sigma(fit, q, n, 202);

    // Bootstrap the estimator on the first seed's sample.
    const std::vector<double> losses = simulate_annual_losses(fit, n, 101);
    CHECK(sigma_of_sample(losses, 0.999) == a.sigma);
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<double> boot;
    std::vector<double> resample(n);
    for (int r = 0; r < 40; ++r) {
        for (double& x : resample) x = losses[pick(rng)];
        boot.push_back(sigma_of_sample(resample, 0.999));
    }
    const double se = mean_and_error(boot).stdev;
    CHECK(se > 0.0);
    // Difference of two independent estimates: sd sqrt(2) se, 4-sd band.
    CHECK(std::fabs(a.sigma - b.sigma) <= 4.0 * std::sqrt(2.0) * se);
    CHECK(a.sigma > 0.5);
    CHECK(a.sigma < 3.1);
}

TEST_CASE("implied sigma drifts upward with the confidence level for a heavy tail") {
    const FrequencySeverityFit fit{"heavy", 5.0, 2.03, 2.0, 0};
    std::vector<Probability> levels;
    for (double q : kLevels) levels.emplace_back(q);
    const auto sigmas = implied_aggregate_sigmas(fit, levels, 400'000, 5);
    REQUIRE(sigmas.size() == 5);
    for (const auto& s : sigmas) CHECK(s.feasible);
    CHECK(sigmas.front().sigma < sigmas.back().sigma);
}

TEST_CASE("implied sigma is seed-deterministic and flags infeasible levels") {
    const FrequencySeverityFit fit{"x", 3.0, 1.0, 1.2, 0};
    const auto a = implied_aggregate_sigma(fit, Probability(0.99), 50'000, 77);
    const auto b = implied_aggregate_sigma(fit, Probability(0.99), 50'000, 77);
    CHECK(a.sigma == b.sigma);
    CHECK(a.ratio == b.ratio);
    CHECK(a.seed == 77);
    CHECK(a.n_scenarios == 50'000);

    // With lambda = 0.001 almost every year is empty: VaR at 95% is zero.
    const FrequencySeverityFit sparse{"sparse", 0.001, 0.0, 1.0, 0};
    const Probability lv[] = {Probability(0.95)};
    const auto flagged = implied_aggregate_sigmas(sparse, lv, 10'000, 1);
    CHECK_FALSE(flagged.front().feasible);
    CHECK(std::isnan(flagged.front().sigma));
    CHECK_FALSE(flagged.front().failure.empty());
    CHECK_THROWS_AS(implied_aggregate_sigma(sparse, Probability(0.95), 10'000, 1), InfeasibleError);
}

TEST_CASE("summarize_sigmas examples") {
    const double one[] = {1.07};
    const auto s1 = summarize_sigmas(one);
    CHECK(s1.mean == 1.07);
    CHECK(s1.stdev == 0.0);
    CHECK(s1.median == 1.07);
    CHECK(s1.medmed == 0.0);
    CHECK(s1.count == 1);

    const double three[] = {3.0, 1.0, 2.0};
    const auto s3 = summarize_sigmas(three);
    CHECK(s3.mean == 2.0);
    CHECK(s3.median == 2.0);
    CHECK(s3.medmed == 1.0);
    CHECK(s3.stdev == doctest::Approx(1.0));

    const double four[] = {4.0, 1.0, 3.0, 2.0};
    CHECK(summarize_sigmas(four).median == 2.5);
    CHECK(summarize_sigmas(four).medmed == 1.0);

    CHECK_THROWS_AS(summarize_sigmas(std::span<const double>{}), ValidationError);
}

TEST_CASE("21-cell population summary has the expected shape") {
    // Averaged over many draws: mean near 1.07 and med-med well under stdev.
    std::mt19937_64 rng(2014);
    std::normal_distribution<double> pop(1.07, 0.42);
    double sum_mean = 0.0, sum_median = 0.0;
    int medmed_below = 0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
        std::vector<double> v(21);
        for (double& x : v) x = pop(rng);
        const auto s = summarize_sigmas(v);
        CHECK(s.stdev >= 0.0);
        CHECK(s.medmed >= 0.0);
        sum_mean += s.mean;
        sum_median += s.median;
        if (s.medmed < s.stdev) ++medmed_below;
    }
    CHECK(sum_mean / reps == doctest::Approx(1.07).epsilon(0.01));
    CHECK(sum_median / reps == doctest::Approx(1.07).epsilon(0.01));
    // For a normal population, MAD ~ 0.674 sd.
    CHECK(medmed_below > 0.9 * reps);
}

TEST_CASE("estimate_gamma examples") {
    const double same[] = {std::exp(1.0), std::exp(1.0)};
    CHECK(estimate_gamma(same).model.gamma == 0.0);

    const double two[] = {1.0, std::exp(2.0)};
    const auto e = estimate_gamma(two);
    CHECK(e.model.alpha == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(e.model.gamma == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(e.count == 2);

    const double one[] = {1.0};
    CHECK_THROWS_AS(estimate_gamma(one), ValidationError);
    const double neg[] = {1.0, -1.0};
    CHECK_THROWS_AS(estimate_gamma(neg), ValidationError);
}

TEST_CASE("estimate_gamma recovers the spread of simulated log-intensities") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 2.35);
    std::vector<double> lambdas(10'000);
    for (double& l : lambdas) l = std::exp(g(rng));
    const auto e = estimate_gamma(lambdas);
    const double se = 2.35 / std::sqrt(2.0 * (lambdas.size() - 1.0));
    CHECK(std::fabs(e.model.gamma - 2.35) <= 3.0 * se);
    CHECK(std::fabs(e.model.alpha) <= 3.0 * 2.35 / 100.0);
    CHECK(std::fabs(e.skewness) < 0.1);
    CHECK(std::fabs(e.excess_kurtosis) < 0.2);
}

TEST_CASE("end-to-end synthetic calibration recovers generating parameters") {
    const std::vector<FrequencySeverityFit> truth{
        {"A", 40.0, 9.0, 1.8, 0}, {"B", 120.0, 7.5, 1.2, 0}, {"C", 15.0, 11.0, 2.3, 0}};
    const int years = 10;
    const auto events = simulate_loss_events(truth, 2005, years, 31337);
    for (const auto& t : truth) {
        const auto fit = fit_frequency_severity(events, t.cell_id, years);
        const double n_years = years;
        CHECK(std::fabs(fit.lambda - t.lambda) <= 4.0 * std::sqrt(t.lambda / n_years));
        const double n = static_cast<double>(fit.n_events);
        CHECK(std::fabs(fit.m - t.m) <= 4.0 * t.s / std::sqrt(n));
        CHECK(std::fabs(fit.s - t.s) <= 4.0 * t.s / std::sqrt(2.0 * (n - 1.0)));
    }
}
