#include "oprisk/correlation.hpp"

#include <algorithm>
#include <cmath>

namespace oprisk {

void FrequencyPair::validate() const {
    OPRISK_REQUIRE(std::isfinite(lambda1) && lambda1 > 0.0, "lambda1 must be positive");
    OPRISK_REQUIRE(std::isfinite(lambda2) && lambda2 > 0.0, "lambda2 must be positive");
    OPRISK_REQUIRE(std::isfinite(r) && r >= 0.0, "common-shock intensity r must be >= 0");
    OPRISK_REQUIRE(r <= std::min(lambda1, lambda2),
                   "common-shock intensity r must not exceed min(lambda1, lambda2)");
}

void RBoundLaw::validate() const {
    OPRISK_REQUIRE(std::isfinite(gamma) && gamma > 0.0, "gamma must be positive");
}

void CopulaPair::validate() const {
    OPRISK_REQUIRE(std::isfinite(sigma_i) && sigma_i > 0.0, "sigma_i must be positive");
    OPRISK_REQUIRE(std::isfinite(sigma_j) && sigma_j > 0.0, "sigma_j must be positive");
    OPRISK_REQUIRE(std::isfinite(rho_ij) && std::fabs(rho_ij) <= 1.0,
                   "copula correlation must lie in [-1, 1]");
}

double freq_corr(const FrequencyPair& pair) {
    pair.validate();
    return pair.r / std::sqrt(pair.lambda1 * pair.lambda2);
}

double freq_corr_bound(double lambda1, double lambda2) {
    OPRISK_REQUIRE(std::isfinite(lambda1) && lambda1 > 0.0 && std::isfinite(lambda2) &&
                       lambda2 > 0.0,
                   "intensities must be positive");
    return std::sqrt(std::min(lambda1, lambda2) / std::max(lambda1, lambda2));
}

double loss_corr_from_freq_corr(double freq_corr, double s1, double s2) {
    OPRISK_REQUIRE(std::isfinite(freq_corr) && std::fabs(freq_corr) <= 1.0,
                   "frequency correlation must lie in [-1, 1]");
    OPRISK_REQUIRE(std::isfinite(s1) && s1 >= 0.0 && std::isfinite(s2) && s2 >= 0.0,
                   "severity scales must be non-negative");
    return freq_corr * std::exp(-0.5 * s1 * s1 - 0.5 * s2 * s2);
}

namespace {

double r_bound_argument(double rho, const RBoundLaw& law) {
    law.validate();
    OPRISK_REQUIRE(std::isfinite(rho) && rho > 0.0 && rho <= 1.0,
                   "correlation bound must lie in (0, 1]");
    return kSqrt2 * std::log(rho) / law.gamma;
}

} // namespace

double r_bound_cdf(double rho, const RBoundLaw& law) {
    return std::min(1.0, 2.0 * norm_cdf(r_bound_argument(rho, law)));
}

double r_bound_pdf(double rho, const RBoundLaw& law) {
    const double z = r_bound_argument(rho, law);
    // d/drho of 2 N(z): the factor 2 comes from folding |X| onto one tail.
    return 2.0 * kSqrt2 / (law.gamma * rho) * norm_pdf(z);
}

double r_bound_mean(const RBoundLaw& law) {
    law.validate();
    const double a = law.gamma / kSqrt2;
    // Log space: e^{a^2/2} overflows before N(-a) underflows.
    return 2.0 * std::exp(0.5 * a * a + std::log(norm_cdf(-a)));
}

double loss_corr_from_copula(const CopulaPair& pair) {
    pair.validate();
    const double num = std::expm1(pair.rho_ij * pair.sigma_i * pair.sigma_j);
    const double den = std::sqrt(std::expm1(pair.sigma_i * pair.sigma_i) *
                                 std::expm1(pair.sigma_j * pair.sigma_j));
    return num / den;
}

double copula_from_loss_corr(double loss_corr, double sigma_i, double sigma_j) {
    OPRISK_REQUIRE(std::isfinite(sigma_i) && sigma_i > 0.0 && std::isfinite(sigma_j) &&
                       sigma_j > 0.0,
                   "sigmas must be positive");
    OPRISK_REQUIRE(std::isfinite(loss_corr), "loss correlation must be finite");
    const double scale = std::sqrt(std::expm1(sigma_i * sigma_i) * std::expm1(sigma_j * sigma_j));
    const double arg = loss_corr * scale;
    OPRISK_REQUIRE(arg > -1.0, "loss correlation below the attainable range");
    const double rho = std::log1p(arg) / (sigma_i * sigma_j);
    OPRISK_REQUIRE(rho <= 1.0 + 1e-12, "loss correlation above the attainable range");
    OPRISK_REQUIRE(rho >= -1.0 - 1e-12, "loss correlation below the attainable range");
    return std::clamp(rho, -1.0, 1.0);
}

double w_from_rho_variance(double beta, double var_rho) {
    OPRISK_REQUIRE(std::isfinite(beta) && beta >= 0.0 && beta < 1.0, "beta must lie in [0, 1)");
    OPRISK_REQUIRE(std::isfinite(var_rho) && var_rho >= 0.0, "var(rho_ij) must be >= 0");
    const double b2 = beta * beta;
    // sqrt(b^4 + v) - b^2, rationalized to avoid cancellation for small v.
    const double root = std::sqrt(b2 * b2 + var_rho);
    return var_rho == 0.0 ? 0.0 : var_rho / (root + b2);
}

double rho_variance_from_w(double beta, double w) {
    OPRISK_REQUIRE(std::isfinite(beta), "beta must be finite");
    OPRISK_REQUIRE(std::isfinite(w) && w >= 0.0, "w must be >= 0");
    return w * (w + 2.0 * beta * beta);
}

} // namespace oprisk
