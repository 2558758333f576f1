#include "oprisk/asrf.hpp"

#include <cmath>
#include <sstream>

namespace oprisk {

namespace {

bool in_unit_interval(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

} // namespace

void CellRiskProfile::validate() const {
    OPRISK_REQUIRE(std::isfinite(mu), "cell profile: mu must be finite");
    OPRISK_REQUIRE(std::isfinite(sigma) && sigma > 0.0, "cell profile: sigma must be positive");
    OPRISK_REQUIRE(in_unit_interval(beta), "cell profile: beta must lie in [0, 1]");
}

void HomogeneousModel::validate() const {
    OPRISK_REQUIRE(std::isfinite(sigma) && sigma > 0.0, "homogeneous model: sigma must be positive");
    OPRISK_REQUIRE(in_unit_interval(rho), "homogeneous model: rho must lie in [0, 1]");
}

void HeteroSigmaModel::validate() const {
    OPRISK_REQUIRE(std::isfinite(sigma_mean) && sigma_mean > 0.0,
                   "hetero-sigma model: sigma mean must be positive");
    OPRISK_REQUIRE(std::isfinite(sigma_var) && sigma_var >= 0.0,
                   "hetero-sigma model: sigma variance v must be >= 0");
    OPRISK_REQUIRE(in_unit_interval(rho), "hetero-sigma model: rho must lie in [0, 1]");
    OPRISK_REQUIRE((1.0 - rho) * sigma_var < 1.0,
                   "hetero-sigma model: (1 - rho) v must be < 1, the loss integral diverges");
}

void UncertainBetaModel::validate() const {
    OPRISK_REQUIRE(std::isfinite(sigma) && sigma > 0.0, "uncertain-beta model: sigma must be positive");
    OPRISK_REQUIRE(in_unit_interval(beta_mean), "uncertain-beta model: beta mean must lie in [0, 1]");
    OPRISK_REQUIRE(std::isfinite(beta_var) && beta_var >= 0.0,
                   "uncertain-beta model: beta variance w must be >= 0");
}

std::vector<std::string> UncertainBetaModel::warnings() const {
    std::vector<std::string> out;
    if (beta_var <= 0.0) return out;
    const double sd = std::sqrt(beta_var);
    if (law == BetaLaw::uniform) {
        const double lo = beta_mean - std::sqrt(3.0 * beta_var);
        const double hi = beta_mean + std::sqrt(3.0 * beta_var);
        if (lo < -1.0 || hi > 1.0) {
            out.push_back("uniform loading support [" + fmt(lo) + ", " + fmt(hi) +
                          "] leaves [-1, 1]; B no longer defines a correlation");
        } else if (lo < 0.0 || hi > 1.0) {
            out.push_back("uniform loading support [" + fmt(lo) + ", " + fmt(hi) +
                          "] leaves [0, 1]");
        }
    } else {
        const double mass_outside = norm_cdf((-1.0 - beta_mean) / sd) + norm_sf((1.0 - beta_mean) / sd);
        if (mass_outside > 1e-6) {
            out.push_back("normal loading law puts probability " + fmt(mass_outside) +
                          " outside [-1, 1]");
        }
    }
    return out;
}

double cell_loss(const CellRiskProfile& profile, double factor, double eps) {
    profile.validate();
    const double idio = std::sqrt(1.0 - profile.beta * profile.beta);
    return std::exp(profile.mu - profile.sigma * (profile.beta * factor + idio * eps));
}

double log_conditional_loss_homogeneous(const HomogeneousModel& model, double factor) {
    model.validate();
    const double s = model.sigma;
    return -s * std::sqrt(model.rho) * factor + 0.5 * s * s * (1.0 - model.rho);
}

double log_conditional_loss_hetero_sigma(const HeteroSigmaModel& model, double factor) {
    model.validate();
    const double s = model.sigma_mean;
    const double v = model.sigma_var;
    const double rho = model.rho;
    const double base = -s * std::sqrt(rho) * factor + 0.5 * s * s * (1.0 - rho);
    if (v == 0.0) return base;
    const double den = 1.0 - (1.0 - rho) * v;
    const double shift = (1.0 - rho) * s - std::sqrt(rho) * factor;
    return base - 0.5 * std::log(den) + 0.5 * v * shift * shift / den;
}

double log_conditional_loss_uncertain_beta(const UncertainBetaModel& model, double factor) {
    model.validate();
    const double s = model.sigma;
    const double b = model.beta_mean;
    const double w = model.beta_var;
    if (w == 0.0) {
        return log_conditional_loss_homogeneous(HomogeneousModel{s, b * b}, factor);
    }
    if (model.law == BetaLaw::normal) {
        const double s2w = s * s * w;
        const double shift = b * s + factor;
        return -b * s * factor + 0.5 * (1.0 - b * b) * s * s - 0.5 * std::log1p(s2w) +
               0.5 * s2w / (1.0 + s2w) * shift * shift;
    }
    const double half_width = std::sqrt(3.0 * w);
    const double lo = s * (b - half_width) + factor;
    const double hi = s * (b + half_width) + factor;
    return 0.5 * std::log(kPi / (6.0 * w * s * s)) + 0.5 * s * s + 0.5 * factor * factor +
           log_norm_interval(lo, hi);
}

double conditional_loss_homogeneous(const HomogeneousModel& model, double factor) {
    return std::exp(log_conditional_loss_homogeneous(model, factor));
}

double conditional_loss_hetero_sigma(const HeteroSigmaModel& model, double factor) {
    return std::exp(log_conditional_loss_hetero_sigma(model, factor));
}

double conditional_loss_uncertain_beta(const UncertainBetaModel& model, double factor) {
    return std::exp(log_conditional_loss_uncertain_beta(model, factor));
}

double conditional_loss(const CapitalModel& model, double factor) {
    return std::visit(
        [factor](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<M, HomogeneousModel>)
                return conditional_loss_homogeneous(m, factor);
            else if constexpr (std::is_same_v<M, HeteroSigmaModel>)
                return conditional_loss_hetero_sigma(m, factor);
            else
                return conditional_loss_uncertain_beta(m, factor);
        },
        model);
}

LoadingDensity normal_loading_density(double mean, double var) {
    OPRISK_REQUIRE(std::isfinite(mean), "loading density: mean must be finite");
    OPRISK_REQUIRE(std::isfinite(var) && var > 0.0, "loading density: variance must be positive");
    const double sd = std::sqrt(var);
    return {[mean, sd](double x) { return norm_pdf((x - mean) / sd) / sd; },
            mean - kGaussianTruncation * sd, mean + kGaussianTruncation * sd};
}

LoadingDensity uniform_loading_density(double mean, double var) {
    OPRISK_REQUIRE(std::isfinite(mean), "loading density: mean must be finite");
    OPRISK_REQUIRE(std::isfinite(var) && var > 0.0, "loading density: variance must be positive");
    const double half = std::sqrt(3.0 * var);
    const double height = 1.0 / (2.0 * half);
    return {[height](double) { return height; }, mean - half, mean + half};
}

double conditional_loss_generic(double sigma, const LoadingDensity& density, double factor,
                                const QuadratureSpec& spec) {
    OPRISK_REQUIRE(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive");
    OPRISK_REQUIRE(static_cast<bool>(density.pdf), "loading density has no pdf");
    OPRISK_REQUIRE(std::isfinite(density.lower) && std::isfinite(density.upper) &&
                       density.lower < density.upper,
                   "loading density needs a finite, non-empty support");
    const double mass = integrate(density.pdf, density.lower, density.upper, spec);
    OPRISK_REQUIRE(std::fabs(mass - 1.0) <= 1e-8,
                   "loading density integrates to " + fmt(mass) + ", not 1");
    auto integrand = [&](double x) {
        return density.pdf(x) * std::exp(-x * sigma * factor + 0.5 * (1.0 - x * x) * sigma * sigma);
    };
    return integrate(integrand, density.lower, density.upper, spec);
}

double stand_alone_expectation(const CapitalModel& model, FactorQuantile fq) {
    const double f = fq.value;
    return std::visit(
        [f](const auto& m) -> double {
            using M = std::decay_t<decltype(m)>;
            m.validate();
            if constexpr (std::is_same_v<M, HomogeneousModel>)
                return std::exp(-m.sigma * f);
            else if constexpr (std::is_same_v<M, HeteroSigmaModel>)
                return std::exp(-m.sigma_mean * f + 0.5 * m.sigma_var * f * f);
            else
                return std::exp(-m.sigma * f);
        },
        model);
}

CapitalReport diversification_index(const CapitalModel& model, Probability q) {
    const FactorQuantile fq = FactorQuantile::at_confidence(q);
    CapitalReport r;
    r.q = q.value();
    r.factor_quantile = fq.value;
    r.conditional_loss_at_fq = conditional_loss(model, fq.value);
    r.stand_alone_expectation = stand_alone_expectation(model, fq);
    r.diversification_index = r.conditional_loss_at_fq / r.stand_alone_expectation;
    return r;
}

double homogeneous_diversification_index(double sigma, double rho, Probability q) {
    HomogeneousModel{sigma, rho}.validate();
    const double fq = FactorQuantile::at_confidence(q).value;
    return std::exp(sigma * (1.0 - std::sqrt(rho)) * fq + 0.5 * sigma * sigma * (1.0 - rho));
}

double superadditivity_threshold(double rho, Probability q) {
    OPRISK_REQUIRE(std::isfinite(rho) && rho >= 0.0 && rho < 1.0,
                   "superadditivity threshold needs rho in [0, 1)");
    const double fq = FactorQuantile::at_confidence(q).value;
    return -2.0 * fq * (1.0 - std::sqrt(rho)) / (1.0 - rho);
}

std::optional<double> monotonicity_threshold(double sigma, double v, double rho) {
    OPRISK_REQUIRE(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive");
    OPRISK_REQUIRE(std::isfinite(v) && v >= 0.0, "v must be >= 0");
    OPRISK_REQUIRE(in_unit_interval(rho), "rho must lie in [0, 1]");
    if (v == 0.0 || rho == 0.0) return std::nullopt;
    return sigma / (v * std::sqrt(rho));
}

CurveSeries diversification_curve(double sigma, double rho, Probability q,
                                  std::span<const double> sqrt_v_grid) {
    CurveSeries out;
    out.columns = {"sqrt_v", "di_ratio"};
    for (double sv : sqrt_v_grid) {
        OPRISK_REQUIRE(std::isfinite(sv) && sv >= 0.0, "sqrt(v) grid values must be >= 0");
        const HeteroSigmaModel model{sigma, sv * sv, rho};
        if ((1.0 - rho) * model.sigma_var >= 1.0) {
            out.notices.push_back("skipped sqrt_v = " + fmt(sv) + ": (1 - rho) v >= 1");
            continue;
        }
        out.points.push_back({sv, {diversification_index(model, q).diversification_index}});
    }
    return out;
}

CurveSeries correlation_dispersion_curve(double sigma, double beta2, Probability q,
                                         std::span<const double> sqrt_w_grid) {
    OPRISK_REQUIRE(std::isfinite(beta2) && beta2 >= 0.0 && beta2 <= 1.0, "beta^2 must lie in [0, 1]");
    const double beta = std::sqrt(beta2);
    const double fq = FactorQuantile::at_confidence(q).value;
    const double base = conditional_loss_homogeneous(HomogeneousModel{sigma, beta2}, fq);
    CurveSeries out;
    out.columns = {"sqrt_w", "ratio_normal", "ratio_uniform"};
    for (double sw : sqrt_w_grid) {
        OPRISK_REQUIRE(std::isfinite(sw) && sw >= 0.0, "sqrt(w) grid values must be >= 0");
        const double w = sw * sw;
        const double normal =
            conditional_loss_uncertain_beta({sigma, beta, w, BetaLaw::normal}, fq) / base;
        const double uniform =
            conditional_loss_uncertain_beta({sigma, beta, w, BetaLaw::uniform}, fq) / base;
        out.points.push_back({sw, {normal, uniform}});
    }
    return out;
}

std::vector<double> linear_grid(double first, double last, std::size_t points) {
    OPRISK_REQUIRE(points >= 2, "grid needs at least two points");
    OPRISK_REQUIRE(first < last, "grid bounds must be increasing");
    std::vector<double> grid(points);
    const double step = (last - first) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) grid[i] = first + step * static_cast<double>(i);
    grid.back() = last;
    return grid;
}

} // namespace oprisk
