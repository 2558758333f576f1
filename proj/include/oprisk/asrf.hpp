#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "oprisk/numerics.hpp"

namespace oprisk {

// One-factor lognormal cell losses in the infinitely granular limit.
//
// A cell loss is L_i = exp(mu_i - sigma_i (beta_i F + sqrt(1 - beta_i^2) eps_i))
// with F the systemic factor and eps_i the idiosyncratic one. As the number
// of cells grows, the average cell loss converges to a deterministic function
// L(F). Every conditional loss below is that per-cell average; multiply by
// the number of cells for the bank total. mu is taken as 0 throughout, since
// it only rescales L(F) by E[e^M].
//
// Capital is L(F_q) with F_q = N^{-1}(1 - q) < 0, so losses grow as F falls.

struct CellRiskProfile {
    double mu = 0.0;
    double sigma = 1.0;
    double beta = 0.0;

    void validate() const;
};

/// Identical sigma and identical pairwise copula correlation rho.
struct HomogeneousModel {
    double sigma = 1.07;
    double rho = 0.1;

    void validate() const;
};

/// Cell sigmas drawn as N(sigma_mean, sigma_var), identical correlation rho.
struct HeteroSigmaModel {
    double sigma_mean = 1.07;
    double sigma_var = 0.0;
    double rho = 0.1;

    void validate() const;
};

enum class BetaLaw { normal, uniform };

/// Identical sigma; factor loadings B with mean beta_mean and variance
/// beta_var, normal or uniform on beta_mean +/- sqrt(3 beta_var).
struct UncertainBetaModel {
    double sigma = 1.07;
    double beta_mean = 0.31622776601683794;
    double beta_var = 0.0;
    BetaLaw law = BetaLaw::normal;

    void validate() const;
    /// Human-readable notes where the loading law leaves [0, 1], or [-1, 1],
    /// and the correlation reading of B breaks down. Never blocks evaluation.
    std::vector<std::string> warnings() const;
};

using CapitalModel = std::variant<HomogeneousModel, HeteroSigmaModel, UncertainBetaModel>;

struct CapitalReport {
    double conditional_loss_at_fq = 0.0;
    double stand_alone_expectation = 0.0;
    double diversification_index = 0.0;
    double q = 0.0;
    double factor_quantile = 0.0;
};

double cell_loss(const CellRiskProfile& profile, double factor, double eps);

double log_conditional_loss_homogeneous(const HomogeneousModel& model, double factor);
double log_conditional_loss_hetero_sigma(const HeteroSigmaModel& model, double factor);
double log_conditional_loss_uncertain_beta(const UncertainBetaModel& model, double factor);

double conditional_loss_homogeneous(const HomogeneousModel& model, double factor);
double conditional_loss_hetero_sigma(const HeteroSigmaModel& model, double factor);
double conditional_loss_uncertain_beta(const UncertainBetaModel& model, double factor);
double conditional_loss(const CapitalModel& model, double factor);

/// A density for the factor loading B with its (finite) support.
struct LoadingDensity {
    std::function<double(double)> pdf;
    double lower = 0.0;
    double upper = 0.0;
};

/// N(mean, var) truncated at +/- 12 standard deviations; var > 0.
LoadingDensity normal_loading_density(double mean, double var);
/// Uniform on mean +/- sqrt(3 var); var > 0.
LoadingDensity uniform_loading_density(double mean, double var);

/// Conditional loss for an arbitrary loading law by direct quadrature of
/// E[exp(-B sigma F + (1 - B^2) sigma^2 / 2)]. Throws ValidationError when the
/// density does not integrate to one within 1e-8.
double conditional_loss_generic(double sigma, const LoadingDensity& density, double factor,
                                const QuadratureSpec& spec = {});

/// E[exp(-Sigma F_q)]: the average stand-alone 99.9%-style capital per cell.
double stand_alone_expectation(const CapitalModel& model, FactorQuantile fq);

CapitalReport diversification_index(const CapitalModel& model, Probability q);

/// exp(sigma (1 - sqrt rho) F_q + sigma^2 (1 - rho) / 2), the homogeneous
/// diversification index written out directly.
double homogeneous_diversification_index(double sigma, double rho, Probability q);

/// sigma above which the homogeneous DI exceeds one (capital stops being
/// sub-additive): -2 F_q (1 - sqrt rho) / (1 - rho).
double superadditivity_threshold(double rho, Probability q);

/// Factor value F* = sigma / (v sqrt rho) beyond which the heterogeneous-sigma
/// loss increases with F. nullopt when v == 0 or rho == 0 (no threshold).
std::optional<double> monotonicity_threshold(double sigma, double v, double rho);

struct CurvePoint {
    double x = 0.0;
    std::vector<double> y;
};

struct CurveSeries {
    std::vector<std::string> columns; // x column first
    std::vector<CurvePoint> points;
    std::vector<std::string> notices; // skipped grid points
};

/// Diversification index of the heterogeneous-sigma model against sqrt(v).
CurveSeries diversification_curve(double sigma, double rho, Probability q,
                                   std::span<const double> sqrt_v_grid);

/// L(F_q; w) / L(F_q; 0) against sqrt(w) for the normal and uniform loading
/// laws, with beta = sqrt(beta2).
CurveSeries correlation_dispersion_curve(double sigma, double beta2, Probability q,
                                         std::span<const double> sqrt_w_grid);

/// Evenly spaced grid from `first` to `last` inclusive.
std::vector<double> linear_grid(double first, double last, std::size_t points);

} // namespace oprisk
