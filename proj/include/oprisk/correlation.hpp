#pragma once

#include "oprisk/numerics.hpp"

namespace oprisk {

/// Intensities of two common-shock Poisson counts N_i = Z + Y_i, with
/// Z ~ Poisson(r) and Y_i ~ Poisson(lambda_i - r).
struct FrequencyPair {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double r = 0.0;

    void validate() const;
};

/// Law of the frequency-correlation bound R = sqrt(min(l1,l2)/max(l1,l2))
/// when log-intensities are i.i.d. normal with standard deviation gamma.
struct RBoundLaw {
    double gamma = 2.35;

    void validate() const;
};

/// Gaussian-copula pair with lognormal marginals LN(., sigma_i), LN(., sigma_j).
struct CopulaPair {
    double sigma_i = 0.0;
    double sigma_j = 0.0;
    double rho_ij = 0.0;

    void validate() const;
};

double freq_corr(const FrequencyPair& pair);
double freq_corr_bound(double lambda1, double lambda2);

/// Aggregate-loss correlation of two compound-Poisson cells with lognormal
/// severities, given their count correlation.
double loss_corr_from_freq_corr(double freq_corr, double s1, double s2);

double r_bound_cdf(double rho, const RBoundLaw& law);
double r_bound_pdf(double rho, const RBoundLaw& law);
double r_bound_mean(const RBoundLaw& law);

double loss_corr_from_copula(const CopulaPair& pair);

/// Closed-form inverse of loss_corr_from_copula in rho_ij. Throws
/// ValidationError when loss_corr is outside the attainable range.
double copula_from_loss_corr(double loss_corr, double sigma_i, double sigma_j);

/// Variance w of the factor loading B implied by the variance of the
/// pairwise correlations rho_ij = B_i B_j, given E[B] = beta.
double w_from_rho_variance(double beta, double var_rho);
double rho_variance_from_w(double beta, double w);

} // namespace oprisk
