#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "oprisk/asrf.hpp"
#include "oprisk/calibration.hpp"
#include "oprisk/correlation.hpp"
#include "oprisk/sample_stats.hpp"

namespace oprisk {

// Monte-Carlo counterparts of the closed forms. Nothing here calls into the
// asrf formulas; the simulators draw from the generative model directly so
// they can serve as independent checks.

struct SimConfig {
    std::size_t n_cells = 1;
    std::size_t n_scenarios = 1;
    std::uint64_t seed = 0;
    bool antithetic = false;
    unsigned threads = 1; // 0 = hardware concurrency; results do not depend on it

    void validate() const;
};

struct ConstantSigma {
    double sigma;
};
struct NormalSigma {
    double mean;
    double var;
};
using SigmaLaw = std::variant<ConstantSigma, NormalSigma>;

struct ConstantLoading {
    double beta;
};
struct NormalLoading {
    double mean;
    double var;
};
struct UniformLoading {
    double mean;
    double var; // support mean +/- sqrt(3 var)
};
using LoadingLaw = std::variant<ConstantLoading, NormalLoading, UniformLoading>;

struct PopulationSpec {
    SigmaLaw sigma_law = ConstantSigma{1.07};
    LoadingLaw loading_law = ConstantLoading{0.31622776601683794};
    double mu = 0.0;

    void validate() const;

    /// The cell population whose infinitely granular limit is `model`.
    static PopulationSpec matching(const CapitalModel& model);
};

struct FixedFactor {
    double value;
};
struct RandomFactor {};
using Conditioning = std::variant<FixedFactor, RandomFactor>;

struct ScenarioResult {
    double factor = 0.0;
    double mean_cell_loss = 0.0;
    double std_error = 0.0;       // cross-sectional, of mean_cell_loss given factor
    std::uint64_t stream_id = 0;  // substream index; (seed, stream_id) reproduces it
    std::size_t rejected_loadings = 0; // |B| > 1 draws that were resampled
};

/// Each scenario draws its own factor (or uses the fixed one), then n_cells
/// independent (sigma_i, beta_i, eps_i) and averages the cell losses.
/// Scenario i uses substream i of cfg.seed only.
std::vector<ScenarioResult> simulate_portfolio(const PopulationSpec& pop, const SimConfig& cfg,
                                               const Conditioning& conditioning);

struct QuantileEstimate {
    double value = 0.0;
    std::size_t n_scenarios = 0;
    bool sufficient = true; // false when n_scenarios < 10 / (1 - q)
    std::string notice;
};

/// Empirical q-quantile of the average cell loss under a random factor.
QuantileEstimate portfolio_quantile(const PopulationSpec& pop, const SimConfig& cfg, Probability q);

struct BivariatePoissonSample {
    std::vector<double> counts1;
    std::vector<double> counts2;
    MeanAndError mean1;
    MeanAndError mean2;
    double corr = 0.0;
    double corr_se = 0.0;
    double target_corr = 0.0;
};

BivariatePoissonSample simulate_bivariate_poisson(const FrequencyPair& pair, std::size_t n_draws,
                                                  std::uint64_t seed);

struct CompoundLdaSample {
    std::vector<double> losses1;
    std::vector<double> losses2;
    MeanAndError mean1;
    MeanAndError mean2;
    double corr = 0.0;
    double corr_se = 0.0;
    double target_corr = 0.0; // corr(N1, N2) exp(-s1^2/2 - s2^2/2)
};

/// Annual losses of two cells whose counts share a common Poisson(r) shock.
/// Severities are independent across and within cells.
CompoundLdaSample simulate_compound_lda(const FrequencySeverityFit& fit1,
                                        const FrequencySeverityFit& fit2, double r,
                                        std::size_t n_years, std::uint64_t seed);

/// Synthetic event-level data: Poisson(lambda) events per cell per year with
/// LN(m, s) amounts, years first_year .. first_year + window_years - 1.
std::vector<LossEvent> simulate_loss_events(std::span<const FrequencySeverityFit> cells,
                                            int first_year, int window_years, std::uint64_t seed);

} // namespace oprisk
