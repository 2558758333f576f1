#include "oprisk/mcsim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "oprisk/random.hpp"

namespace oprisk {

void SimConfig::validate() const {
    OPRISK_REQUIRE(n_cells >= 1, "simulation needs at least one cell");
    OPRISK_REQUIRE(n_scenarios >= 1, "simulation needs at least one scenario");
}

namespace {

struct SigmaValidator {
    void operator()(const ConstantSigma& s) const {
        OPRISK_REQUIRE(std::isfinite(s.sigma) && s.sigma > 0.0, "population: sigma must be positive");
    }
    void operator()(const NormalSigma& s) const {
        OPRISK_REQUIRE(std::isfinite(s.mean) && s.mean > 0.0, "population: sigma mean must be positive");
        OPRISK_REQUIRE(std::isfinite(s.var) && s.var >= 0.0, "population: sigma variance must be >= 0");
    }
};

struct LoadingValidator {
    void operator()(const ConstantLoading& b) const {
        OPRISK_REQUIRE(std::isfinite(b.beta) && b.beta >= 0.0 && b.beta <= 1.0,
                       "population: loading must lie in [0, 1]");
    }
    void operator()(const NormalLoading& b) const {
        OPRISK_REQUIRE(std::isfinite(b.mean) && std::fabs(b.mean) <= 1.0,
                       "population: loading mean must lie in [-1, 1]");
        OPRISK_REQUIRE(std::isfinite(b.var) && b.var >= 0.0, "population: loading variance must be >= 0");
    }
    void operator()(const UniformLoading& b) const {
        OPRISK_REQUIRE(std::isfinite(b.mean) && std::fabs(b.mean) <= 1.0,
                       "population: loading mean must lie in [-1, 1]");
        OPRISK_REQUIRE(std::isfinite(b.var) && b.var >= 0.0, "population: loading variance must be >= 0");
        const double half = std::sqrt(3.0 * b.var);
        OPRISK_REQUIRE(b.mean - half < 1.0 && b.mean + half > -1.0,
                       "population: uniform loading support does not meet [-1, 1]");
    }
};

// Per-scenario samplers. Distribution objects are rebuilt per scenario so a
// scenario's draws depend on its own substream only.
class SigmaSampler {
public:
    explicit SigmaSampler(const SigmaLaw& law) {
        if (const auto* c = std::get_if<ConstantSigma>(&law)) {
            constant_ = c->sigma;
        } else {
            const auto& n = std::get<NormalSigma>(law);
            constant_ = n.mean;
            sd_ = std::sqrt(n.var);
        }
    }
    double operator()(Engine& rng) {
        if (sd_ == 0.0) return constant_;
        return constant_ + sd_ * normal_(rng);
    }

private:
    double constant_ = 0.0;
    double sd_ = 0.0;
    std::normal_distribution<double> normal_;
};

class LoadingSampler {
public:
    explicit LoadingSampler(const LoadingLaw& law) {
        if (const auto* c = std::get_if<ConstantLoading>(&law)) {
            mean_ = c->beta;
        } else if (const auto* n = std::get_if<NormalLoading>(&law)) {
            mean_ = n->mean;
            spread_ = std::sqrt(n->var);
        } else {
            const auto& u = std::get<UniformLoading>(law);
            mean_ = u.mean;
            spread_ = std::sqrt(3.0 * u.var);
            uniform_ = true;
        }
    }

    // Draws until |B| <= 1; counts the rejections.
    double operator()(Engine& rng, std::size_t& rejected) {
        if (spread_ == 0.0) return mean_;
        for (;;) {
            const double b = uniform_ ? mean_ + spread_ * (2.0 * unit_(rng) - 1.0)
                                      : mean_ + spread_ * normal_(rng);
            if (std::fabs(b) <= 1.0) return b;
            ++rejected;
        }
    }

private:
    double mean_ = 0.0;
    double spread_ = 0.0;
    bool uniform_ = false;
    std::normal_distribution<double> normal_;
    std::uniform_real_distribution<double> unit_;
};

ScenarioResult run_scenario(const PopulationSpec& pop, const SimConfig& cfg,
                            const Conditioning& conditioning, std::uint64_t index) {
    Engine rng = substream(cfg.seed, index);
    std::normal_distribution<double> normal;
    SigmaSampler sigma_of(pop.sigma_law);
    LoadingSampler loading_of(pop.loading_law);

    ScenarioResult r;
    r.stream_id = index;
    if (const auto* fixed = std::get_if<FixedFactor>(&conditioning))
        r.factor = fixed->value;
    else
        r.factor = normal(rng);

    auto loss = [&](double sigma, double beta, double eps) {
        return std::exp(pop.mu - sigma * (beta * r.factor + std::sqrt(1.0 - beta * beta) * eps));
    };

    // Welford over the independent units: single cells, or antithetic pairs.
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t units = 0;
    std::size_t cells = 0;
    double total = 0.0;
    auto push = [&](double x) {
        ++units;
        const double d = x - mean;
        mean += d / static_cast<double>(units);
        m2 += d * (x - mean);
    };
    while (cells < cfg.n_cells) {
        const double sigma = sigma_of(rng);
        const double beta = loading_of(rng, r.rejected_loadings);
        const double eps = normal(rng);
        if (cfg.antithetic && cells + 1 < cfg.n_cells) {
            const double a = loss(sigma, beta, eps);
            const double b = loss(sigma, beta, -eps);
            total += a + b;
            push(0.5 * (a + b));
            cells += 2;
        } else {
            const double a = loss(sigma, beta, eps);
            total += a;
            push(a);
            cells += 1;
        }
    }
    r.mean_cell_loss = total / static_cast<double>(cfg.n_cells);
    if (units > 1) {
        const double unit_var = m2 / static_cast<double>(units - 1);
        r.std_error = std::sqrt(unit_var / static_cast<double>(units));
    }
    return r;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
}

long poisson_draw(Engine& rng, double mean) {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<long>(mean)(rng);
}

} // namespace

void PopulationSpec::validate() const {
    OPRISK_REQUIRE(std::isfinite(mu), "population: mu must be finite");
    std::visit(SigmaValidator{}, sigma_law);
    std::visit(LoadingValidator{}, loading_law);
}

PopulationSpec PopulationSpec::matching(const CapitalModel& model) {
    PopulationSpec pop;
    if (const auto* h = std::get_if<HomogeneousModel>(&model)) {
        h->validate();
        pop.sigma_law = ConstantSigma{h->sigma};
        pop.loading_law = ConstantLoading{std::sqrt(h->rho)};
    } else if (const auto* s = std::get_if<HeteroSigmaModel>(&model)) {
        s->validate();
        pop.sigma_law = NormalSigma{s->sigma_mean, s->sigma_var};
        pop.loading_law = ConstantLoading{std::sqrt(s->rho)};
    } else {
        const auto& b = std::get<UncertainBetaModel>(model);
        b.validate();
        pop.sigma_law = ConstantSigma{b.sigma};
        if (b.law == BetaLaw::normal)
            pop.loading_law = NormalLoading{b.beta_mean, b.beta_var};
        else
            pop.loading_law = UniformLoading{b.beta_mean, b.beta_var};
    }
    return pop;
}

std::vector<ScenarioResult> simulate_portfolio(const PopulationSpec& pop, const SimConfig& cfg,
                                               const Conditioning& conditioning) {
    pop.validate();
    cfg.validate();
    if (const auto* fixed = std::get_if<FixedFactor>(&conditioning))
        OPRISK_REQUIRE(std::isfinite(fixed->value), "fixed factor must be finite");
    std::vector<ScenarioResult> out(cfg.n_scenarios);
    parallel_for(cfg.n_scenarios, cfg.threads,
                 [&](std::size_t i) { out[i] = run_scenario(pop, cfg, conditioning, i); });
    return out;
}

QuantileEstimate portfolio_quantile(const PopulationSpec& pop, const SimConfig& cfg, Probability q) {
    const auto scenarios = simulate_portfolio(pop, cfg, RandomFactor{});
    std::vector<double> means;
    means.reserve(scenarios.size());
    for (const auto& s : scenarios) means.push_back(s.mean_cell_loss);
    QuantileEstimate est;
    est.n_scenarios = cfg.n_scenarios;
    est.value = empirical_quantile(means, q.value());
    const double needed = 10.0 / (1.0 - q.value());
    if (static_cast<double>(cfg.n_scenarios) < needed) {
        est.sufficient = false;
        est.notice = "only " + std::to_string(cfg.n_scenarios) + " scenarios; at least " +
                     std::to_string(static_cast<std::size_t>(std::ceil(needed))) +
                     " recommended at this level";
    }
    return est;
}

BivariatePoissonSample simulate_bivariate_poisson(const FrequencyPair& pair, std::size_t n_draws,
                                                  std::uint64_t seed) {
    pair.validate();
    OPRISK_REQUIRE(n_draws >= 2, "need at least two draws");
    constexpr std::size_t kBlock = 4096;
    BivariatePoissonSample out;
    out.counts1.resize(n_draws);
    out.counts2.resize(n_draws);
    for (std::size_t start = 0; start < n_draws; start += kBlock) {
        Engine rng = substream(seed, start / kBlock);
        const std::size_t stop = std::min(n_draws, start + kBlock);
        for (std::size_t i = start; i < stop; ++i) {
            const long z = poisson_draw(rng, pair.r);
            const long y1 = poisson_draw(rng, pair.lambda1 - pair.r);
            const long y2 = poisson_draw(rng, pair.lambda2 - pair.r);
            out.counts1[i] = static_cast<double>(z + y1);
            out.counts2[i] = static_cast<double>(z + y2);
        }
    }
    out.mean1 = mean_and_error(out.counts1);
    out.mean2 = mean_and_error(out.counts2);
    out.corr = empirical_corr(out.counts1, out.counts2);
    out.corr_se = corr_standard_error(out.counts1, out.counts2);
    out.target_corr = pair.r / std::sqrt(pair.lambda1 * pair.lambda2);
    return out;
}

CompoundLdaSample simulate_compound_lda(const FrequencySeverityFit& fit1,
                                        const FrequencySeverityFit& fit2, double r,
                                        std::size_t n_years, std::uint64_t seed) {
    fit1.validate();
    fit2.validate();
    const FrequencyPair pair{fit1.lambda, fit2.lambda, r};
    pair.validate();
    OPRISK_REQUIRE(n_years >= 2, "need at least two simulated years");

    constexpr std::size_t kBlock = 4096;
    CompoundLdaSample out;
    out.losses1.resize(n_years);
    out.losses2.resize(n_years);
    for (std::size_t start = 0; start < n_years; start += kBlock) {
        Engine rng = substream(seed, start / kBlock);
        std::lognormal_distribution<double> sev1(fit1.m, fit1.s);
        std::lognormal_distribution<double> sev2(fit2.m, fit2.s);
        const std::size_t stop = std::min(n_years, start + kBlock);
        for (std::size_t i = start; i < stop; ++i) {
            const long z = poisson_draw(rng, r);
            const long n1 = z + poisson_draw(rng, fit1.lambda - r);
            const long n2 = z + poisson_draw(rng, fit2.lambda - r);
            double l1 = 0.0, l2 = 0.0;
            for (long k = 0; k < n1; ++k) l1 += sev1(rng);
            for (long k = 0; k < n2; ++k) l2 += sev2(rng);
            out.losses1[i] = l1;
            out.losses2[i] = l2;
        }
    }
    out.mean1 = mean_and_error(out.losses1);
    out.mean2 = mean_and_error(out.losses2);
    out.corr = empirical_corr(out.losses1, out.losses2);
    out.corr_se = corr_standard_error(out.losses1, out.losses2);
    out.target_corr = r / std::sqrt(fit1.lambda * fit2.lambda) *
                      std::exp(-0.5 * fit1.s * fit1.s - 0.5 * fit2.s * fit2.s);
    return out;
}

std::vector<LossEvent> simulate_loss_events(std::span<const FrequencySeverityFit> cells,
                                            int first_year, int window_years, std::uint64_t seed) {
    OPRISK_REQUIRE(window_years >= 1, "window must span at least one year");
    std::vector<LossEvent> events;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        const FrequencySeverityFit& fit = cells[c];
        fit.validate();
        Engine rng = substream(seed, c);
        std::lognormal_distribution<double> severity(fit.m, fit.s);
        for (int y = 0; y < window_years; ++y) {
            const long n = poisson_draw(rng, fit.lambda);
            for (long k = 0; k < n; ++k)
                events.push_back({fit.cell_id, first_year + y, severity(rng)});
        }
    }
    return events;
}

} // namespace oprisk
