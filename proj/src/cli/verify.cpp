#include "oprisk/cli/verify.hpp"

#include <cmath>
#include <sstream>

#include "oprisk/mcsim.hpp"

namespace oprisk::cli {

bool VerifyReport::all_passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
    std::size_t n = 0;
    for (const auto& c : checks)
        if (!c.passed) ++n;
    return n;
}

void VerifyReport::append(const VerifyReport& other) {
    checks.insert(checks.end(), other.checks.begin(), other.checks.end());
}

nlohmann::json VerifyReport::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : checks) {
        arr.push_back({{"suite", c.suite},
                       {"name", c.name},
                       {"value", c.value},
                       {"target", c.target},
                       {"tolerance", c.tolerance},
                       {"deviation", std::fabs(c.value - c.target)},
                       {"passed", c.passed}});
    }
    return {{"checks", arr},
            {"total", checks.size()},
            {"failures", failures()},
            {"passed", all_passed()}};
}

namespace {

constexpr double kRelTol = 1e-8;

std::string label(std::initializer_list<std::pair<const char*, double>> params) {
    std::ostringstream os;
    os.precision(6);
    bool first = true;
    for (const auto& [k, v] : params) {
        os << (first ? "" : ",") << k << "=" << v;
        first = false;
    }
    return os.str();
}

void add_relative(VerifyReport& report, const std::string& suite, const std::string& name,
                  double closed_form, double oracle) {
    CheckResult c;
    c.suite = suite;
    c.name = name;
    c.value = closed_form;
    c.target = oracle;
    c.tolerance = kRelTol * std::fabs(oracle);
    c.passed = std::isfinite(closed_form) && std::fabs(closed_form - oracle) <= c.tolerance;
    report.checks.push_back(c);
}

void add_band(VerifyReport& report, const std::string& name, double value, double target,
              double tolerance) {
    CheckResult c;
    c.suite = "mc";
    c.name = name;
    c.value = value;
    c.target = target;
    c.tolerance = tolerance;
    c.passed = std::isfinite(value) && std::fabs(value - target) <= tolerance;
    report.checks.push_back(c);
}

constexpr double kFactors[] = {-5.0, -3.09, -1.0, 0.0, 1.0};
constexpr double kSigmas[] = {0.5, 1.07, 2.0};
constexpr double kRhos[] = {0.05, 0.1, 0.3};
constexpr double kSigmaVars[] = {0.0, 0.03, 0.18};
constexpr double kLoadingVars[] = {0.0, 0.0044, 0.01};

} // namespace

VerifyReport run_analytic_battery(const ClosedForms& forms) {
    VerifyReport report;
    const QuadratureSpec spec{};
    for (double f : kFactors) {
        for (double s : kSigmas) {
            for (double rho : kRhos) {
                // Homogeneous: expectation over the idiosyncratic factor.
                const double beta = std::sqrt(rho);
                const double idio = std::sqrt(1.0 - rho);
                const double hom_oracle = integrate_gaussian_weighted(
                    [&](double e) { return std::exp(-s * (beta * f + idio * e)); }, spec);
                add_relative(report, "analytic",
                             "homogeneous[" + label({{"F", f}, {"sigma", s}, {"rho", rho}}) + "]",
                             forms.homogeneous(HomogeneousModel{s, rho}, f), hom_oracle);

                // Heterogeneous sigma: expectation over Sigma ~ N(s, v).
                for (double v : kSigmaVars) {
                    const double sd = std::sqrt(v);
                    const double oracle = integrate_gaussian_weighted(
                        [&](double t) {
                            const double x = s + sd * t;
                            return std::exp(-x * beta * f + 0.5 * (1.0 - rho) * x * x);
                        },
                        spec);
                    add_relative(report, "analytic",
                                 "hetero_sigma[" +
                                     label({{"F", f}, {"sigma", s}, {"rho", rho}, {"v", v}}) + "]",
                                 forms.hetero_sigma(HeteroSigmaModel{s, v, rho}, f), oracle);
                }

                // Uncertain loading: expectation over B, normal and uniform laws.
                for (double w : kLoadingVars) {
                    const std::string tag =
                        label({{"F", f}, {"sigma", s}, {"beta2", rho}, {"w", w}});
                    const UncertainBetaModel normal{s, beta, w, BetaLaw::normal};
                    const UncertainBetaModel uniform{s, beta, w, BetaLaw::uniform};
                    if (w > 0.0) {
                        add_relative(report, "analytic", "uncertain_beta_normal[" + tag + "]",
                                     forms.uncertain_beta(normal, f),
                                     conditional_loss_generic(s, normal_loading_density(beta, w), f, spec));
                        add_relative(report, "analytic", "uncertain_beta_uniform[" + tag + "]",
                                     forms.uncertain_beta(uniform, f),
                                     conditional_loss_generic(s, uniform_loading_density(beta, w), f, spec));
                    } else {
                        // Degenerate loading: compare with the homogeneous oracle integral.
                        add_relative(report, "analytic", "uncertain_beta_normal[" + tag + "]",
                                     forms.uncertain_beta(normal, f), hom_oracle);
                        add_relative(report, "analytic", "uncertain_beta_uniform[" + tag + "]",
                                     forms.uncertain_beta(uniform, f), hom_oracle);
                    }
                }
            }
        }
    }
    return report;
}

VerifyReport run_mc_battery(const McBatteryOptions& options, const ClosedForms& forms) {
    VerifyReport report;
    const double k = options.n_standard_errors;
    const double fq = FactorQuantile::at_confidence(Probability(0.999)).value;
    const double beta = std::sqrt(0.1);

    struct Family {
        std::string name;
        CapitalModel model;
        double closed_form;
    };
    const HomogeneousModel hom{1.07, 0.1};
    const HeteroSigmaModel het{1.07, 0.1764, 0.1};
    const UncertainBetaModel nrm{1.07, beta, 0.0044, BetaLaw::normal};
    const UncertainBetaModel uni{1.07, beta, 0.0044, BetaLaw::uniform};
    const Family families[] = {
        {"homogeneous", hom, forms.homogeneous(hom, fq)},
        {"hetero_sigma", het, forms.hetero_sigma(het, fq)},
        {"uncertain_beta_normal", nrm, forms.uncertain_beta(nrm, fq)},
        {"uncertain_beta_uniform", uni, forms.uncertain_beta(uni, fq)},
    };

    std::uint64_t stream = 0;
    for (const Family& fam : families) {
        SimConfig cfg;
        cfg.n_cells = options.n_cells;
        cfg.n_scenarios = 1;
        cfg.seed = options.seed + 1000 * ++stream;
        cfg.threads = options.threads;
        const auto res =
            simulate_portfolio(PopulationSpec::matching(fam.model), cfg, FixedFactor{fq}).front();
        add_band(report, "portfolio_mean[" + fam.name + ",F=F_q]", res.mean_cell_loss,
                 fam.closed_form, k * res.std_error);
    }

    const auto pois = simulate_bivariate_poisson(FrequencyPair{1.0, 4.0, 1.0}, options.n_years,
                                                 options.seed + 1000 * ++stream);
    add_band(report, "bivariate_poisson_corr[1,4,1]", pois.corr, pois.target_corr, k * pois.corr_se);
    add_band(report, "bivariate_poisson_mean1[1,4,1]", pois.mean1.mean, 1.0, k * pois.mean1.std_error);
    add_band(report, "bivariate_poisson_mean2[1,4,1]", pois.mean2.mean, 4.0, k * pois.mean2.std_error);

    const FrequencySeverityFit cell{"cell", 20.0, 0.0, 1.5, 0};
    const auto lda = simulate_compound_lda(cell, cell, 7.7, options.n_years,
                                           options.seed + 1000 * ++stream);
    add_band(report, "compound_lda_corr[20,20,7.7,s=1.5]", lda.corr, lda.target_corr,
             k * lda.corr_se);
    const double lda_mean = 20.0 * std::exp(0.5 * 1.5 * 1.5);
    add_band(report, "compound_lda_mean[20,s=1.5]", lda.mean1.mean, lda_mean,
             k * lda.mean1.std_error);
    return report;
}

} // namespace oprisk::cli
