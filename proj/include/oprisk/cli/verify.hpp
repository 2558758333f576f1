#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oprisk/asrf.hpp"

namespace oprisk::cli {

/// One band check: |value - target| <= tolerance.
struct CheckResult {
    std::string suite;
    std::string name;
    double value = 0.0;
    double target = 0.0;
    double tolerance = 0.0;
    bool passed = false;
};

struct VerifyReport {
    std::vector<CheckResult> checks;

    bool all_passed() const;
    std::size_t failures() const;
    void append(const VerifyReport& other);
    nlohmann::json to_json() const;
};

/// The closed forms under test. Swappable so the batteries can be shown to
/// catch a perturbed formula.
struct ClosedForms {
    std::function<double(const HomogeneousModel&, double)> homogeneous = conditional_loss_homogeneous;
    std::function<double(const HeteroSigmaModel&, double)> hetero_sigma = conditional_loss_hetero_sigma;
    std::function<double(const UncertainBetaModel&, double)> uncertain_beta =
        conditional_loss_uncertain_beta;
};

/// Closed forms against adaptive quadrature of their defining integrals over
/// the standard parameter grid, at 1e-8 relative.
VerifyReport run_analytic_battery(const ClosedForms& forms = {});

struct McBatteryOptions {
    std::uint64_t seed = 20140404;
    std::size_t n_cells = 1'000'000;
    std::size_t n_years = 1'000'000; // compound-LDA and bivariate-Poisson draws
    double n_standard_errors = 4.0;
    unsigned threads = 0;
};

/// Closed forms against Monte-Carlo estimates within n standard errors.
VerifyReport run_mc_battery(const McBatteryOptions& options, const ClosedForms& forms = {});

} // namespace oprisk::cli
