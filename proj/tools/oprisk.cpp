// Command-line front end: calibrate, capital, figures, verify, corr.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "oprisk/cli/commands.hpp"

namespace {

using namespace oprisk;
using namespace oprisk::cli;

nlohmann::json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError("config " + path + ": " + e.what());
    }
}

template <typename T>
void overlay(nlohmann::json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

std::optional<std::filesystem::path> as_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return std::filesystem::path(s);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Analytical operational-risk capital models and their Monte-Carlo checks"};
    app.require_subcommand(1);

    // calibrate
    CalibrateOptions cal;
    std::optional<int> first_year;
    std::string cal_out = ".";
    auto* calibrate = app.add_subcommand("calibrate", "fit cells from loss events and imply aggregate sigmas");
    calibrate->add_option("input", cal.input, "loss events CSV (cell_id,year,amount)")->required();
    calibrate->add_option("--window-years", cal.window_years, "length of the observation window")->required();
    calibrate->add_option("--first-year", first_year, "first year of the window; rows outside are rejected");
    calibrate->add_option("--levels", cal.levels, "confidence levels")->delimiter(',');
    calibrate->add_option("--min-events", cal.min_events, "cells need more than this many events")
        ->capture_default_str();
    calibrate->add_option("--scenarios", cal.n_scenarios, "simulated years per cell")->capture_default_str();
    calibrate->add_option("--seed", cal.seed)->capture_default_str();
    calibrate->add_option("--out-dir", cal_out, "directory for cells.csv and summary.csv")->capture_default_str();

    // capital
    std::string cap_config;
    std::optional<std::string> cap_model, cap_law;
    std::optional<double> cap_q, cap_sigma, cap_rho, cap_v, cap_beta, cap_w, cap_rho_stdev;
    bool cap_json = false;
    std::string cap_out;
    auto* capital = app.add_subcommand("capital", "capital charge and diversification index");
    capital->add_option("--config", cap_config, "JSON configuration; flags override its keys");
    capital->add_option("--model", cap_model, "homogeneous | hetero_sigma | uncertain_beta");
    capital->add_option("--q", cap_q, "confidence level");
    capital->add_option("--sigma", cap_sigma, "cell sigma (mean for hetero_sigma)");
    capital->add_option("--rho", cap_rho, "copula correlation");
    capital->add_option("--v", cap_v, "variance of cell sigmas");
    capital->add_option("--beta", cap_beta, "mean factor loading");
    capital->add_option("--w", cap_w, "variance of factor loadings");
    capital->add_option("--rho-stdev", cap_rho_stdev, "stdev of pairwise correlations (sets w)");
    capital->add_option("--law", cap_law, "normal | uniform loading law");
    capital->add_flag("--json", cap_json, "print the JSON report instead of text");
    capital->add_option("--out", cap_out, "also write the JSON report here");

    // figures
    std::string fig_config, fig_out;
    std::optional<int> fig_which;
    std::optional<double> fig_gamma, fig_sigma, fig_rho, fig_beta2, fig_q;
    std::optional<std::size_t> fig_points;
    auto* figures = app.add_subcommand("figures", "emit curve data as CSV");
    figures->add_option("which", fig_which, "1: R-bound density, 2: DI vs sqrt(v), 3: capital ratio vs sqrt(w)");
    figures->add_option("--config", fig_config, "JSON with keys which, gamma, sigma, rho, beta2, q, points");
    figures->add_option("--gamma", fig_gamma);
    figures->add_option("--sigma", fig_sigma);
    figures->add_option("--rho", fig_rho);
    figures->add_option("--beta2", fig_beta2);
    figures->add_option("--q", fig_q);
    figures->add_option("--points", fig_points);
    figures->add_option("--out", fig_out, "CSV path (default stdout)");

    // verify
    std::string ver_suite = "all", ver_out;
    McBatteryOptions mc;
    auto* verify = app.add_subcommand("verify", "closed forms against quadrature and Monte-Carlo oracles");
    verify->add_option("--suite", ver_suite, "analytic | mc | all")
        ->check(CLI::IsMember({"analytic", "mc", "all"}))
        ->capture_default_str();
    verify->add_option("--seed", mc.seed)->capture_default_str();
    verify->add_option("--cells", mc.n_cells, "cells per Monte-Carlo portfolio")->capture_default_str();
    verify->add_option("--years", mc.n_years, "draws for the frequency/LDA checks")->capture_default_str();
    verify->add_option("--threads", mc.threads, "0 = all cores")->capture_default_str();
    verify->add_option("--out", ver_out, "JSON report path");

    // corr
    auto* corr = app.add_subcommand("corr", "correlation algebra utilities (JSON output)");
    corr->require_subcommand(1);
    double l1 = 0, l2 = 0;
    std::optional<double> common;
    auto* c_freq = corr->add_subcommand("freq", "common-shock Poisson count correlation and its bound");
    c_freq->add_option("--lambda1", l1)->required();
    c_freq->add_option("--lambda2", l2)->required();
    c_freq->add_option("--r", common, "common-shock intensity");

    double fc = 0, s1 = 0, s2 = 0;
    auto* c_loss = corr->add_subcommand("loss", "loss correlation from count correlation");
    c_loss->add_option("--freq-corr", fc)->required();
    c_loss->add_option("--s1", s1)->required();
    c_loss->add_option("--s2", s2)->required();

    double gamma = 2.35;
    std::optional<double> rb_rho;
    auto* c_rbound = corr->add_subcommand("rbound", "law of the correlation bound R");
    c_rbound->add_option("--gamma", gamma)->capture_default_str();
    c_rbound->add_option("--rho", rb_rho, "evaluate cdf and pdf here");

    double si = 0, sj = 0;
    std::optional<double> rho_ij, loss_corr;
    auto* c_copula = corr->add_subcommand("copula", "Gaussian-copula parameter <-> lognormal loss correlation");
    c_copula->add_option("--sigma-i", si)->required();
    c_copula->add_option("--sigma-j", sj)->required();
    c_copula->add_option("--rho-ij", rho_ij);
    c_copula->add_option("--loss-corr", loss_corr);

    std::optional<double> ld_beta, ld_rho, ld_var, ld_stdev, ld_w;
    auto* c_loading = corr->add_subcommand("loading", "variance of factor loadings <-> variance of rho_ij");
    c_loading->add_option("--beta", ld_beta);
    c_loading->add_option("--rho", ld_rho, "mean correlation; beta = sqrt(rho)");
    c_loading->add_option("--rho-var", ld_var);
    c_loading->add_option("--rho-stdev", ld_stdev);
    c_loading->add_option("--w", ld_w);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidationError;
    }

    try {
        if (*calibrate) {
            cal.first_year = first_year;
            cal.out_dir = cal_out;
            return cmd_calibrate(cal, std::cout, std::cerr);
        }
        if (*capital) {
            CapitalConfig config;
            if (!cap_config.empty()) config.merge(read_json(cap_config));
            nlohmann::json flags = nlohmann::json::object();
            overlay(flags, "model", cap_model);
            overlay(flags, "law", cap_law);
            overlay(flags, "q", cap_q);
            overlay(flags, "sigma", cap_sigma);
            overlay(flags, "rho", cap_rho);
            overlay(flags, "v", cap_v);
            overlay(flags, "beta", cap_beta);
            overlay(flags, "w", cap_w);
            overlay(flags, "rho_stdev", cap_rho_stdev);
            config.merge(flags);
            return cmd_capital(config, cap_json, as_path(cap_out), std::cout, std::cerr);
        }
        if (*figures) {
            FigureOptions opt;
            nlohmann::json j = fig_config.empty() ? nlohmann::json::object() : read_json(fig_config);
            overlay(j, "which", fig_which);
            overlay(j, "gamma", fig_gamma);
            overlay(j, "sigma", fig_sigma);
            overlay(j, "rho", fig_rho);
            overlay(j, "beta2", fig_beta2);
            overlay(j, "q", fig_q);
            overlay(j, "points", fig_points);
            for (const auto& [k, v] : j.items()) {
                if (k == "which") opt.which = v.get<int>();
                else if (k == "gamma") opt.gamma = v.get<double>();
                else if (k == "sigma") opt.sigma = v.get<double>();
                else if (k == "rho") opt.rho = v.get<double>();
                else if (k == "beta2") opt.beta2 = v.get<double>();
                else if (k == "q") opt.q = v.get<double>();
                else if (k == "points") opt.points = v.get<std::size_t>();
                else throw ValidationError("figures config: unknown key '" + k + "'");
            }
            return cmd_figures(opt, as_path(fig_out), std::cout, std::cerr);
        }
        if (*verify) {
            const VerifySuite suite = ver_suite == "analytic" ? VerifySuite::analytic
                                      : ver_suite == "mc"     ? VerifySuite::mc
                                                              : VerifySuite::all;
            return cmd_verify(suite, mc, as_path(ver_out), std::cout, std::cerr);
        }
        nlohmann::json result;
        if (*c_freq) {
            result = corr_frequency(l1, l2, common);
        } else if (*c_loss) {
            result = corr_loss(fc, s1, s2);
        } else if (*c_rbound) {
            result = corr_rbound(gamma, rb_rho);
        } else if (*c_copula) {
            result = corr_copula(si, sj, rho_ij, loss_corr);
        } else if (*c_loading) {
            if (ld_beta && ld_rho) throw ValidationError("corr loading: give --beta or --rho, not both");
            if (!ld_beta && !ld_rho) throw ValidationError("corr loading: --beta or --rho is required");
            if (ld_var && ld_stdev) throw ValidationError("corr loading: give --rho-var or --rho-stdev, not both");
            const double beta = ld_beta ? *ld_beta : std::sqrt(*ld_rho);
            std::optional<double> var = ld_var;
            if (ld_stdev) var = *ld_stdev * *ld_stdev;
            result = corr_loading_variance(beta, var, ld_w);
        }
        std::cout << result.dump(2) << '\n';
        return kOk;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kIoError;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationError;
    }
}
