#include "oprisk/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "oprisk/correlation.hpp"
#include "oprisk/format.hpp"
#include "oprisk/loss_data.hpp"
#include "oprisk/random.hpp"

namespace oprisk::cli {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out = open_output(path);
    out << content;
    if (!out) throw IoError("failed writing " + path.string());
}

std::string percent(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
    return buf;
}

} // namespace

// ---- calibrate ------------------------------------------------------------

std::string level_column(double q) {
    static_cast<void>(Probability{q});
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", q);
    std::string s(buf);
    const auto dot = s.find('.');
    return "sigma_q" + (dot == std::string::npos ? s : s.substr(dot + 1));
}

CalibrationRun run_calibration(const std::vector<LossEvent>& events, const CalibrateOptions& opt) {
    OPRISK_REQUIRE(!opt.levels.empty(), "calibrate: at least one confidence level is required");
    std::vector<Probability> levels;
    for (double q : opt.levels) {
        levels.emplace_back(q);
        OPRISK_REQUIRE(q > 0.5, "calibrate: confidence levels must exceed 0.5");
    }
    OPRISK_REQUIRE(opt.n_scenarios >= 2, "calibrate: need at least 2 scenarios");

    std::map<std::string, std::size_t> counts;
    for (const LossEvent& e : events) ++counts[e.cell_id];

    CalibrationRun run;
    std::size_t cell_index = 0;
    for (const auto& [cell, n] : counts) {
        const std::size_t index = cell_index++;
        if (n <= opt.min_events || n < 2) {
            run.excluded.push_back("cell " + cell + ": " + std::to_string(n) +
                                   " events, needs more than " + std::to_string(opt.min_events));
            continue;
        }
        FrequencySeverityFit fit = fit_frequency_severity(events, cell, opt.window_years);
        if (!(fit.s > 0.0)) {
            run.excluded.push_back("cell " + cell + ": all amounts equal, severity scale is zero");
            continue;
        }
        const std::uint64_t cell_seed = splitmix64(opt.seed ^ splitmix64(index));
        run.sigmas.push_back(implied_aggregate_sigmas(fit, levels, opt.n_scenarios, cell_seed));
        run.fits.push_back(std::move(fit));
    }
    OPRISK_REQUIRE(!run.fits.empty(), "calibrate: no cell has enough events");

    std::vector<double> pooled;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        std::vector<double> at_level;
        for (const auto& cell : run.sigmas)
            if (cell[l].feasible) at_level.push_back(cell[l].sigma);
        if (at_level.empty()) continue;
        pooled.insert(pooled.end(), at_level.begin(), at_level.end());
        char label[32];
        std::snprintf(label, sizeof label, "%.10g", opt.levels[l]);
        run.summary_rows.emplace_back(label, summarize_sigmas(at_level));
    }
    if (!pooled.empty()) {
        run.summary_rows.emplace_back("All", summarize_sigmas(pooled));
        // Cross-cell dispersion only: each cell contributes its level-average.
        std::vector<double> per_cell;
        for (const auto& cell : run.sigmas) {
            double sum = 0.0;
            std::size_t n = 0;
            for (const auto& a : cell)
                if (a.feasible) {
                    sum += a.sigma;
                    ++n;
                }
            if (n > 0) per_cell.push_back(sum / static_cast<double>(n));
        }
        run.summary_rows.emplace_back("All_cell_average", summarize_sigmas(per_cell));
    }

    if (run.fits.size() >= 2) {
        std::vector<double> lambdas;
        for (const auto& f : run.fits) lambdas.push_back(f.lambda);
        run.intensity = estimate_gamma(lambdas);
    }
    return run;
}

void write_cells_csv(std::ostream& out, const CalibrationRun& run, const std::vector<double>& levels) {
    out << "cell_id,n_events,lambda,m,s";
    for (double q : levels) out << ',' << level_column(q);
    out << '\n';
    for (std::size_t i = 0; i < run.fits.size(); ++i) {
        const auto& f = run.fits[i];
        out << f.cell_id << ',' << f.n_events << ',' << format_real(f.lambda) << ','
            << format_real(f.m) << ',' << format_real(f.s);
        for (const auto& a : run.sigmas[i]) {
            out << ',';
            if (a.feasible) out << format_real(a.sigma);
        }
        out << '\n';
    }
}

void write_summary_csv(std::ostream& out, const CalibrationRun& run) {
    out << "level,mean,stdev,median,medmed,count\n";
    for (const auto& [label, s] : run.summary_rows) {
        out << label << ',' << format_real(s.mean) << ',' << format_real(s.stdev) << ','
            << format_real(s.median) << ',' << format_real(s.medmed) << ',' << s.count << '\n';
    }
}

int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out, std::ostream& err) {
    const auto events = read_loss_events(opt.input, ObservationWindow{opt.window_years, opt.first_year});
    const CalibrationRun run = run_calibration(events, opt);

    std::ostringstream cells, summary;
    write_cells_csv(cells, run, opt.levels);
    write_summary_csv(summary, run);

    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) throw IoError("cannot create output directory " + opt.out_dir.string());
    write_file(opt.out_dir / "cells.csv", cells.str());
    write_file(opt.out_dir / "summary.csv", summary.str());

    for (const auto& note : run.excluded) err << "excluded " << note << '\n';
    for (std::size_t i = 0; i < run.fits.size(); ++i)
        for (const auto& a : run.sigmas[i])
            if (!a.feasible)
                err << "cell " << a.cell_id << " q=" << a.q << ": " << a.failure << '\n';

    out << "calibrated " << run.fits.size() << " cell(s) from " << events.size() << " events\n";
    out << "level      mean     stdev    median    medmed  count\n";
    for (const auto& [label, s] : run.summary_rows) {
        char line[160];
        std::snprintf(line, sizeof line, "%-16s %8.4f %8.4f %8.4f %8.4f  %zu\n", label.c_str(),
                      s.mean, s.stdev, s.median, s.medmed, s.count);
        out << line;
    }
    if (run.intensity) {
        out << "log-intensity: alpha=" << run.intensity->model.alpha
            << " gamma=" << run.intensity->model.gamma << " skewness=" << run.intensity->skewness
            << " excess_kurtosis=" << run.intensity->excess_kurtosis << '\n';
    }
    out << "wrote " << (opt.out_dir / "cells.csv").string() << " and "
        << (opt.out_dir / "summary.csv").string() << '\n';
    return kOk;
}

// ---- capital ----------------------------------------------------------------

namespace {

double number_at(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    OPRISK_REQUIRE(v.is_number(), std::string("config: '") + key + "' must be a number");
    return v.get<double>();
}

std::string string_at(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    OPRISK_REQUIRE(v.is_string(), std::string("config: '") + key + "' must be a string");
    return v.get<std::string>();
}

} // namespace

void CapitalConfig::merge(const nlohmann::json& j) {
    OPRISK_REQUIRE(j.is_object(), "config: expected a JSON object");
    static const std::set<std::string> known{"model", "q", "sigma", "rho", "v",
                                             "beta", "w", "rho_stdev", "law"};
    for (const auto& [key, value] : j.items())
        OPRISK_REQUIRE(known.count(key) == 1, "config: unknown key '" + key + "'");
    if (j.contains("model")) model = string_at(j, "model");
    if (j.contains("law")) law = string_at(j, "law");
    if (j.contains("q")) q = number_at(j, "q");
    if (j.contains("sigma")) sigma = number_at(j, "sigma");
    if (j.contains("rho")) rho = number_at(j, "rho");
    if (j.contains("v")) v = number_at(j, "v");
    if (j.contains("beta")) beta = number_at(j, "beta");
    if (j.contains("w")) w = number_at(j, "w");
    if (j.contains("rho_stdev")) rho_stdev = number_at(j, "rho_stdev");
}

CapitalConfig CapitalConfig::from_json(const nlohmann::json& j) {
    CapitalConfig c;
    c.merge(j);
    return c;
}

CapitalModel CapitalConfig::to_model() const {
    static_cast<void>(Probability{q});
    if (model == "homogeneous") {
        HomogeneousModel m{sigma, rho.value_or(0.1)};
        m.validate();
        return m;
    }
    if (model == "hetero_sigma") {
        HeteroSigmaModel m{sigma, v.value_or(0.0), rho.value_or(0.1)};
        m.validate();
        return m;
    }
    if (model == "uncertain_beta") {
        OPRISK_REQUIRE(law == "normal" || law == "uniform", "config: law must be 'normal' or 'uniform'");
        OPRISK_REQUIRE(!(w && rho_stdev), "config: give either w or rho_stdev, not both");
        UncertainBetaModel m;
        m.sigma = sigma;
        m.beta_mean = beta ? *beta : std::sqrt(rho.value_or(0.1));
        if (w)
            m.beta_var = *w;
        else if (rho_stdev)
            m.beta_var = w_from_rho_variance(m.beta_mean, *rho_stdev * *rho_stdev);
        m.law = law == "normal" ? BetaLaw::normal : BetaLaw::uniform;
        m.validate();
        return m;
    }
    throw ValidationError("config: unknown model '" + model +
                          "' (expected homogeneous, hetero_sigma or uncertain_beta)");
}

nlohmann::json capital_report(const CapitalConfig& config) {
    const CapitalModel model = config.to_model();
    const Probability q{config.q};
    const CapitalReport report = diversification_index(model, q);

    nlohmann::json j;
    nlohmann::json params;
    nlohmann::json thresholds = nlohmann::json::object();
    nlohmann::json warnings = nlohmann::json::array();
    std::optional<double> baseline_loss;
    std::string baseline_desc;

    if (const auto* h = std::get_if<HomogeneousModel>(&model)) {
        params = {{"model", "homogeneous"}, {"sigma", h->sigma}, {"rho", h->rho}};
        if (h->rho < 1.0) thresholds["superadditivity_sigma"] = superadditivity_threshold(h->rho, q);
        thresholds["closed_form_diversification_index"] =
            homogeneous_diversification_index(h->sigma, h->rho, q);
    } else if (const auto* s = std::get_if<HeteroSigmaModel>(&model)) {
        params = {{"model", "hetero_sigma"}, {"sigma", s->sigma_mean}, {"v", s->sigma_var}, {"rho", s->rho}};
        const auto fstar = monotonicity_threshold(s->sigma_mean, s->sigma_var, s->rho);
        thresholds["monotonicity_factor"] = fstar ? nlohmann::json(*fstar) : nlohmann::json(nullptr);
        if (fstar && *fstar <= report.factor_quantile)
            warnings.push_back("F_q lies beyond the monotonicity threshold F*");
        baseline_loss = conditional_loss_homogeneous({s->sigma_mean, s->rho}, report.factor_quantile);
        baseline_desc = "v = 0";
    } else {
        const auto& b = std::get<UncertainBetaModel>(model);
        params = {{"model", "uncertain_beta"},
                  {"sigma", b.sigma},
                  {"beta", b.beta_mean},
                  {"w", b.beta_var},
                  {"law", b.law == BetaLaw::normal ? "normal" : "uniform"}};
        if (config.rho_stdev) params["rho_stdev"] = *config.rho_stdev;
        for (auto& msg : b.warnings()) warnings.push_back(msg);
        baseline_loss =
            conditional_loss_homogeneous({b.sigma, b.beta_mean * b.beta_mean}, report.factor_quantile);
        baseline_desc = "w = 0";
    }

    j["model"] = params;
    j["q"] = report.q;
    j["factor_quantile"] = report.factor_quantile;
    j["conditional_loss_at_fq"] = report.conditional_loss_at_fq;
    j["stand_alone_expectation"] = report.stand_alone_expectation;
    j["diversification_index"] = report.diversification_index;
    j["thresholds"] = thresholds;
    if (baseline_loss) {
        j["baseline"] = {{"description", baseline_desc},
                         {"conditional_loss_at_fq", *baseline_loss},
                         {"capital_ratio", report.conditional_loss_at_fq / *baseline_loss}};
    }
    j["warnings"] = warnings;
    return j;
}

int cmd_capital(const CapitalConfig& config, bool json_output,
                const std::optional<std::filesystem::path>& out_path, std::ostream& out,
                std::ostream& err) {
    const nlohmann::json j = capital_report(config);
    if (out_path) write_file(*out_path, j.dump(2) + "\n");
    for (const auto& w : j["warnings"]) err << "warning: " << w.get<std::string>() << '\n';
    if (json_output) {
        out << j.dump(2) << '\n';
        return kOk;
    }
    out << "model                    " << j["model"]["model"].get<std::string>() << '\n';
    for (const auto& [k, v] : j["model"].items())
        if (k != "model") out << "  " << k << " = " << v.dump() << '\n';
    out << "q                        " << format_real(j["q"]) << '\n';
    out << "F_q                      " << format_real(j["factor_quantile"]) << '\n';
    out << "L(F_q) per cell          " << format_real(j["conditional_loss_at_fq"]) << '\n';
    out << "stand-alone per cell     " << format_real(j["stand_alone_expectation"]) << '\n';
    out << "diversification index    " << percent(j["diversification_index"]) << '\n';
    for (const auto& [k, v] : j["thresholds"].items())
        out << k << " = " << (v.is_null() ? std::string("not applicable") : format_real(v)) << '\n';
    if (j.contains("baseline")) {
        const double ratio = j["baseline"]["capital_ratio"];
        out << "capital vs " << j["baseline"]["description"].get<std::string>() << ": x"
            << format_real(ratio) << " (" << (ratio >= 1.0 ? "+" : "") << percent(ratio - 1.0) << ")\n";
    }
    return kOk;
}

// ---- figures ----------------------------------------------------------------

CurveSeries figure_series(const FigureOptions& opt) {
    const Probability q{opt.q};
    switch (opt.which) {
    case 1: {
        const RBoundLaw law{opt.gamma};
        law.validate();
        const std::size_t n = opt.points ? opt.points : 200;
        CurveSeries series;
        series.columns = {"rho", "pdf"};
        for (double rho : linear_grid(1.0 / static_cast<double>(n), 1.0, n))
            series.points.push_back({rho, {r_bound_pdf(rho, law)}});
        return series;
    }
    case 2: {
        const auto grid = linear_grid(0.0, 0.5, opt.points ? opt.points : 101);
        return diversification_curve(opt.sigma, opt.rho, q, grid);
    }
    case 3: {
        const auto grid = linear_grid(0.0, 0.1, opt.points ? opt.points : 101);
        return correlation_dispersion_curve(opt.sigma, opt.beta2, q, grid);
    }
    default:
        throw ValidationError("figures: figure must be 1, 2 or 3");
    }
}

void write_curve_csv(std::ostream& out, const CurveSeries& series) {
    for (std::size_t i = 0; i < series.columns.size(); ++i)
        out << (i ? "," : "") << series.columns[i];
    out << '\n';
    for (const auto& p : series.points) {
        out << format_real(p.x);
        for (double y : p.y) out << ',' << format_real(y);
        out << '\n';
    }
}

int cmd_figures(const FigureOptions& opt, const std::optional<std::filesystem::path>& out_path,
                std::ostream& out, std::ostream& err) {
    const CurveSeries series = figure_series(opt);
    for (const auto& n : series.notices) err << "notice: " << n << '\n';
    std::ostringstream csv;
    write_curve_csv(csv, series);
    if (out_path)
        write_file(*out_path, csv.str());
    else
        out << csv.str();
    return kOk;
}

// ---- verify -----------------------------------------------------------------

int cmd_verify(VerifySuite suite, const McBatteryOptions& mc,
               const std::optional<std::filesystem::path>& out_path, std::ostream& out,
               std::ostream& err, const ClosedForms& forms) {
    VerifyReport report;
    auto summarize = [&](const char* name, const VerifyReport& part) {
        out << name << ": " << part.checks.size() - part.failures() << "/" << part.checks.size()
            << " checks passed\n";
        for (const auto& c : part.checks)
            if (!c.passed)
                err << "FAIL " << c.suite << " " << c.name << ": value " << format_real(c.value)
                    << " target " << format_real(c.target) << " tolerance "
                    << format_real(c.tolerance) << '\n';
        report.append(part);
    };
    if (suite == VerifySuite::analytic || suite == VerifySuite::all)
        summarize("analytic", run_analytic_battery(forms));
    if (suite == VerifySuite::mc || suite == VerifySuite::all)
        summarize("mc", run_mc_battery(mc, forms));

    nlohmann::json j = report.to_json();
    j["seed"] = mc.seed;
    if (out_path) write_file(*out_path, j.dump(2) + "\n");
    out << (report.all_passed() ? "verification passed" : "verification FAILED") << '\n';
    return report.all_passed() ? kOk : kVerificationFailure;
}

// ---- corr -------------------------------------------------------------------

nlohmann::json corr_frequency(double lambda1, double lambda2, std::optional<double> r) {
    nlohmann::json j{{"lambda1", lambda1}, {"lambda2", lambda2},
                     {"bound", freq_corr_bound(lambda1, lambda2)}};
    if (r) {
        j["r"] = *r;
        j["freq_corr"] = freq_corr(FrequencyPair{lambda1, lambda2, *r});
    }
    return j;
}

nlohmann::json corr_loss(double fc, double s1, double s2) {
    return {{"freq_corr", fc}, {"s1", s1}, {"s2", s2},
            {"loss_corr", loss_corr_from_freq_corr(fc, s1, s2)}};
}

nlohmann::json corr_rbound(double gamma, std::optional<double> rho) {
    const RBoundLaw law{gamma};
    nlohmann::json j{{"gamma", gamma}, {"mean", r_bound_mean(law)}};
    if (rho) {
        j["rho"] = *rho;
        j["cdf"] = r_bound_cdf(*rho, law);
        j["pdf"] = r_bound_pdf(*rho, law);
    }
    return j;
}

nlohmann::json corr_copula(double sigma_i, double sigma_j, std::optional<double> rho_ij,
                           std::optional<double> loss_corr) {
    OPRISK_REQUIRE(rho_ij.has_value() != loss_corr.has_value(),
                   "corr copula: give exactly one of rho_ij or loss_corr");
    nlohmann::json j{{"sigma_i", sigma_i}, {"sigma_j", sigma_j}};
    if (rho_ij) {
        j["rho_ij"] = *rho_ij;
        j["loss_corr"] = loss_corr_from_copula(CopulaPair{sigma_i, sigma_j, *rho_ij});
    } else {
        j["loss_corr"] = *loss_corr;
        j["rho_ij"] = copula_from_loss_corr(*loss_corr, sigma_i, sigma_j);
    }
    return j;
}

nlohmann::json corr_loading_variance(double beta, std::optional<double> var_rho,
                                     std::optional<double> w) {
    OPRISK_REQUIRE(var_rho.has_value() != w.has_value(),
                   "corr loading: give exactly one of the rho variance or w");
    nlohmann::json j{{"beta", beta}};
    if (var_rho) {
        const double wv = w_from_rho_variance(beta, *var_rho);
        j["var_rho"] = *var_rho;
        j["w"] = wv;
        j["beta_stdev"] = std::sqrt(wv);
    } else {
        j["w"] = *w;
        j["var_rho"] = rho_variance_from_w(beta, *w);
        j["beta_stdev"] = std::sqrt(*w);
    }
    return j;
}

} // namespace oprisk::cli
