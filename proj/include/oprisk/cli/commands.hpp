#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oprisk/asrf.hpp"
#include "oprisk/calibration.hpp"
#include "oprisk/cli/verify.hpp"

namespace oprisk::cli {

enum ExitCode : int { kOk = 0, kValidationError = 1, kVerificationFailure = 2, kIoError = 3 };

// ---- calibrate ------------------------------------------------------------

struct CalibrateOptions {
    std::filesystem::path input;
    int window_years = 1;
    std::optional<int> first_year;
    std::vector<double> levels{0.95, 0.975, 0.99, 0.995, 0.999};
    std::size_t min_events = 30; // cells need strictly more events than this
    std::size_t n_scenarios = 100'000;
    std::uint64_t seed = 1;
    std::filesystem::path out_dir = ".";
};

struct CalibrationRun {
    std::vector<FrequencySeverityFit> fits;
    std::vector<std::vector<AggregateSigma>> sigmas; // per fit, per level
    std::vector<std::string> excluded;               // notices for dropped cells
    std::vector<std::pair<std::string, SigmaSummary>> summary_rows;
    std::optional<LogIntensityEstimate> intensity;
};

/// Column name for a confidence level: 0.95 -> sigma_q95, 0.999 -> sigma_q999.
std::string level_column(double q);

CalibrationRun run_calibration(const std::vector<LossEvent>& events, const CalibrateOptions& opt);
void write_cells_csv(std::ostream& out, const CalibrationRun& run, const std::vector<double>& levels);
void write_summary_csv(std::ostream& out, const CalibrationRun& run);

/// Reads, calibrates and writes cells.csv and summary.csv into opt.out_dir.
/// Nothing is written when any step fails.
int cmd_calibrate(const CalibrateOptions& opt, std::ostream& out, std::ostream& err);

// ---- capital ----------------------------------------------------------------

/// Capital configuration. JSON keys: model ("homogeneous" | "hetero_sigma" |
/// "uncertain_beta"), q, sigma, rho, v, beta, w, rho_stdev, law ("normal" |
/// "uniform"). For uncertain_beta, beta defaults to sqrt(rho) and w may be
/// given through rho_stdev instead.
struct CapitalConfig {
    std::string model = "homogeneous";
    double q = 0.999;
    double sigma = 1.07;
    std::optional<double> rho;
    std::optional<double> v;
    std::optional<double> beta;
    std::optional<double> w;
    std::optional<double> rho_stdev;
    std::string law = "normal";

    static CapitalConfig from_json(const nlohmann::json& j);
    /// Overlays every key present in `j` onto this config.
    void merge(const nlohmann::json& j);
    CapitalModel to_model() const;
};

nlohmann::json capital_report(const CapitalConfig& config);
int cmd_capital(const CapitalConfig& config, bool json_output,
                const std::optional<std::filesystem::path>& out_path, std::ostream& out,
                std::ostream& err);

// ---- figures ----------------------------------------------------------------

struct FigureOptions {
    int which = 1;
    double gamma = 2.35;
    double sigma = 1.07;
    double rho = 0.1;
    double beta2 = 0.1;
    double q = 0.999;
    std::size_t points = 0; // 0 = figure default
};

CurveSeries figure_series(const FigureOptions& opt);
void write_curve_csv(std::ostream& out, const CurveSeries& series);
int cmd_figures(const FigureOptions& opt, const std::optional<std::filesystem::path>& out_path,
                std::ostream& out, std::ostream& err);

// ---- verify -----------------------------------------------------------------

enum class VerifySuite { analytic, mc, all };

int cmd_verify(VerifySuite suite, const McBatteryOptions& mc,
               const std::optional<std::filesystem::path>& out_path, std::ostream& out,
               std::ostream& err, const ClosedForms& forms = {});

// ---- corr -------------------------------------------------------------------

nlohmann::json corr_frequency(double lambda1, double lambda2, std::optional<double> r);
nlohmann::json corr_loss(double freq_corr, double s1, double s2);
nlohmann::json corr_rbound(double gamma, std::optional<double> rho);
nlohmann::json corr_copula(double sigma_i, double sigma_j, std::optional<double> rho_ij,
                           std::optional<double> loss_corr);
nlohmann::json corr_loading_variance(double beta, std::optional<double> var_rho,
                                     std::optional<double> w);

} // namespace oprisk::cli
