#ifndef AGEKIT_EXPERIMENT_HPP
#define AGEKIT_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agekit/schedopt.hpp"
#include "agekit/simkit.hpp"

// Experiment layer behind the command-line tool: config resolution, CSV rows,
// parameter sweeps and the canned figure-reproduction pipelines.

namespace agekit::experiment {

// One output record. Serialized column order:
// policy,rho,r,omega,mu,p1,E_PAoI_1,E_PAoI_2,E_AoI_1,E_AoI_2,W_PAoI,W_AoI,source,ci_low,ci_high
struct ResultRow {
    std::string policy;
    double rho = 0.0, r = 0.0, omega = 0.0, mu = 0.0, p1 = 0.0;
    double e_paoi_1 = 0.0, e_paoi_2 = 0.0;
    double e_aoi_1 = 0.0, e_aoi_2 = 0.0;
    double w_paoi = 0.0, w_aoi = 0.0;
    std::string source;  // analytic | simulated | error
    std::optional<double> ci_low, ci_high;  // CI of the policy's target weighted metric

    // Not serialized: simulation saw fewer than 1e4 post-warmup receptions
    // for some active source.
    bool undersampled = false;
};

std::string csv_header();
std::string csv_line(const ResultRow& row);
ResultRow parse_csv_line(const std::string& line);

void write_csv(const std::string& path, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(const std::string& path);

struct SweepSpec {
    std::string variable = "rho";  // rho | r | omega | p1
    double from = 0.1, to = 10.0;
    int points = 25;
    bool log_spaced = true;
};

struct RunOptions {
    std::uint64_t events = 1'000'000;
    double time = 0.0;
    double warmup_fraction = 0.2;
    int replications = 10;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: hardware concurrency
};

struct ExperimentConfig {
    std::string mode = "analyze";  // analyze | optimize | simulate | sweep | reproduce

    // Shorthand parameter block (mu2 = 1); an explicit params block wins.
    double rho = 1.0, r = 1.0, omega = 1.0, mu = 1.0;
    std::optional<sbpsq::SystemParams> explicit_params;

    std::string policy = "h1-p";
    std::optional<double> p1;  // override the policy's scheduling probability
    double bucket_limit = 50.0;
    std::string metric = "paoi";  // optimize target

    SweepSpec sweep;
    RunOptions run;
    std::string figure;  // reproduce target: fig3..fig7
    std::string out;     // output file (modes) or directory (reproduce)
    bool densities = false;
};

// Parse a JSON config file; unknown keys are rejected so typos surface.
ExperimentConfig load_config(const std::string& path);

sbpsq::SystemParams resolve_params(const ExperimentConfig& cfg);
schedopt::PolicySpec resolve_policy(const ExperimentConfig& cfg, const sbpsq::SystemParams& params);
schedopt::Metric parse_metric(const std::string& name);

// Exact-model (or closed-form, for npb) row; throws ConfigError for bucket
// policies, which have no analytic route.
ResultRow analytic_row(const sbpsq::SystemParams& params, const schedopt::PolicySpec& policy);

// Simulation row with a CI on the policy's target weighted metric.
ResultRow simulated_row(const sbpsq::SystemParams& params, const schedopt::PolicySpec& policy,
                        const RunOptions& opts);

// analyze/optimize/simulate produce one row; sweep produces one row per grid
// point, in grid order regardless of worker scheduling. Numeric failures at
// individual sweep points become rows with source == "error".
std::vector<ResultRow> run_mode(const ExperimentConfig& cfg);

// Canned sweeps reproducing the figure data; writes one CSV per curve into
// out_dir and returns the written paths. Throws UnknownFigure.
std::vector<std::string> run_reproduce(const std::string& figure, const std::string& out_dir,
                                       const RunOptions& opts);

}  // namespace agekit::experiment

#endif
