// agekit command-line tool: exact analysis, policy optimization, discrete-event
// simulation and figure-style sweeps for the two-source status-update system.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "agekit/experiment.hpp"
#include "agekit/sbpsq.hpp"

namespace {

using namespace agekit;

struct Flags {
    std::string config_path;
    std::optional<double> rho, r, omega, mu;
    std::optional<double> lambda1, lambda2, nu1, nu2, s1, s2, w1, w2;
    std::optional<std::string> policy, metric;
    std::optional<double> p1, bucket_limit;
    std::optional<std::uint64_t> events, seed;
    std::optional<double> time, warmup_fraction;
    std::optional<int> replications, threads;
    std::optional<std::string> sweep_var;
    std::optional<double> sweep_from, sweep_to;
    std::optional<int> sweep_points;
    bool sweep_linear = false;
    bool densities = false;
    std::string out;
};

void add_param_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "JSON config file; flags override its fields");
    sub->add_option("--rho", f.rho, "total load rho = rho1 + rho2");
    sub->add_option("--r", f.r, "traffic mix ratio r = rho1/rho2");
    sub->add_option("--omega", f.omega, "weight ratio omega = w1/w2");
    sub->add_option("--mu", f.mu, "service rate ratio mu = mu1/mu2 (mu2 = 1)");
    sub->add_option("--lambda1", f.lambda1, "source-1 arrival rate (explicit parameter set)");
    sub->add_option("--lambda2", f.lambda2, "source-2 arrival rate");
    sub->add_option("--nu1", f.nu1, "source-1 per-transmission service rate");
    sub->add_option("--nu2", f.nu2, "source-2 per-transmission service rate");
    sub->add_option("--s1", f.s1, "source-1 channel success probability");
    sub->add_option("--s2", f.s2, "source-2 channel success probability");
    sub->add_option("--w1", f.w1, "source-1 weight (w2 = 1 - w1)");
    sub->add_option("--w2", f.w2, "source-2 weight");
    sub->add_option("--out", f.out, "output CSV path (default: stdout, or $AGEKIT_OUTDIR)");
    sub->add_option("--threads", f.threads, "worker threads for sweeps (0 = hardware)");
}

void add_policy_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--policy", f.policy, "ops-p, ops-a, h1-p, h1-a, h2-p, h2-a or npb");
    sub->add_option("--p1", f.p1, "override the scheduling probability p1");
    sub->add_option("--bucket-limit", f.bucket_limit, "bucket limit B for h2 policies");
    sub->add_option("--metric", f.metric, "paoi or aoi")
        ->check(CLI::IsMember({"paoi", "aoi"}));
}

void add_sim_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--events", f.events, "events per replication (0: use --time)");
    sub->add_option("--time", f.time, "simulated time horizon per replication");
    sub->add_option("--warmup-fraction", f.warmup_fraction, "fraction of horizon discarded");
    sub->add_option("--replications", f.replications, "independent replications");
    sub->add_option("--seed", f.seed, "base RNG seed");
}

experiment::ExperimentConfig merge(const Flags& f, const std::string& mode) {
    experiment::ExperimentConfig cfg;
    if (!f.config_path.empty()) cfg = experiment::load_config(f.config_path);
    cfg.mode = mode;

    if (f.lambda1 || f.lambda2 || f.nu1 || f.nu2) {
        if (!(f.lambda1 && f.lambda2 && f.nu1 && f.nu2)) {
            throw ConfigError("explicit parameters need --lambda1 --lambda2 --nu1 --nu2");
        }
        sbpsq::SystemParams p;
        p.lambda1 = *f.lambda1;
        p.lambda2 = *f.lambda2;
        p.nu1 = *f.nu1;
        p.nu2 = *f.nu2;
        p.s1 = f.s1.value_or(1.0);
        p.s2 = f.s2.value_or(1.0);
        p.omega1 = f.w1.value_or(f.w2 ? 1.0 - *f.w2 : 0.5);
        p.omega2 = f.w2.value_or(1.0 - p.omega1);
        cfg.explicit_params = p;
    }
    if (f.rho) cfg.rho = *f.rho;
    if (f.r) cfg.r = *f.r;
    if (f.omega) cfg.omega = *f.omega;
    if (f.mu) cfg.mu = *f.mu;
    if (f.policy) cfg.policy = *f.policy;
    if (f.p1) cfg.p1 = *f.p1;
    if (f.bucket_limit) cfg.bucket_limit = *f.bucket_limit;
    if (f.metric) cfg.metric = *f.metric;
    if (f.events) cfg.run.events = *f.events;
    if (f.time) {
        cfg.run.time = *f.time;
        if (!f.events) cfg.run.events = 0;
    }
    if (f.warmup_fraction) cfg.run.warmup_fraction = *f.warmup_fraction;
    if (f.replications) cfg.run.replications = *f.replications;
    if (f.seed) cfg.run.seed = *f.seed;
    if (f.threads) cfg.run.threads = *f.threads;
    if (f.sweep_var) cfg.sweep.variable = *f.sweep_var;
    if (f.sweep_from) cfg.sweep.from = *f.sweep_from;
    if (f.sweep_to) cfg.sweep.to = *f.sweep_to;
    if (f.sweep_points) cfg.sweep.points = *f.sweep_points;
    if (f.sweep_linear) cfg.sweep.log_spaced = false;
    if (f.densities) cfg.densities = true;
    if (!f.out.empty()) cfg.out = f.out;
    return cfg;
}

std::string default_out(const std::string& name) {
    const char* dir = std::getenv("AGEKIT_OUTDIR");
    if (dir == nullptr || *dir == '\0') return "";
    return (std::filesystem::path(dir) / name).string();
}

void emit(const experiment::ExperimentConfig& cfg, const std::vector<experiment::ResultRow>& rows,
          const std::string& mode) {
    std::size_t undersampled = 0;
    for (const auto& row : rows) undersampled += row.undersampled ? 1 : 0;
    if (undersampled > 0) {
        std::cerr << "warning: " << undersampled << " simulated row(s) saw fewer than 1e4 "
                  << "post-warmup receptions for a source; raise --events or --time\n";
    }
    std::string out = cfg.out.empty() ? default_out(mode + ".csv") : cfg.out;
    if (out.empty()) {
        std::cout << experiment::csv_header() << '\n';
        for (const auto& row : rows) std::cout << experiment::csv_line(row) << '\n';
    } else {
        experiment::write_csv(out, rows);
        std::cerr << "wrote " << rows.size() << " row(s) to " << out << '\n';
    }
}

void emit_densities(const experiment::ExperimentConfig& cfg) {
    if (cfg.out.empty()) {
        throw ConfigError("--densities needs --out to derive the density file names");
    }
    const auto params = experiment::resolve_params(cfg);
    const auto policy = experiment::resolve_policy(cfg, params);
    if (!policy.probabilistic()) {
        throw ConfigError("density tables need a probabilistic policy");
    }
    const auto stem = std::filesystem::path(cfg.out).replace_extension().string();
    for (int source : {1, 2}) {
        const auto table = sbpsq::density_table(params, sbpsq::SchedProb{policy.p1}, source);
        const std::string path = stem + "_density_src" + std::to_string(source) + ".csv";
        std::ofstream file(path);
        if (!file) throw ConfigError("cannot open output file: " + path);
        file << "x,paoi_pdf,aoi_pdf\n";
        for (std::size_t i = 0; i < table.x.size(); ++i) {
            file << table.x[i] << ',' << table.paoi[i] << ',' << table.aoi[i] << '\n';
        }
        std::cerr << "wrote density table to " << path << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-source status-update system: AoI/peak-AoI analysis, scheduling optimization "
                 "and simulation"};
    app.require_subcommand(1);

    Flags flags;
    std::string figure;

    CLI::App* analyze = app.add_subcommand("analyze", "exact metrics for one parameter set");
    add_param_flags(analyze, flags);
    add_policy_flags(analyze, flags);
    analyze->add_flag("--densities", flags.densities, "also write AoI/peak-AoI density tables");

    CLI::App* optimize = app.add_subcommand("optimize", "optimal probabilistic scheduler (OPS)");
    add_param_flags(optimize, flags);
    add_policy_flags(optimize, flags);

    CLI::App* simulate = app.add_subcommand("simulate", "discrete-event simulation of a policy");
    add_param_flags(simulate, flags);
    add_policy_flags(simulate, flags);
    add_sim_flags(simulate, flags);

    CLI::App* sweep = app.add_subcommand("sweep", "sweep one variable over a grid");
    add_param_flags(sweep, flags);
    add_policy_flags(sweep, flags);
    add_sim_flags(sweep, flags);
    sweep->add_option("--sweep-var", flags.sweep_var, "rho, r, omega or p1");
    sweep->add_option("--sweep-from", flags.sweep_from, "grid start");
    sweep->add_option("--sweep-to", flags.sweep_to, "grid end");
    sweep->add_option("--sweep-points", flags.sweep_points, "grid points");
    sweep->add_flag("--sweep-linear", flags.sweep_linear, "linear grid instead of log-spaced");

    CLI::App* reproduce = app.add_subcommand("reproduce", "regenerate the figure datasets");
    reproduce->add_option("figure", figure, "fig3, fig4, fig5, fig6 or fig7")->required();
    reproduce->add_option("--out", flags.out, "output directory (default: $AGEKIT_OUTDIR or .)");
    add_sim_flags(reproduce, flags);
    reproduce->add_option("--threads", flags.threads, "worker threads (0 = hardware)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (analyze->parsed()) {
            auto cfg = merge(flags, "analyze");
            emit(cfg, experiment::run_mode(cfg), "analyze");
            if (cfg.densities) emit_densities(cfg);
        } else if (optimize->parsed()) {
            auto cfg = merge(flags, "optimize");
            emit(cfg, experiment::run_mode(cfg), "optimize");
        } else if (simulate->parsed()) {
            auto cfg = merge(flags, "simulate");
            emit(cfg, experiment::run_mode(cfg), "simulate");
        } else if (sweep->parsed()) {
            auto cfg = merge(flags, "sweep");
            emit(cfg, experiment::run_mode(cfg), "sweep");
        } else if (reproduce->parsed()) {
            auto cfg = merge(flags, "reproduce");
            std::string out_dir = cfg.out;
            if (out_dir.empty()) out_dir = default_out("");
            if (out_dir.empty()) out_dir = ".";
            const auto paths = experiment::run_reproduce(figure, out_dir, cfg.run);
            for (const auto& path : paths) std::cerr << "wrote " << path << '\n';
        }
    } catch (const UnknownFigure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
