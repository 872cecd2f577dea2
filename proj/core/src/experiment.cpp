#include "agekit/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "agekit/closedform.hpp"

namespace agekit::experiment {

using json = nlohmann::json;
using schedopt::Metric;
using schedopt::PolicyKind;
using schedopt::PolicySpec;
using sbpsq::SchedProb;
using sbpsq::SystemParams;

namespace {

// Placeholder load recorded for heavy-traffic rows (fig3/fig4), which have no
// finite load; documented in the README.
constexpr double kHeavyTrafficRho = 1e9;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& field) {
    if (field.empty()) return std::nan("");
    return std::stod(field);
}

std::vector<double> make_grid(double from, double to, int points, bool log_spaced) {
    if (points < 1 || !(from > 0.0 || !log_spaced) || !std::isfinite(from) || !std::isfinite(to)) {
        throw ConfigError("invalid sweep grid");
    }
    std::vector<double> xs(points);
    if (points == 1) {
        xs[0] = from;
        return xs;
    }
    for (int i = 0; i < points; ++i) {
        const double f = static_cast<double>(i) / (points - 1);
        xs[i] = log_spaced ? from * std::pow(to / from, f) : from + (to - from) * f;
    }
    return xs;
}

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads <= 0) threads = 4;
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

std::string csv_header() {
    return "policy,rho,r,omega,mu,p1,E_PAoI_1,E_PAoI_2,E_AoI_1,E_AoI_2,W_PAoI,W_AoI,source,"
           "ci_low,ci_high";
}

std::string csv_line(const ResultRow& row) {
    std::ostringstream out;
    out << row.policy << ',' << fmt(row.rho) << ',' << fmt(row.r) << ',' << fmt(row.omega) << ','
        << fmt(row.mu) << ',' << fmt(row.p1) << ',' << fmt(row.e_paoi_1) << ','
        << fmt(row.e_paoi_2) << ',' << fmt(row.e_aoi_1) << ',' << fmt(row.e_aoi_2) << ','
        << fmt(row.w_paoi) << ',' << fmt(row.w_aoi) << ',' << row.source << ','
        << (row.ci_low ? fmt(*row.ci_low) : "") << ',' << (row.ci_high ? fmt(*row.ci_high) : "");
    return out.str();
}

ResultRow parse_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    while (fields.size() < 15) fields.emplace_back();
    if (fields.size() != 15) throw ConfigError("malformed CSV row: " + line);

    ResultRow row;
    row.policy = fields[0];
    row.rho = parse_double(fields[1]);
    row.r = parse_double(fields[2]);
    row.omega = parse_double(fields[3]);
    row.mu = parse_double(fields[4]);
    row.p1 = parse_double(fields[5]);
    row.e_paoi_1 = parse_double(fields[6]);
    row.e_paoi_2 = parse_double(fields[7]);
    row.e_aoi_1 = parse_double(fields[8]);
    row.e_aoi_2 = parse_double(fields[9]);
    row.w_paoi = parse_double(fields[10]);
    row.w_aoi = parse_double(fields[11]);
    row.source = fields[12];
    if (!fields[13].empty()) row.ci_low = parse_double(fields[13]);
    if (!fields[14].empty()) row.ci_high = parse_double(fields[14]);
    return row;
}

void write_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << csv_header() << '\n';
    for (const auto& row : rows) out << csv_line(row) << '\n';
}

std::vector<ResultRow> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open input file: " + path);
    std::string line;
    std::getline(in, line);
    if (line != csv_header()) throw ConfigError("unexpected CSV header in " + path);
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (!line.empty()) rows.push_back(parse_csv_line(line));
    }
    return rows;
}

Metric parse_metric(const std::string& name) {
    if (name == "paoi") return Metric::PAoI;
    if (name == "aoi") return Metric::AoI;
    throw ConfigError("unknown metric '" + name + "' (expected paoi or aoi)");
}

namespace {

void check_keys(const json& block, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (const auto& [key, value] : block.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError("unknown config field '" + key + "' in " + where);
    }
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }

    ExperimentConfig cfg;
    check_keys(doc, {"mode", "params", "policy", "sweep", "sim", "figure", "out", "densities", "threads"},
               "top level");
    cfg.mode = doc.value("mode", cfg.mode);
    cfg.figure = doc.value("figure", cfg.figure);
    cfg.out = doc.value("out", cfg.out);
    cfg.densities = doc.value("densities", cfg.densities);
    cfg.run.threads = doc.value("threads", cfg.run.threads);

    if (doc.contains("params")) {
        const json& p = doc["params"];
        if (p.contains("lambda1")) {
            check_keys(p, {"lambda1", "lambda2", "nu1", "nu2", "s1", "s2", "w1", "w2"}, "params");
            SystemParams sp;
            sp.lambda1 = p.at("lambda1").get<double>();
            sp.lambda2 = p.at("lambda2").get<double>();
            sp.nu1 = p.at("nu1").get<double>();
            sp.nu2 = p.at("nu2").get<double>();
            sp.s1 = p.value("s1", 1.0);
            sp.s2 = p.value("s2", 1.0);
            sp.omega1 = p.value("w1", 0.5);
            sp.omega2 = p.value("w2", 1.0 - sp.omega1);
            cfg.explicit_params = sp;
        } else {
            check_keys(p, {"rho", "r", "omega", "mu"}, "params");
            cfg.rho = p.value("rho", cfg.rho);
            cfg.r = p.value("r", cfg.r);
            cfg.omega = p.value("omega", cfg.omega);
            cfg.mu = p.value("mu", cfg.mu);
        }
    }
    if (doc.contains("policy")) {
        const json& p = doc["policy"];
        check_keys(p, {"kind", "p1", "bucket_limit", "metric"}, "policy");
        cfg.policy = p.value("kind", cfg.policy);
        if (p.contains("p1")) cfg.p1 = p.at("p1").get<double>();
        cfg.bucket_limit = p.value("bucket_limit", cfg.bucket_limit);
        cfg.metric = p.value("metric", cfg.metric);
    }
    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        check_keys(s, {"variable", "from", "to", "points", "log"}, "sweep");
        cfg.sweep.variable = s.value("variable", cfg.sweep.variable);
        cfg.sweep.from = s.value("from", cfg.sweep.from);
        cfg.sweep.to = s.value("to", cfg.sweep.to);
        cfg.sweep.points = s.value("points", cfg.sweep.points);
        cfg.sweep.log_spaced = s.value("log", cfg.sweep.log_spaced);
    }
    if (doc.contains("sim")) {
        const json& s = doc["sim"];
        check_keys(s, {"events", "time", "warmup_fraction", "replications", "seed"}, "sim");
        cfg.run.events = s.value("events", cfg.run.events);
        cfg.run.time = s.value("time", cfg.run.time);
        cfg.run.warmup_fraction = s.value("warmup_fraction", cfg.run.warmup_fraction);
        cfg.run.replications = s.value("replications", cfg.run.replications);
        cfg.run.seed = s.value("seed", cfg.run.seed);
    }
    return cfg;
}

SystemParams resolve_params(const ExperimentConfig& cfg) {
    if (cfg.explicit_params) {
        SystemParams p = *cfg.explicit_params;
        p.validate();
        return p;
    }
    return SystemParams::from_shorthand(cfg.rho, cfg.r, cfg.omega, cfg.mu);
}

namespace {

// Fill in the concrete scheduling probability for a policy: optimizers run
// the exact model, heuristics use the heavy-traffic ratios, and an explicit
// p1 wins over both.
PolicySpec concretize(PolicySpec base, const SystemParams& params, std::optional<double> p1) {
    if (p1) {
        if (base.kind == PolicyKind::Npb) throw ConfigError("npb takes no scheduling probability");
        base.p1 = *p1;
        SchedProb{base.p1}.validate();
        return base;
    }
    switch (base.kind) {
        case PolicyKind::OpsP:
            return schedopt::ops_optimize(params, Metric::PAoI);
        case PolicyKind::OpsA:
            return schedopt::ops_optimize(params, Metric::AoI);
        case PolicyKind::H1:
        case PolicyKind::H2:
            return schedopt::heuristic_policy(params, base.metric, base.kind, base.bucket_limit);
        case PolicyKind::Npb:
            return base;
    }
    return base;
}

}  // namespace

PolicySpec resolve_policy(const ExperimentConfig& cfg, const SystemParams& params) {
    PolicySpec base = schedopt::parse_policy_name(cfg.policy);
    base.bucket_limit = cfg.bucket_limit;
    return concretize(base, params, cfg.p1);
}

namespace {

void fill_shorthand_columns(ResultRow& row, const SystemParams& params) {
    row.rho = params.rho();
    row.r = params.mix_ratio();
    row.omega = params.weight_ratio();
    row.mu = params.rate_ratio();
}

}  // namespace

ResultRow analytic_row(const SystemParams& params, const PolicySpec& policy) {
    ResultRow row;
    row.policy = schedopt::policy_name(policy);
    fill_shorthand_columns(row, params);
    row.p1 = policy.p1;
    row.source = "analytic";

    if (policy.kind == PolicyKind::Npb) {
        const closedform::NpbParams np{params.lambda1, params.lambda2, params.mu1(), params.mu2()};
        row.e_paoi_1 = closedform::npb_mean_paoi(np, 1);
        row.e_paoi_2 = closedform::npb_mean_paoi(np, 2);
        row.e_aoi_1 = closedform::npb_mean_aoi(np, 1);
        row.e_aoi_2 = closedform::npb_mean_aoi(np, 2);
    } else if (policy.probabilistic()) {
        const auto report = sbpsq::weighted_metrics(params, SchedProb{policy.p1});
        row.e_paoi_1 = report.source1.paoi_mean;
        row.e_paoi_2 = report.source2.paoi_mean;
        row.e_aoi_1 = report.source1.aoi_mean;
        row.e_aoi_2 = report.source2.aoi_mean;
    } else {
        throw ConfigError("policy '" + row.policy + "' has no analytic model; use simulate");
    }
    row.w_paoi = params.omega1 * row.e_paoi_1 + params.omega2 * row.e_paoi_2;
    row.w_aoi = params.omega1 * row.e_aoi_1 + params.omega2 * row.e_aoi_2;
    return row;
}

ResultRow simulated_row(const SystemParams& params, const PolicySpec& policy,
                        const RunOptions& opts) {
    simkit::SimConfig sim;
    sim.params = params;
    sim.policy = policy;
    sim.horizon_events = opts.events;
    sim.horizon_time = opts.time;
    sim.warmup_fraction = opts.warmup_fraction;
    sim.replications = opts.replications;
    sim.seed = opts.seed;
    const auto stats = simkit::replicate(sim, opts.threads);

    ResultRow row;
    row.policy = schedopt::policy_name(policy);
    fill_shorthand_columns(row, params);
    row.p1 = policy.p1;
    row.source = "simulated";
    row.e_paoi_1 = stats.paoi1.mean;
    row.e_paoi_2 = stats.paoi2.mean;
    row.e_aoi_1 = stats.aoi1.mean;
    row.e_aoi_2 = stats.aoi2.mean;
    row.w_paoi = stats.w_paoi.mean;
    row.w_aoi = stats.w_aoi.mean;
    const simkit::Summary& target = policy.metric == Metric::AoI ? stats.w_aoi : stats.w_paoi;
    row.ci_low = target.ci_low;
    row.ci_high = target.ci_high;
    row.undersampled = stats.undersampled;
    return row;
}

namespace {

ResultRow error_row(const std::string& policy, const SystemParams& params, const std::string&) {
    ResultRow row;
    row.policy = policy;
    fill_shorthand_columns(row, params);
    row.source = "error";
    row.e_paoi_1 = row.e_paoi_2 = row.e_aoi_1 = row.e_aoi_2 = std::nan("");
    row.w_paoi = row.w_aoi = std::nan("");
    return row;
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& cfg) {
    const SweepSpec& sw = cfg.sweep;
    const bool sweep_p1 = sw.variable == "p1";
    if (sw.variable != "rho" && sw.variable != "r" && sw.variable != "omega" && !sweep_p1) {
        throw ConfigError("sweep variable must be one of rho, r, omega, p1");
    }
    if (cfg.explicit_params && !sweep_p1) {
        throw ConfigError("sweeps over rho, r, omega need shorthand parameters");
    }
    const PolicySpec base = schedopt::parse_policy_name(cfg.policy);
    if (sweep_p1 && !(base.probabilistic() || base.kind == PolicyKind::H2)) {
        throw ConfigError("cannot sweep p1 for policy '" + cfg.policy + "'");
    }
    const auto grid = make_grid(sw.from, sw.to, sw.points, sw.log_spaced);

    const int n = static_cast<int>(grid.size());
    std::vector<ResultRow> rows(n);
    std::vector<std::exception_ptr> fatal(n);
    parallel_for(n, cfg.run.threads, [&](int i) {
        ExperimentConfig point = cfg;
        if (sweep_p1) {
            point.p1 = grid[i];
        } else if (sw.variable == "rho") {
            point.rho = grid[i];
        } else if (sw.variable == "r") {
            point.r = grid[i];
        } else {
            point.omega = grid[i];
        }
        SystemParams params;
        try {
            params = resolve_params(point);
            PolicySpec policy = resolve_policy(point, params);
            if (policy.kind == PolicyKind::H2) {
                RunOptions opts = cfg.run;
                opts.seed = cfg.run.seed + static_cast<std::uint64_t>(i);
                opts.threads = 1;  // the pool already runs at point granularity
                rows[i] = simulated_row(params, policy, opts);
            } else {
                rows[i] = analytic_row(params, policy);
            }
        } catch (const ConfigError&) {
            fatal[i] = std::current_exception();
        } catch (const std::exception& e) {
            rows[i] = error_row(cfg.policy, params, e.what());
        }
    });
    for (const auto& err : fatal) {
        if (err) std::rethrow_exception(err);
    }
    return rows;
}

}  // namespace

std::vector<ResultRow> run_mode(const ExperimentConfig& cfg) {
    if (cfg.mode == "analyze") {
        const SystemParams params = resolve_params(cfg);
        const PolicySpec policy = resolve_policy(cfg, params);
        return {analytic_row(params, policy)};
    }
    if (cfg.mode == "optimize") {
        const SystemParams params = resolve_params(cfg);
        const PolicySpec policy = schedopt::ops_optimize(params, parse_metric(cfg.metric));
        return {analytic_row(params, policy)};
    }
    if (cfg.mode == "simulate") {
        const SystemParams params = resolve_params(cfg);
        const PolicySpec policy = resolve_policy(cfg, params);
        return {simulated_row(params, policy, cfg.run)};
    }
    if (cfg.mode == "sweep") {
        return run_sweep(cfg);
    }
    if (cfg.mode == "reproduce") {
        throw ConfigError("reproduce takes a figure id; use run_reproduce");
    }
    throw ConfigError("unknown mode '" + cfg.mode +
                      "' (expected analyze, optimize, simulate, sweep, reproduce)");
}

namespace {

struct Curve {
    std::string file;
    std::vector<ResultRow> rows;
};

ResultRow heavy_traffic_row(double omega, double mu, Metric metric) {
    const double ratio = metric == Metric::PAoI ? closedform::ht_opt_ratio_paoi(omega, mu)
                                                : closedform::ht_opt_ratio_aoi(omega, mu, 1.0);
    const double p1 = ratio / (1.0 + ratio);
    const double w1 = omega / (1.0 + omega), w2 = 1.0 - w1;
    const closedform::HeavyTrafficParams htp{mu, 1.0, p1};

    ResultRow row;
    row.policy = metric == Metric::PAoI ? "h1-p" : "h1-a";
    row.rho = kHeavyTrafficRho;
    row.r = 1.0;
    row.omega = omega;
    row.mu = mu;
    row.p1 = p1;
    row.source = "analytic";
    row.e_paoi_1 = closedform::ht_mean_paoi(htp, 1);
    row.e_paoi_2 = closedform::ht_mean_paoi(htp, 2);
    row.e_aoi_1 = closedform::ht_mean_aoi(htp, 1);
    row.e_aoi_2 = closedform::ht_mean_aoi(htp, 2);
    row.w_paoi = w1 * row.e_paoi_1 + w2 * row.e_paoi_2;
    row.w_aoi = w1 * row.e_aoi_1 + w2 * row.e_aoi_2;
    return row;
}

std::string num_tag(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

// One figure curve: a policy swept over a load/mix grid at fixed omega, mu.
Curve model_curve(const std::string& fig, const std::string& panel, const std::string& policy_name,
                  const std::vector<double>& grid, bool sweep_rho, double fixed, double omega,
                  double mu, const RunOptions& opts) {
    Curve curve;
    curve.file = fig + "_" + panel + "_" + policy_name + ".csv";
    curve.rows.resize(grid.size());
    const int n = static_cast<int>(grid.size());
    parallel_for(n, opts.threads, [&](int i) {
        const double rho = sweep_rho ? grid[i] : fixed;
        const double r = sweep_rho ? fixed : grid[i];
        const SystemParams params = SystemParams::from_shorthand(rho, r, omega, mu);
        PolicySpec policy = schedopt::parse_policy_name(policy_name);
        policy = concretize(policy, params, std::nullopt);
        if (policy.kind == PolicyKind::H2) {
            RunOptions point_opts = opts;
            point_opts.seed = opts.seed + static_cast<std::uint64_t>(i);
            point_opts.threads = 1;
            curve.rows[i] = simulated_row(params, policy, point_opts);
        } else {
            curve.rows[i] = analytic_row(params, policy);
        }
    });
    return curve;
}

}  // namespace

std::vector<std::string> run_reproduce(const std::string& figure, const std::string& out_dir,
                                       const RunOptions& opts) {
    std::vector<Curve> curves;

    if (figure == "fig3" || figure == "fig4") {
        const auto omegas = make_grid(1.0 / 16.0, 16.0, 33, true);
        const std::vector<double> mus = figure == "fig3" ? std::vector<double>{0.25, 1.0, 4.0}
                                                         : std::vector<double>{0.25, 0.5, 1.0, 2.0, 4.0};
        for (double mu : mus) {
            for (Metric metric : {Metric::PAoI, Metric::AoI}) {
                Curve curve;
                curve.file = figure + "_mu" + num_tag(mu) + "_" +
                             (metric == Metric::PAoI ? "h1-p" : "h1-a") + ".csv";
                for (double omega : omegas) curve.rows.push_back(heavy_traffic_row(omega, mu, metric));
                curves.push_back(std::move(curve));
            }
        }
    } else if (figure == "fig5") {
        const auto r_grid = make_grid(1.0 / 64.0, 64.0, 25, true);
        for (double rho : {1.0, 10.0}) {
            for (const char* policy : {"ops-p", "npb", "h1-p", "h2-p"}) {
                curves.push_back(model_curve(figure, "wpaoi_rho" + num_tag(rho), policy, r_grid,
                                             false, rho, 1.0, 1.0, opts));
            }
            for (const char* policy : {"ops-a", "npb", "h1-a", "h2-a"}) {
                curves.push_back(model_curve(figure, "waoi_rho" + num_tag(rho), policy, r_grid,
                                             false, rho, 1.0, 1.0, opts));
            }
        }
    } else if (figure == "fig6" || figure == "fig7") {
        const auto rho_grid = make_grid(0.1, 100.0, 21, true);
        const bool paoi = figure == "fig6";
        const std::vector<const char*> policies =
            paoi ? std::vector<const char*>{"ops-p", "npb", "h1-p", "h2-p"}
                 : std::vector<const char*>{"ops-a", "npb", "h1-a", "h2-a"};
        for (double r : {1.0, 0.25}) {
            for (const char* policy : policies) {
                curves.push_back(model_curve(figure, "r" + num_tag(r), policy, rho_grid, true, r,
                                             4.0, 4.0, opts));
            }
        }
    } else {
        throw UnknownFigure("unknown figure '" + figure + "' (expected fig3..fig7)");
    }

    std::filesystem::create_directories(out_dir);
    std::vector<std::string> paths;
    paths.reserve(curves.size());
    for (const auto& curve : curves) {
        const std::string path = (std::filesystem::path(out_dir) / curve.file).string();
        write_csv(path, curve.rows);
        paths.push_back(path);
    }
    return paths;
}

}  // namespace agekit::experiment
