#include "agekit/schedopt.hpp"

#include "agekit/closedform.hpp"
#include "agekit/minimize.hpp"

namespace agekit::schedopt {

double weighted_mean(const sbpsq::SystemParams& params, sbpsq::SchedProb sp, Metric metric) {
    double total = 0.0;
    for (int source : {1, 2}) {
        const auto chain = sbpsq::source_chain(params, sp, source);
        const auto& w = metric == Metric::PAoI ? chain.absorb_vector("s") : chain.weight_vector("h");
        const double weight = source == 1 ? params.omega1 : params.omega2;
        total += weight * ctmc::moment(chain, w, 1);
    }
    return total;
}

PolicySpec ops_optimize(const sbpsq::SystemParams& params, Metric metric) {
    params.validate();
    auto objective = [&](double p1) { return weighted_mean(params, sbpsq::SchedProb{p1}, metric); };
    const double lo = 1e-4, hi = 1.0 - 1e-4;
    const int steps = static_cast<int>((hi - lo) / 0.01) + 1;
    const auto best = opt::grid_then_golden(objective, lo, hi, steps, 1e-5);

    PolicySpec policy;
    policy.kind = metric == Metric::PAoI ? PolicyKind::OpsP : PolicyKind::OpsA;
    policy.metric = metric;
    policy.p1 = best.x;
    policy.objective = best.value;
    return policy;
}

PolicySpec heuristic_policy(double omega, double mu1, double mu2, Metric metric,
                            PolicyKind kind, double bucket_limit) {
    if (kind != PolicyKind::H1 && kind != PolicyKind::H2) {
        throw ConfigError("heuristic policy kind must be H1 or H2");
    }
    if (!(bucket_limit > 0.0)) throw ConfigError("bucket limit must be positive");
    const double ratio = metric == Metric::PAoI
                             ? closedform::ht_opt_ratio_paoi(omega, mu1 / mu2)
                             : closedform::ht_opt_ratio_aoi(omega, mu1, mu2);
    PolicySpec policy;
    policy.kind = kind;
    policy.metric = metric;
    policy.p1 = ratio / (1.0 + ratio);
    policy.bucket_limit = bucket_limit;
    return policy;
}

PolicySpec heuristic_policy(const sbpsq::SystemParams& params, Metric metric,
                            PolicyKind kind, double bucket_limit) {
    params.validate();
    return heuristic_policy(params.weight_ratio(), params.mu1(), params.mu2(), metric, kind,
                            bucket_limit);
}

std::string policy_name(const PolicySpec& policy) {
    switch (policy.kind) {
        case PolicyKind::OpsP: return "ops-p";
        case PolicyKind::OpsA: return "ops-a";
        case PolicyKind::H1: return policy.metric == Metric::PAoI ? "h1-p" : "h1-a";
        case PolicyKind::H2: return policy.metric == Metric::PAoI ? "h2-p" : "h2-a";
        case PolicyKind::Npb: return "npb";
    }
    return "unknown";
}

PolicySpec parse_policy_name(const std::string& name) {
    PolicySpec policy;
    if (name == "ops-p") {
        policy.kind = PolicyKind::OpsP;
        policy.metric = Metric::PAoI;
    } else if (name == "ops-a") {
        policy.kind = PolicyKind::OpsA;
        policy.metric = Metric::AoI;
    } else if (name == "h1-p" || name == "h1-a") {
        policy.kind = PolicyKind::H1;
        policy.metric = name == "h1-p" ? Metric::PAoI : Metric::AoI;
    } else if (name == "h2-p" || name == "h2-a") {
        policy.kind = PolicyKind::H2;
        policy.metric = name == "h2-p" ? Metric::PAoI : Metric::AoI;
    } else if (name == "npb") {
        policy.kind = PolicyKind::Npb;
    } else {
        throw ConfigError("unknown policy '" + name +
                          "' (expected ops-p, ops-a, h1-p, h1-a, h2-p, h2-a, npb)");
    }
    return policy;
}

}  // namespace agekit::schedopt
