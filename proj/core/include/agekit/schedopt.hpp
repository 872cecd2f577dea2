#ifndef AGEKIT_SCHEDOPT_HPP
#define AGEKIT_SCHEDOPT_HPP

#include <string>

#include "agekit/sbpsq.hpp"

// Scheduler policy construction: exact-model optimization (OPS) and the
// heavy-traffic heuristics H1/H2, plus the bufferless benchmark tag.

namespace agekit::schedopt {

enum class Metric { PAoI, AoI };

enum class PolicyKind {
    OpsP,  // probability minimizing weighted peak-AoI on the exact model
    OpsA,  // probability minimizing weighted AoI on the exact model
    H1,    // probabilistic heuristic from heavy-traffic ratios
    H2,    // bucket-based determinization of H1
    Npb,   // non-preemptive bufferless benchmark
};

struct PolicySpec {
    PolicyKind kind = PolicyKind::H1;
    Metric metric = Metric::PAoI;  // objective the policy targets
    double p1 = 0.5;               // scheduling probability (unused for Npb)
    double bucket_limit = 50.0;    // H2 only
    double objective = 0.0;        // objective value reported by ops_optimize

    bool probabilistic() const {
        return kind == PolicyKind::OpsP || kind == PolicyKind::OpsA || kind == PolicyKind::H1;
    }
};

// Exact-model optimum: p1 minimizing the weighted mean peak-AoI or AoI, by a
// coarse scan (step 0.01 over [1e-4, 1-1e-4]) refined with golden section to
// 1e-5. Falls back to a dense scan if the coarse scan is not unimodal.
PolicySpec ops_optimize(const sbpsq::SystemParams& params, Metric metric);

// Heavy-traffic heuristic parameters; uses only the weight ratio omega and
// the service rates, never the arrival rates.
PolicySpec heuristic_policy(double omega, double mu1, double mu2, Metric metric,
                            PolicyKind kind, double bucket_limit = 50.0);
PolicySpec heuristic_policy(const sbpsq::SystemParams& params, Metric metric,
                            PolicyKind kind, double bucket_limit = 50.0);

// Weighted mean for one metric from the exact model (the ops_optimize
// objective).
double weighted_mean(const sbpsq::SystemParams& params, sbpsq::SchedProb sp, Metric metric);

// Names used by the CLI and in CSV output: ops-p, ops-a, h1-p, h1-a, h2-p,
// h2-a, npb.
std::string policy_name(const PolicySpec& policy);
PolicySpec parse_policy_name(const std::string& name);

}  // namespace agekit::schedopt

#endif
