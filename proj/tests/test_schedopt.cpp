#include <doctest.h>

#include <cmath>

#include "agekit/closedform.hpp"
#include "agekit/schedopt.hpp"

using namespace agekit;
using schedopt::Metric;
using schedopt::PolicyKind;
using schedopt::PolicySpec;
using sbpsq::SchedProb;
using sbpsq::SystemParams;

TEST_CASE("symmetric networks are scheduled evenly") {
    const SystemParams p = SystemParams::from_shorthand(1.0, 1.0, 1.0, 1.0);
    for (Metric metric : {Metric::PAoI, Metric::AoI}) {
        const PolicySpec ops = schedopt::ops_optimize(p, metric);
        CHECK(ops.p1 == doctest::Approx(0.5).epsilon(1e-4));
        for (PolicyKind kind : {PolicyKind::H1, PolicyKind::H2}) {
            CHECK(schedopt::heuristic_policy(p, metric, kind).p1 == doctest::Approx(0.5));
        }
    }
}

TEST_CASE("ops converges to the always-loaded optimum under heavy load") {
    const SystemParams p = SystemParams::from_shorthand(2e4, 1.0, 4.0, 4.0);
    const PolicySpec ops = schedopt::ops_optimize(p, Metric::PAoI);
    CHECK(ops.p1 == doctest::Approx(0.8).epsilon(2e-3));  // ratio sqrt(16) = 4
    CHECK(ops.kind == PolicyKind::OpsP);
    CHECK(ops.objective > 0.0);
}

TEST_CASE("ops returns a grid-certified minimizer") {
    const SystemParams p = SystemParams::from_shorthand(2.0, 0.5, 3.0, 2.0);
    for (Metric metric : {Metric::PAoI, Metric::AoI}) {
        const PolicySpec ops = schedopt::ops_optimize(p, metric);
        CHECK(schedopt::weighted_mean(p, SchedProb{ops.p1}, metric) ==
              doctest::Approx(ops.objective).epsilon(1e-12));
        for (double p1 = 0.01; p1 <= 0.991; p1 += 0.01) {
            CHECK(ops.objective <= schedopt::weighted_mean(p, SchedProb{p1}, metric) + 1e-9);
        }
    }
}

TEST_CASE("ops is invariant under source relabeling") {
    const SystemParams p = SystemParams::from_shorthand(1.7, 0.4, 2.5, 0.8);
    const SystemParams swapped = p.swapped();
    for (Metric metric : {Metric::PAoI, Metric::AoI}) {
        const double p1 = schedopt::ops_optimize(p, metric).p1;
        const double p1_sw = schedopt::ops_optimize(swapped, metric).p1;
        CHECK(p1 == doctest::Approx(1.0 - p1_sw).epsilon(5e-4));
    }
}

TEST_CASE("heuristics use only the weight and rate ratios") {
    CHECK(schedopt::heuristic_policy(4.0, 4.0, 1.0, Metric::PAoI, PolicyKind::H1).p1 ==
          doctest::Approx(0.8));
    CHECK(schedopt::heuristic_policy(4.0, 2.0, 2.0, Metric::AoI, PolicyKind::H1).p1 ==
          doctest::Approx(2.0 / 3.0));

    // Arrival rates do not enter.
    SystemParams a = SystemParams::from_shorthand(0.2, 0.1, 4.0, 4.0);
    SystemParams b = SystemParams::from_shorthand(9.0, 7.0, 4.0, 4.0);
    for (Metric metric : {Metric::PAoI, Metric::AoI}) {
        CHECK(schedopt::heuristic_policy(a, metric, PolicyKind::H1).p1 ==
              doctest::Approx(schedopt::heuristic_policy(b, metric, PolicyKind::H1).p1)
                  .epsilon(1e-12));
    }

    // Equal service rates collapse the two heuristics' targets.
    CHECK(schedopt::heuristic_policy(3.0, 1.5, 1.5, Metric::PAoI, PolicyKind::H1).p1 ==
          doctest::Approx(
              schedopt::heuristic_policy(3.0, 1.5, 1.5, Metric::AoI, PolicyKind::H1).p1)
              .epsilon(1e-9));
}

TEST_CASE("heuristic parameter matches the always-loaded ratio") {
    const PolicySpec h2 = schedopt::heuristic_policy(4.0, 4.0, 1.0, Metric::AoI, PolicyKind::H2, 25.0);
    const double ratio = closedform::ht_opt_ratio_aoi(4.0, 4.0, 1.0);
    CHECK(h2.p1 == doctest::Approx(ratio / (1.0 + ratio)).epsilon(1e-9));
    CHECK(h2.bucket_limit == 25.0);
    CHECK(h2.kind == PolicyKind::H2);
    CHECK_THROWS_AS(schedopt::heuristic_policy(4.0, 4.0, 1.0, Metric::AoI, PolicyKind::Npb),
                    ConfigError);
}

TEST_CASE("policy names round-trip") {
    for (const char* name : {"ops-p", "ops-a", "h1-p", "h1-a", "h2-p", "h2-a", "npb"}) {
        CHECK(schedopt::policy_name(schedopt::parse_policy_name(name)) == name);
    }
    CHECK_THROWS_AS(schedopt::parse_policy_name("rr"), ConfigError);
}
