#include <doctest.h>

#include <cmath>
#include <random>

#include "agekit/closedform.hpp"
#include "agekit/sbpsq.hpp"
#include "oracles.hpp"

using namespace agekit;
using sbpsq::SchedProb;
using sbpsq::SystemParams;

namespace {

// 1-based accessors matching the state tables used for review.
double gen_entry(const ctmc::Generator& g, int from, int to) {
    return g.matrix()(from - 1, to - 1);
}

SystemParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> lam(0.2, 5.0), mu(0.3, 4.0), w(0.1, 0.9);
    SystemParams p;
    p.lambda1 = lam(rng);
    p.lambda2 = lam(rng);
    p.nu1 = mu(rng);
    p.nu2 = mu(rng);
    p.omega1 = w(rng);
    p.omega2 = 1.0 - p.omega1;
    return p;
}

}  // namespace

TEST_CASE("shorthand expansion and its round trip") {
    const SystemParams p = SystemParams::from_shorthand(2.5, 0.4, 4.0, 0.5);
    CHECK(p.mu2() == doctest::Approx(1.0));
    CHECK(p.rho() == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(p.mix_ratio() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(p.weight_ratio() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(p.rate_ratio() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(SystemParams::from_shorthand(-1.0, 1.0, 1.0, 1.0), ConfigError);
}

TEST_CASE("swap_sources is an involution that exchanges the sources") {
    SystemParams p;
    p.lambda1 = 1.0;
    p.lambda2 = 2.0;
    p.nu1 = 3.0;
    p.nu2 = 4.0;
    p.s1 = 0.5;
    p.s2 = 0.9;
    p.omega1 = 0.25;
    p.omega2 = 0.75;
    const auto [sw, sp] = sbpsq::swap_sources(p, SchedProb{0.3});
    CHECK(sw.lambda1 == 2.0);
    CHECK(sw.lambda2 == 1.0);
    CHECK(sw.nu1 == 4.0);
    CHECK(sw.s2 == 0.5);
    CHECK(sw.omega1 == 0.75);
    CHECK(sp.p1 == doctest::Approx(0.7));
    const auto [back, sp2] = sbpsq::swap_sources(sw, sp);
    CHECK(back.lambda1 == p.lambda1);
    CHECK(back.nu2 == p.nu2);
    CHECK(sp2.p1 == doctest::Approx(0.3));
}

TEST_CASE("foreground chain structure") {
    const SystemParams p = SystemParams::from_shorthand(2.0, 1.0, 1.0, 1.0);
    const SchedProb sp{0.5};
    const auto gen = sbpsq::build_foreground(p, sp);

    SUBCASE("scheduling rows split the completion rate by the coin") {
        CHECK(gen_entry(gen, 5, 4) == doctest::Approx(p.mu1() * 0.5));
        CHECK(gen_entry(gen, 5, 7) == doctest::Approx(p.mu1() * 0.5));
        CHECK(gen_entry(gen, 9, 4) == doctest::Approx(p.mu2() * 0.5));
        CHECK(gen_entry(gen, 9, 7) == doctest::Approx(p.mu2() * 0.5));
    }
    SUBCASE("rows sum to zero") {
        CHECK((gen.matrix() * Eigen::VectorXd::Ones(9)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("single-source limit confines the stationary mass to the busy-1 cycle") {
        SystemParams single;
        single.lambda1 = 1.0;
        single.lambda2 = 1e-9;
        single.nu1 = single.nu2 = 1.0;
        const auto pi = ctmc::stationary(sbpsq::build_foreground(single, SchedProb{0.5}));
        for (int j = 3; j < 9; ++j) CHECK(pi(j) < 1e-6);  // states 4..9
        CHECK(pi(0) + pi(1) + pi(2) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("stationary golden fixture for the symmetric unit-rate system") {
    // Frozen from an independent least-squares solve of pi Q = 0, sum(pi) = 1.
    const SystemParams p = SystemParams::from_shorthand(2.0, 1.0, 1.0, 1.0);  // lambda_i = mu_i = 1
    const auto pi = ctmc::stationary(sbpsq::build_foreground(p, SchedProb{0.5}));
    const double golden[9] = {1.0 / 11, 1.0 / 11, 1.0 / 22, 3.0 / 22, 2.0 / 11,
                              1.0 / 11, 3.0 / 22, 1.0 / 22, 2.0 / 11};
    for (int j = 0; j < 9; ++j) CHECK(pi(j) == doctest::Approx(golden[j]).epsilon(1e-12));
    // Source-exchange symmetry: 2<->6, 3<->8, 4<->7, 5<->9 (1-based).
    CHECK(pi(1) == doctest::Approx(pi(5)));
    CHECK(pi(2) == doctest::Approx(pi(7)));
    CHECK(pi(3) == doctest::Approx(pi(6)));
    CHECK(pi(4) == doctest::Approx(pi(8)));
    // Cross-check against the least-squares oracle.
    const auto ref = oracles::stationary_lstsq(sbpsq::build_foreground(p, SchedProb{0.5}).matrix());
    CHECK((pi - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("absorbing chain structure") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 10; ++trial) {
        const SystemParams p = random_params(rng);
        const SchedProb sp{std::uniform_real_distribution<double>(0.05, 0.95)(rng)};
        const auto pi = ctmc::stationary(sbpsq::build_foreground(p, sp));
        const auto chain = sbpsq::build_absorbing(p, sp, pi);

        const auto& u = chain.absorb_vector("u");
        const auto& s = chain.absorb_vector("s");
        const auto closure = chain.A * Eigen::VectorXd::Ones(14) + u + s;
        CHECK(closure.cwiseAbs().maxCoeff() < 1e-12);
        CHECK(chain.alpha.sum() == doctest::Approx(1.0).epsilon(1e-12));

        // Successful absorption only from transient state 10 (1-based), at mu1.
        for (int j = 0; j < 14; ++j) {
            if (j == 9) {
                CHECK(s(j) == doctest::Approx(p.mu1()));
            } else {
                CHECK(s(j) == 0.0);
            }
        }
        // h marks exactly states 9..14 (1-based).
        const auto& h = chain.weight_vector("h");
        for (int j = 0; j < 14; ++j) CHECK(h(j) == (j >= 8 ? 1.0 : 0.0));
        // Replacement rates sit exactly on the four waiting states.
        for (int j : {2, 5, 6, 7}) CHECK(u(j) == doctest::Approx(p.lambda1));
    }
}

TEST_CASE("absorbing chain rejects an inconsistent stationary vector") {
    const SystemParams p = SystemParams::from_shorthand(1.0, 1.0, 1.0, 1.0);
    ctmc::RowVector bad = ctmc::RowVector::Constant(9, 1.0 / 9.0);
    CHECK_THROWS_AS(sbpsq::build_absorbing(p, SchedProb{0.5}, bad), InconsistentInput);
}

TEST_CASE("peak-AoI density: no mass at zero and unit total mass") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 4; ++trial) {
        const SystemParams p = random_params(rng);
        const SchedProb sp{0.35};
        for (int source : {1, 2}) {
            CHECK(sbpsq::paoi_pdf(p, sp, source, 0.0) == doctest::Approx(0.0));
            CHECK(sbpsq::aoi_pdf(p, sp, source, 0.0) == doctest::Approx(0.0));

            const auto chain = sbpsq::source_chain(p, sp, source);
            for (const char* which : {"s", "h"}) {
                const ctmc::Vector& w = which[0] == 's' ? chain.absorb_vector("s")
                                                        : chain.weight_vector("h");
                const double mean = ctmc::moment(chain, w, 1);
                auto f = [&](double x) { return ctmc::pdf(chain, w, x, 1e-10); };
                double hi = 8.0 * mean;
                while (ctmc::cdf(chain, w, hi) < 1.0 - 1e-9) hi *= 2.0;
                CHECK(oracles::simpson(f, 0.0, hi, 6000) == doctest::Approx(1.0).epsilon(1e-6));
            }
        }
    }
}

TEST_CASE("moments approach the always-loaded closed forms in heavy traffic") {
    // lambda = 1e4 * mu with mu1 = 2, mu2 = 1, p1 = 0.3.
    SystemParams p;
    p.lambda1 = 2e4;
    p.lambda2 = 1e4;
    p.nu1 = 2.0;
    p.nu2 = 1.0;
    const SchedProb sp{0.3};
    const closedform::HeavyTrafficParams htp{2.0, 1.0, 0.3};
    for (int source : {1, 2}) {
        const double paoi = sbpsq::paoi_moment(p, sp, source, 1);
        const double aoi = sbpsq::aoi_moment(p, sp, source, 1);
        CHECK(paoi == doctest::Approx(closedform::ht_mean_paoi(htp, source)).epsilon(0.01));
        CHECK(aoi == doctest::Approx(closedform::ht_mean_aoi(htp, source)).epsilon(0.01));
    }
    // Symmetric special case: both means approach 3.
    const SystemParams sym = SystemParams::from_shorthand(2e4, 1.0, 1.0, 1.0);
    CHECK(sbpsq::paoi_moment(sym, SchedProb{0.5}, 1, 1) == doctest::Approx(3.0).epsilon(0.01));
    CHECK(sbpsq::aoi_moment(sym, SchedProb{0.5}, 1, 1) == doctest::Approx(3.0).epsilon(0.01));
}

TEST_CASE("source exchange swaps the moments exactly") {
    std::mt19937_64 rng(4);
    const SystemParams p = random_params(rng);
    const SchedProb sp{0.7};
    const auto [sw, swsp] = sbpsq::swap_sources(p, sp);
    for (int k : {1, 2}) {
        CHECK(sbpsq::paoi_moment(p, sp, 2, k) ==
              doctest::Approx(sbpsq::paoi_moment(sw, swsp, 1, k)).epsilon(1e-12));
        CHECK(sbpsq::aoi_moment(p, sp, 1, k) ==
              doctest::Approx(sbpsq::aoi_moment(sw, swsp, 2, k)).epsilon(1e-12));
    }
}

TEST_CASE("moment inequalities hold") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        const SystemParams p = random_params(rng);
        const SchedProb sp{std::uniform_real_distribution<double>(0.1, 0.9)(rng)};
        for (int source : {1, 2}) {
            const double m1 = sbpsq::paoi_moment(p, sp, source, 1);
            const double m2 = sbpsq::paoi_moment(p, sp, source, 2);
            CHECK(m1 > 0.0);
            CHECK(m2 >= m1 * m1);
            CHECK(sbpsq::aoi_moment(p, sp, source, 2) >=
                  sbpsq::aoi_moment(p, sp, source, 1) * sbpsq::aoi_moment(p, sp, source, 1));
        }
    }
}

TEST_CASE("mean AoI vs mean peak AoI: ordering holds at balanced points only") {
    // Balanced, evenly scheduled system: the time average stays below the
    // mean peak.
    const SystemParams balanced = SystemParams::from_shorthand(1.0, 1.0, 1.0, 1.0);
    CHECK(sbpsq::aoi_moment(balanced, SchedProb{0.5}, 1, 1) <
          sbpsq::paoi_moment(balanced, SchedProb{0.5}, 1, 1));

    // Starve source 2 of service attention and the time average overtakes the
    // mean peak (long cycles dominate the time average). Simulation of this
    // point gives AoI 5.102 +- 0.034 and peak 1.932 +- 0.010.
    SystemParams starved;
    starved.lambda1 = 0.816;
    starved.lambda2 = 4.756;
    starved.nu1 = 0.537;
    starved.nu2 = 3.356;
    const SchedProb sp{0.979};
    CHECK(sbpsq::aoi_moment(starved, sp, 2, 1) == doctest::Approx(5.10374).epsilon(1e-4));
    CHECK(sbpsq::paoi_moment(starved, sp, 2, 1) == doctest::Approx(1.93072).epsilon(1e-4));
    CHECK(sbpsq::aoi_moment(starved, sp, 2, 1) > sbpsq::paoi_moment(starved, sp, 2, 1));
}

TEST_CASE("cdf properties") {
    const SystemParams p = SystemParams::from_shorthand(1.6, 0.8, 2.0, 1.5);
    const SchedProb sp{0.45};
    for (int source : {1, 2}) {
        CHECK(sbpsq::paoi_cdf(p, sp, source, 0.0) == doctest::Approx(0.0));
        CHECK(sbpsq::aoi_cdf(p, sp, source, 0.0) == doctest::Approx(0.0));
        double prev = 0.0;
        for (double x = 0.4; x < 50.0; x *= 1.5) {
            const double cur = sbpsq::paoi_cdf(p, sp, source, x);
            CHECK(cur >= prev - 1e-9);
            prev = cur;
        }
        CHECK(prev == doctest::Approx(1.0).epsilon(1e-5));
    }
}

TEST_CASE("weighted metrics") {
    SUBCASE("symmetric network has equal sources") {
        const SystemParams p = SystemParams::from_shorthand(1.0, 1.0, 1.0, 1.0);
        const auto rep = sbpsq::weighted_metrics(p, SchedProb{0.5});
        CHECK(rep.source1.paoi_mean == doctest::Approx(rep.source2.paoi_mean).epsilon(1e-12));
        CHECK(rep.w_paoi == doctest::Approx(rep.source1.paoi_mean).epsilon(1e-12));
        CHECK(rep.w_aoi == doctest::Approx(rep.source1.aoi_mean).epsilon(1e-12));
        // Golden values for the symmetric unit-load system.
        CHECK(rep.source1.paoi_mean == doctest::Approx(47.0 / 11.0).epsilon(1e-12));
        CHECK(rep.source1.aoi_mean == doctest::Approx(185.0 / 49.0).epsilon(1e-12));
    }
    SUBCASE("degenerate weight reduces to the other source") {
        SystemParams p = SystemParams::from_shorthand(1.0, 1.0, 1.0, 1.0);
        p.omega1 = 0.0;
        p.omega2 = 1.0;
        const auto rep = sbpsq::weighted_metrics(p, SchedProb{0.3});
        CHECK(rep.w_paoi == doctest::Approx(rep.source2.paoi_mean));
    }
    SUBCASE("golden fixture at rho=1, r=1, omega=4, mu=4") {
        // Frozen from this model; cross-validated against simulation in the
        // simulator test suite.
        const SystemParams p = SystemParams::from_shorthand(1.0, 1.0, 4.0, 4.0);
        const auto rep = sbpsq::weighted_metrics(p, SchedProb{0.5});
        CHECK(rep.source1.paoi_mean == doctest::Approx(1.2122120425604386).epsilon(1e-12));
        CHECK(rep.source2.paoi_mean == doctest::Approx(3.8068900926364).epsilon(1e-12));
        CHECK(rep.source1.aoi_mean == doctest::Approx(1.3729562845892895).epsilon(1e-12));
        CHECK(rep.source2.aoi_mean == doctest::Approx(3.3275342657463201).epsilon(1e-12));
        CHECK(rep.w_paoi == doctest::Approx(1.7311476525756309).epsilon(1e-12));
        CHECK(rep.w_aoi == doctest::Approx(1.7638718808206955).epsilon(1e-12));
    }
}

TEST_CASE("metrics vary continuously in the scheduling probability") {
    const SystemParams p = SystemParams::from_shorthand(3.0, 0.5, 2.0, 2.0);
    double prev_paoi = 0.0, prev_aoi = 0.0;
    bool first = true;
    double max_jump = 0.0;
    for (double p1 = 0.02; p1 <= 0.981; p1 += 0.01) {
        const auto rep = sbpsq::weighted_metrics(p, SchedProb{p1});
        if (!first) {
            max_jump = std::max(max_jump, std::abs(rep.w_paoi - prev_paoi));
            max_jump = std::max(max_jump, std::abs(rep.w_aoi - prev_aoi));
        }
        prev_paoi = rep.w_paoi;
        prev_aoi = rep.w_aoi;
        first = false;
    }
    // The weighted means move smoothly: no step of the 0.01 grid jumps by
    // more than a small multiple of the total variation scale.
    CHECK(max_jump < 0.5);
}

TEST_CASE("density tables integrate to one and match pointwise evaluation") {
    const SystemParams p = SystemParams::from_shorthand(1.2, 1.0, 1.0, 1.0);
    const SchedProb sp{0.5};
    const auto table = sbpsq::density_table(p, sp, 1, 200);
    REQUIRE(table.x.size() == 200);
    CHECK(table.paoi.front() < table.paoi[100]);  // rises from ~0
    for (std::size_t i = 0; i < table.x.size(); i += 37) {
        CHECK(table.paoi[i] ==
              doctest::Approx(sbpsq::paoi_pdf(p, sp, 1, table.x[i])).epsilon(1e-6));
        CHECK(table.aoi[i] == doctest::Approx(sbpsq::aoi_pdf(p, sp, 1, table.x[i])).epsilon(1e-6));
    }
}

TEST_CASE("scheduling probability validation") {
    CHECK_THROWS_AS(SchedProb{0.0}.validate(), ConfigError);
    CHECK_THROWS_AS(SchedProb{1.0}.validate(), ConfigError);
    CHECK(SchedProb::clamped(0.0).p1 == doctest::Approx(1e-6));
    CHECK(SchedProb::clamped(1.0).p1 == doctest::Approx(1.0 - 1e-6));
    CHECK(SchedProb::clamped(0.37).p1 == doctest::Approx(0.37));
}
