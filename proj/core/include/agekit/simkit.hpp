#ifndef AGEKIT_SIMKIT_HPP
#define AGEKIT_SIMKIT_HPP

#include <cstdint>
#include <vector>

#include "agekit/schedopt.hpp"
#include "agekit/sbpsq.hpp"

// Discrete-event simulator for the two-source status-update system. Supports
// the single-buffer per-source queueing disciplines (probabilistic H1-style
// scheduling and bucket-based H2 scheduling) and the non-preemptive
// bufferless benchmark. Retransmissions are collapsed into the effective
// exponential service rate mu_i = nu_i * s_i. AoI is integrated exactly as a
// unit-slope sawtooth.

namespace agekit::simkit {

struct SimConfig {
    sbpsq::SystemParams params;
    schedopt::PolicySpec policy;

    std::uint64_t horizon_events = 1'000'000;  // 0: run to horizon_time instead
    double horizon_time = 0.0;
    double warmup_fraction = 0.2;  // in [0, 0.5)
    int replications = 1;
    std::uint64_t seed = 1;

    bool collect_peaks = false;  // keep post-warmup peak samples per source
    int aoi_hist_bins = 0;       // time-weighted AoI histogram (0: off)
    double aoi_hist_xmax = 0.0;

    void validate() const;  // throws ConfigError
};

struct SourceStats {
    double time_avg_aoi = 0.0;  // post-warmup
    double mean_paoi = 0.0;     // post-warmup
    std::uint64_t arrivals = 0;  // whole run
    std::uint64_t receptions = 0;
    std::uint64_t replacements = 0;  // waiting packet replaced by fresher one
    std::uint64_t discards = 0;      // bufferless drops
    std::uint64_t post_receptions = 0;
    std::vector<double> peaks;     // when collect_peaks
    std::vector<double> aoi_hist;  // time fraction per bin, when enabled
};

struct SimStats {
    SourceStats source1, source2;
    double w_paoi = 0.0, w_aoi = 0.0;
    double elapsed = 0.0;       // total simulated time
    double post_elapsed = 0.0;  // post-warmup simulated time
    std::uint64_t events = 0;
    std::uint64_t tx1 = 0, tx2 = 0;            // post-warmup service starts
    std::uint64_t alternation_breaks = 0;      // post-warmup back-to-back same-source starts
    bool undersampled = false;  // a source saw fewer than 1e4 post-warmup receptions
};

// Area under a unit-slope age segment: the age starts the interval at
// last_reset_age and grows linearly.
inline double aoi_accumulate(double last_reset_age, double interval) {
    return last_reset_age * interval + 0.5 * interval * interval;
}

// Single deterministic replication. Independent streams are derived from
// (seed, replication, purpose) for the two arrival processes, the service
// times and the scheduler coins, so arrival patterns are common across
// policies under a common seed.
SimStats simulate(const SimConfig& cfg, int replication = 0);

struct Summary {
    double mean = 0.0;
    double ci_low = 0.0, ci_high = 0.0;  // 95% t-interval across replications
};

struct ReplicatedStats {
    std::vector<SimStats> reps;
    Summary aoi1, aoi2, paoi1, paoi2, w_paoi, w_aoi;
    bool undersampled = false;
};

// Replications use the seeds (cfg.seed, 0..replications-1) and are merged in
// replication order, so the result does not depend on the thread count.
ReplicatedStats replicate(const SimConfig& cfg, int threads = 1);

// 0.975 Student-t quantile for the given degrees of freedom.
double t_quantile_975(int df);

}  // namespace agekit::simkit

#endif
