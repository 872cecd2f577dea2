#ifndef AGEKIT_SBPSQ_HPP
#define AGEKIT_SBPSQ_HPP

#include <utility>
#include <vector>

#include "agekit/ctmc.hpp"

// Exact analysis of the two-source status-update system with single-buffer
// per-source queueing (SBPSQ) and probabilistic scheduling. A 9-state
// foreground chain gives the state seen by an arriving packet; a 14-state
// absorbing chain started from that distribution tracks a tagged packet to
// the next successful reception and yields the per-source AoI and peak-AoI
// distributions as matrix-exponential functionals.

namespace agekit::sbpsq {

// Traffic/service description for the two sources. Channel errors enter only
// through the effective service rate mu_i = nu_i * s_i (a geometric number of
// exponential attempts is again exponential).
struct SystemParams {
    double lambda1 = 1.0, lambda2 = 1.0;  // arrival rates
    double nu1 = 1.0, nu2 = 1.0;          // per-transmission service rates
    double s1 = 1.0, s2 = 1.0;            // channel success probabilities
    double omega1 = 0.5, omega2 = 0.5;    // weights, omega1 + omega2 = 1

    double mu1() const { return nu1 * s1; }
    double mu2() const { return nu2 * s2; }
    double rho1() const { return lambda1 / mu1(); }
    double rho2() const { return lambda2 / mu2(); }
    double rho() const { return rho1() + rho2(); }
    double r1() const { return rho1() / rho(); }
    double r2() const { return rho2() / rho(); }
    double mix_ratio() const { return rho1() / rho2(); }      // r = r1/r2
    double weight_ratio() const { return omega1 / omega2; }   // omega
    double rate_ratio() const { return mu1() / mu2(); }       // mu

    SystemParams swapped() const;
    void validate() const;  // throws ConfigError

    // Shorthand used throughout the sweeps: total load rho, mix ratio
    // r = rho1/rho2, weight ratio omega, service rate ratio mu, with mu2
    // fixed to 1 and ideal channels.
    static SystemParams from_shorthand(double rho, double r, double omega, double mu);
};

// Probability of serving source 1 when both queues hold a packet.
struct SchedProb {
    double p1 = 0.5;

    double p2() const { return 1.0 - p1; }
    double ratio() const { return p1 / p2(); }  // p = p1/p2

    void validate() const;  // p1 must lie strictly inside (0,1)
    static SchedProb clamped(double p1);  // clamp to [1e-6, 1 - 1e-6]
};

std::pair<SystemParams, SchedProb> swap_sources(const SystemParams& params, SchedProb sp);

// 9-state foreground chain of the system occupancy (state order: idle; busy-1
// with the four queue fillings; busy-2 with the four queue fillings).
ctmc::Generator build_foreground(const SystemParams& params, SchedProb sp);

// 14-state absorbing chain for a tagged source-1 packet. Absorption vectors
// "u" (tagged packet replaced while waiting) and "s" (next successful
// reception), weight vector "h" (tagged packet delivered, successor pending),
// and alpha assembled from the foreground stationary vector pi. Throws
// InconsistentInput when pi does not solve the foreground chain.
ctmc::AbsorbingChain build_absorbing(const SystemParams& params, SchedProb sp,
                                     const ctmc::RowVector& pi);

// Absorbing chain for either source; source 2 is handled by relabeling.
ctmc::AbsorbingChain source_chain(const SystemParams& params, SchedProb sp, int source);

// Per-source peak-AoI and AoI functionals. source is 1 or 2; k >= 1 for moments.
double paoi_pdf(const SystemParams& params, SchedProb sp, int source, double x);
double aoi_pdf(const SystemParams& params, SchedProb sp, int source, double x);
double paoi_cdf(const SystemParams& params, SchedProb sp, int source, double x);
double aoi_cdf(const SystemParams& params, SchedProb sp, int source, double x);
double paoi_moment(const SystemParams& params, SchedProb sp, int source, int k);
double aoi_moment(const SystemParams& params, SchedProb sp, int source, int k);

struct SourceMetrics {
    double paoi_mean = 0.0, paoi_m2 = 0.0;  // first two non-central moments
    double aoi_mean = 0.0, aoi_m2 = 0.0;

    double paoi_var() const { return paoi_m2 - paoi_mean * paoi_mean; }
    double aoi_var() const { return aoi_m2 - aoi_mean * aoi_mean; }
};

struct DensityTable {
    std::vector<double> x;
    std::vector<double> paoi;
    std::vector<double> aoi;
};

struct MetricReport {
    SourceMetrics source1, source2;
    double w_paoi = 0.0;  // omega1 E[peak AoI 1] + omega2 E[peak AoI 2]
    double w_aoi = 0.0;
};

MetricReport weighted_metrics(const SystemParams& params, SchedProb sp);

// Densities sampled on a log-spaced grid spanning [1e-3, 20] times the
// respective means (n points).
DensityTable density_table(const SystemParams& params, SchedProb sp, int source, int n = 400);

}  // namespace agekit::sbpsq

#endif
