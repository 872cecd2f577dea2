#ifndef AGEKIT_CLOSEDFORM_HPP
#define AGEKIT_CLOSEDFORM_HPP

#include "agekit/ctmc.hpp"

// Closed-form companions to the exact SBPSQ model: the heavy-traffic limit
// (both queues always full, 3 transient states) and the non-preemptive
// bufferless benchmark (4 transient states), together with the optimal
// scheduling/traffic-mix ratios they induce.

namespace agekit::closedform {

struct HeavyTrafficParams {
    double mu1 = 1.0, mu2 = 1.0;
    double p1 = 0.5;

    double p2() const { return 1.0 - p1; }
    double prob_ratio() const { return p1 / p2(); }
    double rate_ratio() const { return mu1 / mu2; }
    void validate() const;
};

struct NpbParams {
    double lambda1 = 1.0, lambda2 = 1.0;
    double mu1 = 1.0, mu2 = 1.0;

    double rho1() const { return lambda1 / mu1; }
    double rho2() const { return lambda2 / mu2; }
    double rho() const { return rho1() + rho2(); }
    double arrival_ratio() const { return lambda1 / lambda2; }
    void validate() const;
};

// 3-state absorbing chain of the heavy-traffic regime (upper triangular A,
// absorption vector "s", weight vector "h", alpha = e_1).
ctmc::AbsorbingChain ht_chain(const HeavyTrafficParams& htp);

// E[peak AoI] = 2/mu_1 + p_2/(mu_2 p_1) and its source-2 mirror.
double ht_mean_paoi(const HeavyTrafficParams& htp, int source);

// E[AoI] = 1/mu_1 + (mu_2 p_1 + mu_1)/(mu_1 mu_2 p_1) - 1/(mu_2 p_1 + mu_1 p_2)
// and its source-2 mirror; reduces to 1/u + 1/(u p_1) when mu_1 = mu_2 = u.
double ht_mean_aoi(const HeavyTrafficParams& htp, int source);

// Weighted heavy-traffic means for a probability ratio p = p1/p2 and weight
// ratio omega = omega1/omega2 (weights normalized internally).
double ht_weighted_paoi(double omega, double mu1, double mu2, double p1);
double ht_weighted_aoi(double omega, double mu1, double mu2, double p1);

// Optimal probability ratio p* = p1/p2 minimizing the weighted peak-AoI:
// p* = sqrt(omega * mu) with mu = mu1/mu2.
double ht_opt_ratio_paoi(double omega, double mu);

// Optimal probability ratio for weighted AoI. Equals sqrt(omega) when
// mu1 = mu2; otherwise found by bracketed scalar minimization (the
// stationarity condition is a quartic with no usable closed form).
double ht_opt_ratio_aoi(double omega, double mu1, double mu2);

// 4-state absorbing chain of the non-preemptive bufferless server.
ctmc::AbsorbingChain npb_chain(const NpbParams& np);

// E[peak AoI] = 1/mu_1 + (1 + rho)/lambda_1 and its source-2 mirror.
double npb_mean_paoi(const NpbParams& np, int source);

// E[AoI] = (mu_2 + mu_2/rho_1 + lambda_2/rho_1 + (mu_2 rho_1 + mu_1 rho_2)/(1+rho)) / (mu_1 mu_2).
double npb_mean_aoi(const NpbParams& np, int source);

// Weighted bufferless peak-AoI as a function of the traffic mix fraction r1
// at fixed total load rho.
double npb_weighted_paoi(double omega, double mu1, double mu2, double rho, double r1);
double npb_weighted_aoi(double omega, double mu1, double mu2, double rho, double r1);

// Optimal traffic mix ratio r* = r1/r2 minimizing the weighted peak-AoI:
// sqrt(omega / mu); independent of the load rho.
double npb_opt_mix_paoi(double omega, double mu);

// Optimal arrival rate ratio lambda* = lambda1/lambda2 = sqrt(omega * mu).
double npb_opt_arrival_ratio_paoi(double omega, double mu);

struct MixOptimum {
    double r1 = 0.5;     // optimal mix fraction
    double ratio = 1.0;  // r1 / (1 - r1)
    double value = 0.0;  // weighted AoI at the optimum
};

// Optimal traffic mix for weighted AoI at fixed load (numeric minimization;
// the stationarity condition is again a quartic).
MixOptimum npb_opt_mix_aoi(double rho, double omega, double mu1, double mu2);

}  // namespace agekit::closedform

#endif
