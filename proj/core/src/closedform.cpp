#include "agekit/closedform.hpp"

#include <cmath>

#include "agekit/minimize.hpp"

namespace agekit::closedform {

using ctmc::Matrix;
using ctmc::RowVector;
using ctmc::Vector;

namespace {

constexpr double kP1Lo = 1e-6;
constexpr double kP1Hi = 1.0 - 1e-6;

void require_positive(double v, const char* name) {
    if (!(std::isfinite(v) && v > 0.0)) {
        throw ConfigError(std::string(name) + " must be positive");
    }
}

// Split a weight ratio omega = w1/w2 into normalized weights.
std::pair<double, double> split_ratio(double omega) {
    const double w1 = omega / (1.0 + omega);
    return {w1, 1.0 - w1};
}

}  // namespace

void HeavyTrafficParams::validate() const {
    require_positive(mu1, "mu1");
    require_positive(mu2, "mu2");
    if (!(p1 > 0.0 && p1 < 1.0)) throw ConfigError("p1 must lie strictly inside (0, 1)");
}

void NpbParams::validate() const {
    require_positive(lambda1, "lambda1");
    require_positive(lambda2, "lambda2");
    require_positive(mu1, "mu1");
    require_positive(mu2, "mu2");
}

ctmc::AbsorbingChain ht_chain(const HeavyTrafficParams& htp) {
    htp.validate();
    const double m1 = htp.mu1, m2 = htp.mu2, p1 = htp.p1, p2 = htp.p2();

    // Tagged packet in service; then a run of source-2 services; then the
    // successor source-1 packet in service.
    Matrix a(3, 3);
    a << -m1, m1 * p2, m1 * p1,  //
        0.0, -m2 * p1, m2 * p1,  //
        0.0, 0.0, -m1;

    Vector s(3);
    s << 0.0, 0.0, m1;
    Vector h(3);
    h << 0.0, 1.0, 1.0;
    RowVector alpha(3);
    alpha << 1.0, 0.0, 0.0;

    ctmc::AbsorbingChain chain;
    chain.A = std::move(a);
    chain.absorb = {{"s", std::move(s)}};
    chain.weight = {{"h", std::move(h)}};
    chain.alpha = std::move(alpha);
    chain.validate();
    return chain;
}

double ht_mean_paoi(const HeavyTrafficParams& htp, int source) {
    htp.validate();
    if (source == 2) {
        return ht_mean_paoi({htp.mu2, htp.mu1, htp.p2()}, 1);
    }
    if (source != 1) throw ConfigError("source must be 1 or 2");
    return 2.0 / htp.mu1 + htp.p2() / (htp.mu2 * htp.p1);
}

double ht_mean_aoi(const HeavyTrafficParams& htp, int source) {
    htp.validate();
    if (source == 2) {
        return ht_mean_aoi({htp.mu2, htp.mu1, htp.p2()}, 1);
    }
    if (source != 1) throw ConfigError("source must be 1 or 2");
    const double m1 = htp.mu1, m2 = htp.mu2, p1 = htp.p1, p2 = htp.p2();
    return 1.0 / m1 + (m2 * p1 + m1) / (m1 * m2 * p1) - 1.0 / (m2 * p1 + m1 * p2);
}

double ht_weighted_paoi(double omega, double mu1, double mu2, double p1) {
    const auto [w1, w2] = split_ratio(omega);
    return w1 * ht_mean_paoi({mu1, mu2, p1}, 1) + w2 * ht_mean_paoi({mu1, mu2, p1}, 2);
}

double ht_weighted_aoi(double omega, double mu1, double mu2, double p1) {
    const auto [w1, w2] = split_ratio(omega);
    return w1 * ht_mean_aoi({mu1, mu2, p1}, 1) + w2 * ht_mean_aoi({mu1, mu2, p1}, 2);
}

double ht_opt_ratio_paoi(double omega, double mu) {
    require_positive(omega, "omega");
    require_positive(mu, "mu");
    return std::sqrt(omega * mu);
}

double ht_opt_ratio_aoi(double omega, double mu1, double mu2) {
    require_positive(omega, "omega");
    require_positive(mu1, "mu1");
    require_positive(mu2, "mu2");
    if (mu1 == mu2) return std::sqrt(omega);
    auto objective = [&](double p1) { return ht_weighted_aoi(omega, mu1, mu2, p1); };
    const auto best = opt::grid_then_golden(objective, kP1Lo, kP1Hi, 1000, 1e-8);
    return best.x / (1.0 - best.x);
}

ctmc::AbsorbingChain npb_chain(const NpbParams& np) {
    np.validate();
    const double l1 = np.lambda1, l2 = np.lambda2, m1 = np.mu1, m2 = np.mu2;

    // Tagged packet in service; idle wait for the next arrival; a source-2
    // service; the successor source-1 packet in service.
    Matrix a(4, 4);
    a << -m1, m1, 0.0, 0.0,         //
        0.0, -(l1 + l2), l2, l1,    //
        0.0, m2, -m2, 0.0,          //
        0.0, 0.0, 0.0, -m1;

    Vector s(4);
    s << 0.0, 0.0, 0.0, m1;
    Vector h(4);
    h << 0.0, 1.0, 1.0, 1.0;
    RowVector alpha(4);
    alpha << 1.0, 0.0, 0.0, 0.0;

    ctmc::AbsorbingChain chain;
    chain.A = std::move(a);
    chain.absorb = {{"s", std::move(s)}};
    chain.weight = {{"h", std::move(h)}};
    chain.alpha = std::move(alpha);
    chain.validate();
    return chain;
}

double npb_mean_paoi(const NpbParams& np, int source) {
    np.validate();
    if (source == 2) {
        return npb_mean_paoi({np.lambda2, np.lambda1, np.mu2, np.mu1}, 1);
    }
    if (source != 1) throw ConfigError("source must be 1 or 2");
    return 1.0 / np.mu1 + (1.0 + np.rho()) / np.lambda1;
}

double npb_mean_aoi(const NpbParams& np, int source) {
    np.validate();
    if (source == 2) {
        return npb_mean_aoi({np.lambda2, np.lambda1, np.mu2, np.mu1}, 1);
    }
    if (source != 1) throw ConfigError("source must be 1 or 2");
    const double m1 = np.mu1, m2 = np.mu2, l2 = np.lambda2;
    const double rho1 = np.rho1(), rho2 = np.rho2(), rho = np.rho();
    return (m2 + m2 / rho1 + l2 / rho1 + (m2 * rho1 + m1 * rho2) / (1.0 + rho)) / (m1 * m2);
}

namespace {

NpbParams npb_from_mix(double mu1, double mu2, double rho, double r1) {
    NpbParams np;
    np.mu1 = mu1;
    np.mu2 = mu2;
    np.lambda1 = rho * r1 * mu1;
    np.lambda2 = rho * (1.0 - r1) * mu2;
    return np;
}

}  // namespace

double npb_weighted_paoi(double omega, double mu1, double mu2, double rho, double r1) {
    const auto [w1, w2] = split_ratio(omega);
    const NpbParams np = npb_from_mix(mu1, mu2, rho, r1);
    return w1 * npb_mean_paoi(np, 1) + w2 * npb_mean_paoi(np, 2);
}

double npb_weighted_aoi(double omega, double mu1, double mu2, double rho, double r1) {
    const auto [w1, w2] = split_ratio(omega);
    const NpbParams np = npb_from_mix(mu1, mu2, rho, r1);
    return w1 * npb_mean_aoi(np, 1) + w2 * npb_mean_aoi(np, 2);
}

double npb_opt_mix_paoi(double omega, double mu) {
    require_positive(omega, "omega");
    require_positive(mu, "mu");
    return std::sqrt(omega / mu);
}

double npb_opt_arrival_ratio_paoi(double omega, double mu) {
    require_positive(omega, "omega");
    require_positive(mu, "mu");
    return std::sqrt(omega * mu);
}

MixOptimum npb_opt_mix_aoi(double rho, double omega, double mu1, double mu2) {
    require_positive(rho, "rho");
    require_positive(omega, "omega");
    require_positive(mu1, "mu1");
    require_positive(mu2, "mu2");
    auto objective = [&](double r1) { return npb_weighted_aoi(omega, mu1, mu2, rho, r1); };
    const auto best = opt::grid_then_golden(objective, kP1Lo, kP1Hi, 1000, 1e-8);
    return {best.x, best.x / (1.0 - best.x), best.value};
}

}  // namespace agekit::closedform
