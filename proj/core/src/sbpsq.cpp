#include "agekit/sbpsq.hpp"

#include <cmath>

namespace agekit::sbpsq {

using ctmc::Matrix;
using ctmc::RowVector;
using ctmc::Vector;

SystemParams SystemParams::swapped() const {
    SystemParams p = *this;
    std::swap(p.lambda1, p.lambda2);
    std::swap(p.nu1, p.nu2);
    std::swap(p.s1, p.s2);
    std::swap(p.omega1, p.omega2);
    return p;
}

void SystemParams::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(lambda1) || !positive(lambda2)) throw ConfigError("arrival rates must be positive");
    if (!positive(nu1) || !positive(nu2)) throw ConfigError("service rates must be positive");
    if (!(s1 > 0.0 && s1 <= 1.0 && s2 > 0.0 && s2 <= 1.0)) {
        throw ConfigError("channel success probabilities must lie in (0, 1]");
    }
    if (!positive(omega1) && omega1 != 0.0) throw ConfigError("weights must be nonnegative");
    if (!positive(omega2) && omega2 != 0.0) throw ConfigError("weights must be nonnegative");
    if (std::abs(omega1 + omega2 - 1.0) > 1e-9) throw ConfigError("weights must sum to 1");
}

SystemParams SystemParams::from_shorthand(double rho, double r, double omega, double mu) {
    if (!(rho > 0.0) || !(r > 0.0) || !(omega > 0.0) || !(mu > 0.0)) {
        throw ConfigError("shorthand parameters rho, r, omega, mu must be positive");
    }
    SystemParams p;
    p.nu1 = mu;  // mu2 = 1 fixes the time unit
    p.nu2 = 1.0;
    p.s1 = p.s2 = 1.0;
    const double r1 = r / (1.0 + r);
    p.lambda1 = rho * r1 * p.mu1();
    p.lambda2 = rho * (1.0 - r1) * p.mu2();
    p.omega1 = omega / (1.0 + omega);
    p.omega2 = 1.0 - p.omega1;
    return p;
}

void SchedProb::validate() const {
    if (!(p1 > 0.0 && p1 < 1.0)) {
        throw ConfigError("scheduling probability p1 must lie strictly inside (0, 1)");
    }
}

SchedProb SchedProb::clamped(double p1) {
    const double lo = 1e-6;
    return SchedProb{std::min(std::max(p1, lo), 1.0 - lo)};
}

std::pair<SystemParams, SchedProb> swap_sources(const SystemParams& params, SchedProb sp) {
    return {params.swapped(), SchedProb{sp.p2()}};
}

ctmc::Generator build_foreground(const SystemParams& params, SchedProb sp) {
    params.validate();
    sp.validate();
    const double l1 = params.lambda1, l2 = params.lambda2;
    const double m1 = params.mu1(), m2 = params.mu2();
    const double p1 = sp.p1, p2 = sp.p2();

    // States (0-based): 0 idle/E/E; 1 busy1/E/E; 2 busy1/F/E; 3 busy1/E/F;
    // 4 busy1/F/F; 5 busy2/E/E; 6 busy2/F/E; 7 busy2/E/F; 8 busy2/F/F.
    // A same-source arrival into a full queue replaces the waiting packet and
    // leaves the state unchanged.
    Matrix q = Matrix::Zero(9, 9);
    q(0, 1) = l1;
    q(0, 5) = l2;
    q(1, 0) = m1;
    q(1, 2) = l1;
    q(1, 3) = l2;
    q(2, 1) = m1;
    q(2, 4) = l2;
    q(3, 5) = m1;
    q(3, 4) = l1;
    q(4, 3) = m1 * p1;
    q(4, 6) = m1 * p2;
    q(5, 0) = m2;
    q(5, 6) = l1;
    q(5, 7) = l2;
    q(6, 1) = m2;
    q(6, 8) = l2;
    q(7, 5) = m2;
    q(7, 8) = l1;
    q(8, 3) = m2 * p1;
    q(8, 6) = m2 * p2;
    return ctmc::Generator(q);
}

ctmc::AbsorbingChain build_absorbing(const SystemParams& params, SchedProb sp,
                                     const RowVector& pi) {
    params.validate();
    sp.validate();
    if (pi.size() != 9) throw InconsistentInput("stationary vector must have 9 entries");
    if (pi.minCoeff() < 0.0 || std::abs(pi.sum() - 1.0) > 1e-9) {
        throw InconsistentInput("stationary vector is not a probability vector");
    }
    // Reject a pi that does not solve the foreground chain; a silently wrong
    // pi would corrupt alpha.
    const ctmc::Generator foreground = build_foreground(params, sp);
    const Matrix& fg = foreground.matrix();
    const double scale = std::max(1.0, fg.cwiseAbs().maxCoeff());
    if ((pi * fg).cwiseAbs().maxCoeff() > 1e-8 * scale) {
        throw InconsistentInput("vector does not solve the foreground chain");
    }

    const double l1 = params.lambda1, l2 = params.lambda2;
    const double m1 = params.mu1(), m2 = params.mu2();
    const double p1 = sp.p1, p2 = sp.p2();

    // Transient states (0-based) for a tagged source-1 packet:
    //  0..4: tagged packet in service with queue fillings E/E, F/E, E/F, F/F
    //        (1 = tagged in service, fresher source-1 packet queued);
    //  2, 5: an older source-1 packet in service, tagged packet waiting;
    //  6, 7: a source-2 packet in service, tagged packet waiting;
    //  8..13: tagged packet delivered, successor not yet delivered.
    Matrix a = Matrix::Zero(14, 14);
    a(0, 1) = l1;
    a(0, 3) = l2;
    a(0, 8) = m1;
    a(1, 4) = l2;
    a(1, 9) = m1;
    a(2, 0) = m1;
    a(2, 5) = l2;
    a(3, 4) = l1;
    a(3, 10) = m1;
    a(4, 9) = m1 * p1;
    a(4, 11) = m1 * p2;
    a(5, 3) = m1 * p1;
    a(5, 6) = m1 * p2;
    a(6, 0) = m2;
    a(6, 7) = l2;
    a(7, 3) = m2 * p1;
    a(7, 6) = m2 * p2;
    a(8, 9) = l1;
    a(8, 10) = l2;
    a(10, 8) = m2;
    a(10, 11) = l1;
    a(10, 12) = l2;
    a(11, 9) = m2;
    a(11, 13) = l2;
    a(12, 10) = m2;
    a(12, 13) = l1;
    a(13, 9) = m2 * p1;
    a(13, 11) = m2 * p2;

    // Replacement of the waiting tagged packet by a fresher source-1 arrival.
    Vector u = Vector::Zero(14);
    u(2) = u(5) = u(6) = u(7) = l1;

    // Successful absorption: the successor source-1 packet completes service.
    Vector s = Vector::Zero(14);
    s(9) = m1;

    // Occupancy indicator of the "tagged delivered, successor pending" span.
    Vector h = Vector::Zero(14);
    h.segment(8, 6).setOnes();

    for (int i = 0; i < 14; ++i) {
        a(i, i) = -(a.row(i).sum() - a(i, i) + u(i) + s(i));
    }

    RowVector alpha = RowVector::Zero(14);
    alpha(0) = pi(0);
    alpha(2) = pi(1) + pi(2);
    alpha(5) = pi(3) + pi(4);
    alpha(6) = pi(5) + pi(6);
    alpha(7) = pi(7) + pi(8);

    ctmc::AbsorbingChain chain;
    chain.A = std::move(a);
    chain.absorb = {{"u", std::move(u)}, {"s", std::move(s)}};
    chain.weight = {{"h", std::move(h)}};
    chain.alpha = std::move(alpha);
    chain.validate();
    return chain;
}

ctmc::AbsorbingChain source_chain(const SystemParams& params, SchedProb sp, int source) {
    if (source != 1 && source != 2) throw ConfigError("source must be 1 or 2");
    if (source == 2) {
        auto [sw_params, sw_sp] = swap_sources(params, sp);
        return source_chain(sw_params, sw_sp, 1);
    }
    const RowVector pi = ctmc::stationary(build_foreground(params, sp));
    return build_absorbing(params, sp, pi);
}

double paoi_pdf(const SystemParams& params, SchedProb sp, int source, double x) {
    const auto chain = source_chain(params, sp, source);
    return ctmc::pdf(chain, chain.absorb_vector("s"), x);
}

double aoi_pdf(const SystemParams& params, SchedProb sp, int source, double x) {
    const auto chain = source_chain(params, sp, source);
    return ctmc::pdf(chain, chain.weight_vector("h"), x);
}

double paoi_cdf(const SystemParams& params, SchedProb sp, int source, double x) {
    const auto chain = source_chain(params, sp, source);
    return ctmc::cdf(chain, chain.absorb_vector("s"), x);
}

double aoi_cdf(const SystemParams& params, SchedProb sp, int source, double x) {
    const auto chain = source_chain(params, sp, source);
    return ctmc::cdf(chain, chain.weight_vector("h"), x);
}

double paoi_moment(const SystemParams& params, SchedProb sp, int source, int k) {
    if (k < 1) throw ConfigError("moment order must be >= 1");
    const auto chain = source_chain(params, sp, source);
    return ctmc::moment(chain, chain.absorb_vector("s"), k);
}

double aoi_moment(const SystemParams& params, SchedProb sp, int source, int k) {
    if (k < 1) throw ConfigError("moment order must be >= 1");
    const auto chain = source_chain(params, sp, source);
    return ctmc::moment(chain, chain.weight_vector("h"), k);
}

MetricReport weighted_metrics(const SystemParams& params, SchedProb sp) {
    MetricReport report;
    for (int source : {1, 2}) {
        const auto chain = source_chain(params, sp, source);
        const Vector& s = chain.absorb_vector("s");
        const Vector& h = chain.weight_vector("h");
        SourceMetrics m;
        m.paoi_mean = ctmc::moment(chain, s, 1);
        m.paoi_m2 = ctmc::moment(chain, s, 2);
        m.aoi_mean = ctmc::moment(chain, h, 1);
        m.aoi_m2 = ctmc::moment(chain, h, 2);
        (source == 1 ? report.source1 : report.source2) = m;
    }
    report.w_paoi = params.omega1 * report.source1.paoi_mean + params.omega2 * report.source2.paoi_mean;
    report.w_aoi = params.omega1 * report.source1.aoi_mean + params.omega2 * report.source2.aoi_mean;
    return report;
}

DensityTable density_table(const SystemParams& params, SchedProb sp, int source, int n) {
    if (n < 2) throw ConfigError("density grid needs at least 2 points");
    const auto chain = source_chain(params, sp, source);
    const Vector& s = chain.absorb_vector("s");
    const Vector& h = chain.weight_vector("h");
    const double mean = std::max(ctmc::moment(chain, s, 1), ctmc::moment(chain, h, 1));

    DensityTable table;
    table.x.resize(n);
    const double lo = std::log(1e-3 * mean), hi = std::log(20.0 * mean);
    for (int i = 0; i < n; ++i) {
        table.x[i] = std::exp(lo + (hi - lo) * i / (n - 1));
    }
    table.paoi = ctmc::pdf_grid(chain, s, table.x);
    table.aoi = ctmc::pdf_grid(chain, h, table.x);
    return table;
}

}  // namespace agekit::sbpsq
