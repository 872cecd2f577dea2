#include "agekit/simkit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

namespace agekit::simkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream per (seed, replication, purpose); purposes are the two
// arrival processes, the service times and the scheduler coins.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t rep, std::uint64_t purpose) {
    std::uint64_t x = base + 0x9E3779B97F4A7C15ULL * (rep * 8 + purpose + 1);
    return mix64(mix64(x));
}

struct Stream {
    std::mt19937_64 eng;
    explicit Stream(std::uint64_t seed) : eng(seed) {}
    double exponential(double rate) {
        return std::exponential_distribution<double>(rate)(eng);
    }
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng); }
};

struct SourceAcct {
    double last_gen = 0.0;   // generation time of the newest delivered packet
    double seg_start = 0.0;  // last reception time (age segment start)
    double area = 0.0;       // post-warmup age integral
    double peak_sum = 0.0;
    SourceStats stats;
};

}  // namespace

void SimConfig::validate() const {
    const auto& p = params;
    auto nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!nonneg(p.lambda1) || !nonneg(p.lambda2) || p.lambda1 + p.lambda2 <= 0.0) {
        throw ConfigError("arrival rates must be nonnegative with at least one positive");
    }
    if (!(p.nu1 > 0.0 && p.nu2 > 0.0)) throw ConfigError("service rates must be positive");
    if (!(p.s1 > 0.0 && p.s1 <= 1.0 && p.s2 > 0.0 && p.s2 <= 1.0)) {
        throw ConfigError("channel success probabilities must lie in (0, 1]");
    }
    if (std::abs(p.omega1 + p.omega2 - 1.0) > 1e-9 || p.omega1 < 0.0 || p.omega2 < 0.0) {
        throw ConfigError("weights must be nonnegative and sum to 1");
    }
    if (policy.kind != schedopt::PolicyKind::Npb) {
        if (!(policy.p1 > 0.0 && policy.p1 < 1.0)) {
            throw ConfigError("policy p1 must lie strictly inside (0, 1)");
        }
    }
    if (policy.kind == schedopt::PolicyKind::H2 && !(policy.bucket_limit > 0.0)) {
        throw ConfigError("bucket limit must be positive");
    }
    if (horizon_events == 0 && !(horizon_time > 0.0)) {
        throw ConfigError("horizon: set horizon_events or a positive horizon_time");
    }
    if (horizon_events > 0 && horizon_time > 0.0) {
        throw ConfigError("horizon: set either horizon_events or horizon_time, not both");
    }
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 0.5)) {
        throw ConfigError("warmup_fraction must lie in [0, 0.5)");
    }
    if (replications < 1) throw ConfigError("replications must be >= 1");
    if (aoi_hist_bins < 0 || (aoi_hist_bins > 0 && !(aoi_hist_xmax > 0.0))) {
        throw ConfigError("aoi histogram needs a positive x range");
    }
}

SimStats simulate(const SimConfig& cfg, int replication) {
    cfg.validate();
    const auto& par = cfg.params;
    const double l1 = par.lambda1, l2 = par.lambda2;
    const double m1 = par.mu1(), m2 = par.mu2();
    const bool bufferless = cfg.policy.kind == schedopt::PolicyKind::Npb;
    const bool bucket = cfg.policy.kind == schedopt::PolicyKind::H2;
    const double p1 = cfg.policy.p1, p2 = 1.0 - p1;
    const double bucket_limit = cfg.policy.bucket_limit;

    Stream arr1(derive_seed(cfg.seed, replication, 0));
    Stream arr2(derive_seed(cfg.seed, replication, 1));
    Stream services(derive_seed(cfg.seed, replication, 2));
    Stream coins(derive_seed(cfg.seed, replication, 3));

    const bool time_mode = cfg.horizon_events == 0;
    const std::uint64_t warm_events =
        time_mode ? 0 : static_cast<std::uint64_t>(cfg.warmup_fraction * cfg.horizon_events);
    double warmup_time = time_mode ? cfg.warmup_fraction * cfg.horizon_time
                                   : (warm_events == 0 ? 0.0 : kInf);

    SourceAcct acct[2];
    const int hist_bins = cfg.aoi_hist_bins;
    const double hist_width = hist_bins > 0 ? cfg.aoi_hist_xmax / hist_bins : 0.0;
    if (hist_bins > 0) {
        acct[0].stats.aoi_hist.assign(hist_bins, 0.0);
        acct[1].stats.aoi_hist.assign(hist_bins, 0.0);
    }

    // Time the age process spends in [a0, a1) lands in the covered bins.
    auto hist_add = [&](SourceAcct& a, double a0, double a1) {
        if (hist_bins == 0 || a1 <= a0) return;
        int k = std::max(0, static_cast<int>(a0 / hist_width));
        for (; k < hist_bins; ++k) {
            const double lo = k * hist_width, hi = lo + hist_width;
            if (lo >= a1) break;
            a.stats.aoi_hist[k] += std::max(0.0, std::min(a1, hi) - std::max(a0, lo));
        }
    };

    double now = 0.0;
    double na1 = l1 > 0.0 ? arr1.exponential(l1) : kInf;
    double na2 = l2 > 0.0 ? arr2.exponential(l2) : kInf;
    bool busy = false;
    int serving_src = 0;
    double serving_gen = 0.0, service_done = kInf;
    bool q_full[2] = {false, false};
    double q_gen[2] = {0.0, 0.0};
    double b1 = 0.0;  // b2 = -b1 at all times

    std::uint64_t events = 0;
    std::uint64_t tx[2] = {0, 0};
    std::uint64_t alternation_breaks = 0;
    int prev_tx_src = 0;

    auto start_service = [&](int src, double gen) {
        busy = true;
        serving_src = src;
        serving_gen = gen;
        service_done = now + services.exponential(src == 1 ? m1 : m2);
        if (bucket) {
            // Deficit update: transmitting source pays 1 - p_self, the other
            // earns its own share; with b2 = -b1 the zero sum is structural
            // and the limit clamps both buckets symmetrically.
            b1 = std::clamp(b1 + (src == 1 ? -p2 : p1), -bucket_limit, bucket_limit);
        }
        if (now > warmup_time) {
            ++tx[src - 1];
            if (prev_tx_src == src) ++alternation_breaks;
        }
        prev_tx_src = src;
    };

    auto pop_queue = [&](int src) {
        q_full[src - 1] = false;
        start_service(src, q_gen[src - 1]);
    };

    auto dispatch = [&]() {  // server just went idle (SBPSQ only)
        if (q_full[0] && q_full[1]) {
            int src;
            if (bucket) {
                src = b1 > 0.0 ? 1 : (b1 < 0.0 ? 2 : (p1 >= p2 ? 1 : 2));
            } else {
                src = coins.uniform() < p1 ? 1 : 2;
            }
            pop_queue(src);
        } else if (q_full[0]) {
            pop_queue(1);
        } else if (q_full[1]) {
            pop_queue(2);
        }
    };

    auto on_reception = [&](int src, double gen) {
        SourceAcct& a = acct[src - 1];
        ++a.stats.receptions;
        if (now > warmup_time) {
            const double eff = std::max(a.seg_start, warmup_time);
            a.area += aoi_accumulate(eff - a.last_gen, now - eff);
            hist_add(a, eff - a.last_gen, now - a.last_gen);
            const double peak = now - a.last_gen;
            a.peak_sum += peak;
            ++a.stats.post_receptions;
            if (cfg.collect_peaks) a.stats.peaks.push_back(peak);
        }
        a.last_gen = gen;
        a.seg_start = now;
    };

    while (true) {
        if (!time_mode && events >= cfg.horizon_events) break;
        const double next_completion = busy ? service_done : kInf;
        int type;  // 0: arrival 1, 1: arrival 2, 2: completion
        double tn;
        if (na1 <= na2 && na1 <= next_completion) {
            type = 0;
            tn = na1;
        } else if (na2 <= next_completion) {
            type = 1;
            tn = na2;
        } else {
            type = 2;
            tn = next_completion;
        }
        if (tn == kInf) break;
        if (time_mode && tn > cfg.horizon_time) break;
        now = tn;
        ++events;
        if (!time_mode && events == warm_events) warmup_time = now;

        if (type == 0 || type == 1) {
            const int src = type + 1;
            SourceAcct& a = acct[src - 1];
            ++a.stats.arrivals;
            (src == 1 ? na1 : na2) = now + (src == 1 ? arr1 : arr2).exponential(src == 1 ? l1 : l2);
            if (!busy) {
                if (q_full[0] || q_full[1]) {
                    throw std::logic_error("work conservation violated: idle server with waiting packet");
                }
                start_service(src, now);
            } else if (bufferless) {
                ++a.stats.discards;
            } else if (q_full[src - 1]) {
                ++a.stats.replacements;  // fresher packet replaces the waiting one
                q_gen[src - 1] = now;
            } else {
                q_full[src - 1] = true;
                q_gen[src - 1] = now;
            }
        } else {
            busy = false;
            on_reception(serving_src, serving_gen);
            if (!bufferless) dispatch();
        }
        if (bucket && std::abs(b1) > bucket_limit) {
            throw std::logic_error("bucket invariant violated");
        }
    }

    const double end_time = time_mode ? cfg.horizon_time : now;

    SimStats out;
    out.events = events;
    out.elapsed = end_time;
    out.post_elapsed = warmup_time < end_time ? end_time - warmup_time : 0.0;
    out.tx1 = tx[0];
    out.tx2 = tx[1];
    out.alternation_breaks = alternation_breaks;

    for (int i = 0; i < 2; ++i) {
        SourceAcct& a = acct[i];
        // Close the final open age segment at the horizon.
        if (end_time > warmup_time) {
            const double eff = std::max(a.seg_start, warmup_time);
            if (end_time > eff) {
                a.area += aoi_accumulate(eff - a.last_gen, end_time - eff);
                hist_add(a, eff - a.last_gen, end_time - a.last_gen);
            }
        }
        if (out.post_elapsed > 0.0) {
            a.stats.time_avg_aoi = a.area / out.post_elapsed;
            for (double& f : a.stats.aoi_hist) f /= out.post_elapsed;
        }
        if (a.stats.post_receptions > 0) {
            a.stats.mean_paoi = a.peak_sum / a.stats.post_receptions;
        }
        const double lambda = i == 0 ? l1 : l2;
        if (lambda > 0.0 && a.stats.post_receptions < 10'000) out.undersampled = true;
    }
    out.source1 = std::move(acct[0].stats);
    out.source2 = std::move(acct[1].stats);
    out.w_paoi = par.omega1 * out.source1.mean_paoi + par.omega2 * out.source2.mean_paoi;
    out.w_aoi = par.omega1 * out.source1.time_avg_aoi + par.omega2 * out.source2.time_avg_aoi;
    return out;
}

double t_quantile_975(int df) {
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                   2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                   2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                   2.060,  2.056, 2.052, 2.048, 2.045, 2.042};
    if (df < 1) throw ConfigError("degrees of freedom must be >= 1");
    if (df <= 30) return table[df - 1];
    if (df <= 40) return 2.021;
    if (df <= 60) return 2.000;
    if (df <= 120) return 1.980;
    return 1.960;
}

namespace {

Summary summarize(const std::vector<double>& xs) {
    Summary s;
    const auto n = xs.size();
    if (n == 0) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / n;
    if (n >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        const double stderr_ = std::sqrt(ss / (n - 1) / n);
        const double half = t_quantile_975(static_cast<int>(n) - 1) * stderr_;
        s.ci_low = s.mean - half;
        s.ci_high = s.mean + half;
    } else {
        s.ci_low = s.ci_high = s.mean;
    }
    return s;
}

}  // namespace

ReplicatedStats replicate(const SimConfig& cfg, int threads) {
    cfg.validate();
    ReplicatedStats out;
    out.reps.resize(cfg.replications);
    if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, cfg.replications));
    if (threads == 1) {
        for (int rep = 0; rep < cfg.replications; ++rep) out.reps[rep] = simulate(cfg, rep);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (int rep; (rep = next.fetch_add(1)) < cfg.replications;) {
                    out.reps[rep] = simulate(cfg, rep);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    for (const auto& rep : out.reps) out.undersampled = out.undersampled || rep.undersampled;
    auto collect = [&](auto proj) {
        std::vector<double> xs;
        xs.reserve(out.reps.size());
        for (const auto& r : out.reps) xs.push_back(proj(r));
        return summarize(xs);
    };
    out.aoi1 = collect([](const SimStats& r) { return r.source1.time_avg_aoi; });
    out.aoi2 = collect([](const SimStats& r) { return r.source2.time_avg_aoi; });
    out.paoi1 = collect([](const SimStats& r) { return r.source1.mean_paoi; });
    out.paoi2 = collect([](const SimStats& r) { return r.source2.mean_paoi; });
    out.w_paoi = collect([](const SimStats& r) { return r.w_paoi; });
    out.w_aoi = collect([](const SimStats& r) { return r.w_aoi; });
    return out;
}

}  // namespace agekit::simkit
