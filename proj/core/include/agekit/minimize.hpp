#ifndef AGEKIT_MINIMIZE_HPP
#define AGEKIT_MINIMIZE_HPP

#include <cmath>
#include <functional>
#include <vector>

namespace agekit::opt {

struct ScalarMin {
    double x = 0.0;
    double value = 0.0;
    bool unimodal = true;  // false when the coarse scan saw multiple local minima
};

// argmin over a uniform grid of n points on [lo, hi] inclusive.
inline ScalarMin grid_argmin(const std::function<double(double)>& f, double lo, double hi, int n) {
    ScalarMin best{lo, f(lo), true};
    for (int i = 1; i < n; ++i) {
        const double x = lo + (hi - lo) * i / (n - 1);
        const double v = f(x);
        if (v < best.value) {
            best.x = x;
            best.value = v;
        }
    }
    return best;
}

inline ScalarMin golden_section(const std::function<double(double)>& f, double a, double b,
                                double xtol, int max_iter = 200) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    const double x = (a + b) / 2.0;
    return {x, f(x), true};
}

// Coarse scan with `steps` intervals, then golden-section refinement inside
// the bracket around the best grid point. If the scan exposes more than one
// strict local minimum the function is treated as multimodal and the scan's
// argmin is returned unrefined (a dense fallback scan at 4x resolution).
inline ScalarMin grid_then_golden(const std::function<double(double)>& f, double lo, double hi,
                                  int steps, double xtol) {
    std::vector<double> xs(steps + 1), vs(steps + 1);
    int best = 0;
    for (int i = 0; i <= steps; ++i) {
        xs[i] = lo + (hi - lo) * i / steps;
        vs[i] = f(xs[i]);
        if (vs[i] < vs[best]) best = i;
    }
    int local_minima = 0;
    for (int i = 1; i < steps; ++i) {
        if (vs[i] < vs[i - 1] && vs[i] < vs[i + 1]) ++local_minima;
    }
    if (vs[0] < vs[1]) ++local_minima;
    if (vs[steps] < vs[steps - 1]) ++local_minima;

    if (local_minima > 1) {
        ScalarMin fallback = grid_argmin(f, lo, hi, 4 * steps + 1);
        fallback.unimodal = false;
        return fallback;
    }
    const double a = xs[best > 0 ? best - 1 : 0];
    const double b = xs[best < steps ? best + 1 : steps];
    ScalarMin refined = golden_section(f, a, b, xtol);
    if (vs[best] < refined.value) {
        refined.x = xs[best];
        refined.value = vs[best];
    }
    return refined;
}

}  // namespace agekit::opt

#endif
