#include "agekit/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace agekit::ctmc {

namespace {

// Poisson(k; m) in log space; safe for means far beyond exp range.
double log_poisson(int k, double mean) {
    return -mean + k * std::log(mean) - std::lgamma(k + 1.0);
}

struct Uniformized {
    double lambda = 0.0;  // uniformization rate, max |A_ii|
    Matrix P;             // I + A / lambda, substochastic and nonnegative

    explicit Uniformized(const Matrix& A) {
        lambda = 0.0;
        for (int i = 0; i < A.rows(); ++i) lambda = std::max(lambda, -A(i, i));
        if (lambda > 0.0) {
            P = Matrix::Identity(A.rows(), A.cols()) + A / lambda;
            P = P.cwiseMax(0.0);  // clip rounding residue on the diagonal
        }
    }

    // row <- row * e^{A dt}, truncation error below tol elementwise.
    void advance(RowVector& row, double dt, double tol) const {
        if (dt <= 0.0 || lambda == 0.0) return;
        const double m = lambda * dt;
        // Right tail of Poisson(m) beyond the cap is far below any tol we use.
        const int cap = static_cast<int>(m + 12.0 * std::sqrt(m + 1.0) + 64.0);
        RowVector acc = RowVector::Zero(row.size());
        RowVector term = row;
        double cum = 0.0;
        for (int k = 0; k <= cap; ++k) {
            const double w = std::exp(log_poisson(k, m));
            if (w > 0.0) {
                acc += w * term;
                cum += w;
                if (cum >= 1.0 - tol) break;
            }
            term = term * P;
            if (term.lpNorm<1>() < 0.01 * tol) break;  // future terms are negligible
        }
        row = acc;
    }
};

}  // namespace

Generator::Generator(const Matrix& rates) {
    if (rates.rows() != rates.cols() || rates.rows() < 2) {
        throw InconsistentInput("generator must be square with at least 2 states");
    }
    const int n = static_cast<int>(rates.rows());
    q_ = rates;
    for (int i = 0; i < n; ++i) {
        double row_sum = 0.0;
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (q_(i, j) < 0.0) throw InconsistentInput("negative off-diagonal rate");
            row_sum += q_(i, j);
        }
        q_(i, i) = -row_sum;
    }
}

const Vector& AbsorbingChain::absorb_vector(const std::string& name) const {
    for (const auto& [n, v] : absorb)
        if (n == name) return v;
    throw InconsistentInput("no absorption vector named '" + name + "'");
}

const Vector& AbsorbingChain::weight_vector(const std::string& name) const {
    for (const auto& [n, v] : weight)
        if (n == name) return v;
    throw InconsistentInput("no weight vector named '" + name + "'");
}

void AbsorbingChain::validate(double tol) const {
    const int m = size();
    if (A.cols() != m || alpha.size() != m) {
        throw InconsistentInput("absorbing chain dimensions disagree");
    }
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    Vector closure = A * Vector::Ones(m);
    for (const auto& [name, v] : absorb) {
        if (static_cast<int>(v.size()) != m) throw InconsistentInput("absorb vector size mismatch");
        if (v.minCoeff() < 0.0) throw InconsistentInput("negative entry in absorb vector " + name);
        closure += v;
    }
    if (closure.cwiseAbs().maxCoeff() > tol * scale) {
        throw InconsistentInput("A*1 + absorption vectors do not close to zero");
    }
    for (int i = 0; i < m; ++i) {
        if (A(i, i) > 0.0) throw InconsistentInput("positive diagonal in sub-generator");
        for (int j = 0; j < m; ++j) {
            if (i != j && A(i, j) < -tol * scale) {
                throw InconsistentInput("negative off-diagonal rate in sub-generator");
            }
        }
    }
    for (const auto& [name, v] : weight) {
        if (static_cast<int>(v.size()) != m) throw InconsistentInput("weight vector size mismatch");
        if (v.minCoeff() < 0.0) throw InconsistentInput("negative entry in weight vector " + name);
    }
    if (alpha.minCoeff() < 0.0 || std::abs(alpha.sum() - 1.0) > 1e-9) {
        throw InconsistentInput("alpha is not a probability vector");
    }
}

namespace {

// Strong connectivity of the positive-rate digraph; n is small, two sweeps.
bool strongly_connected(const Matrix& q) {
    const int n = static_cast<int>(q.rows());
    auto reach = [&](bool transpose) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            const int i = stack.back();
            stack.pop_back();
            for (int j = 0; j < n; ++j) {
                const double r = transpose ? q(j, i) : q(i, j);
                if (i != j && r > 0.0 && !seen[j]) {
                    seen[j] = 1;
                    stack.push_back(j);
                }
            }
        }
        return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
    };
    return reach(false) && reach(true);
}

}  // namespace

RowVector stationary(const Generator& gen) {
    const int n = gen.size();
    const Matrix& q = gen.matrix();

    if (!strongly_connected(q)) {
        throw SingularSystem("generator is reducible: some states are unreachable");
    }

    // Transpose the balance equations pi*Q = 0 and swap the last one for the
    // normalization sum(pi) = 1.
    Matrix sys = q.transpose();
    sys.row(n - 1).setOnes();
    Vector rhs = Vector::Zero(n);
    rhs(n - 1) = 1.0;

    Eigen::FullPivLU<Matrix> lu(sys);
    if (!lu.isInvertible()) {
        throw SingularSystem("degenerate generator: stationary system is singular");
    }
    Vector pi = lu.solve(rhs);
    if (!pi.allFinite()) {
        throw SingularSystem("stationary solve overflowed: rates are too disparate");
    }

    // Entries that are tiny products of disparate rates can round below zero;
    // anything beyond rounding slack means the solve is not trustworthy.
    const double slack = 1e-12 * std::max(1.0, pi.cwiseAbs().maxCoeff());
    if (pi.minCoeff() < -slack) {
        throw SingularSystem("stationary vector has negative entries");
    }
    pi = pi.cwiseMax(0.0);

    const double scale = std::max(1.0, q.cwiseAbs().maxCoeff());
    const double residual = (pi.transpose() * q).cwiseAbs().maxCoeff();
    if (residual > kStationaryTol * scale) {
        throw SingularSystem("stationary solve failed to converge: residual too large");
    }
    return pi.transpose();
}

RowVector transient_distribution(const AbsorbingChain& chain, double t, double tol) {
    if (t < 0.0) throw InconsistentInput("time must be nonnegative");
    if (tol <= 0.0 || tol > 1e-3) throw InconsistentInput("tolerance must be in (0, 1e-3]");
    RowVector row = chain.alpha;
    Uniformized u(chain.A);
    u.advance(row, t, tol);
    return row;
}

double exp_action(const AbsorbingChain& chain, const Vector& v, double t, double tol) {
    const double vmax = std::max(1.0, v.cwiseAbs().maxCoeff());
    return transient_distribution(chain, t, std::min(tol / vmax, 1e-3)).dot(v);
}

std::vector<double> exp_action_grid(const AbsorbingChain& chain, const Vector& v,
                                    const std::vector<double>& ts, double tol) {
    if (tol <= 0.0 || tol > 1e-3) throw InconsistentInput("tolerance must be in (0, 1e-3]");
    const double vmax = std::max(1.0, v.cwiseAbs().maxCoeff());
    const double step_tol =
        std::min(tol / vmax / std::max<std::size_t>(ts.size(), 1), 1e-3);

    Uniformized u(chain.A);
    RowVector row = chain.alpha;
    std::vector<double> out;
    out.reserve(ts.size());
    double prev = 0.0;
    for (double t : ts) {
        if (t < prev) throw InconsistentInput("time grid must be nondecreasing");
        u.advance(row, t - prev, step_tol);
        prev = t;
        out.push_back(row.dot(v));
    }
    return out;
}

double resolvent_moment(const AbsorbingChain& chain, const Vector& w, int k) {
    if (k < 0) throw InconsistentInput("moment order must be nonnegative");
    Eigen::FullPivLU<Matrix> lu(-chain.A);
    if (!lu.isInvertible()) {
        throw SingularSystem("sub-generator is singular: not all states absorb");
    }
    Vector y = w;
    for (int i = 0; i <= k; ++i) y = lu.solve(y);
    const double result = chain.alpha.dot(y);
    if (!std::isfinite(result)) {
        throw SingularSystem("resolvent solve overflowed: rates are too disparate");
    }
    return result;
}

namespace {

double normalizer(const AbsorbingChain& chain, const Vector& w) {
    const double total = resolvent_moment(chain, w, 0);
    if (!(total > 0.0)) {
        throw InconsistentInput("weight vector has no mass under the initial distribution");
    }
    return 1.0 / total;
}

}  // namespace

double pdf(const AbsorbingChain& chain, const Vector& w, double x, double tol) {
    return normalizer(chain, w) * exp_action(chain, w, x, tol);
}

double cdf(const AbsorbingChain& chain, const Vector& w, double x, double tol) {
    Eigen::FullPivLU<Matrix> lu(-chain.A);
    if (!lu.isInvertible()) {
        throw SingularSystem("sub-generator is singular: not all states absorb");
    }
    Vector z = lu.solve(w);
    const double total = chain.alpha.dot(z);
    if (!(total > 0.0)) {
        throw InconsistentInput("weight vector has no mass under the initial distribution");
    }
    const double value = 1.0 - exp_action(chain, z, x, tol) / total;
    return std::clamp(value, 0.0, 1.0);
}

double moment(const AbsorbingChain& chain, const Vector& w, int k) {
    // E[X^k] = k! c alpha (-A)^{-k-1} w: the integral of x^k e^{Ax} carries a
    // k! that the resolvent power alone does not.
    double factorial = 1.0;
    for (int i = 2; i <= k; ++i) factorial *= i;
    return factorial * normalizer(chain, w) * resolvent_moment(chain, w, k);
}

std::vector<double> pdf_grid(const AbsorbingChain& chain, const Vector& w,
                             const std::vector<double>& xs, double tol) {
    const double c = normalizer(chain, w);
    std::vector<double> out = exp_action_grid(chain, w, xs, tol);
    for (double& f : out) f *= c;
    return out;
}

}  // namespace agekit::ctmc
