#ifndef AGEKIT_CTMC_HPP
#define AGEKIT_CTMC_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "agekit/errors.hpp"

// Finite-state CTMC math: stationary vectors of irreducible chains and
// density/CDF/moment functionals of absorbing chains. All chains handled here
// are small and dense (at most a few dozen states).

namespace agekit::ctmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

inline constexpr double kGeneratorTol = 1e-12;   // row-sum closure tolerance
inline constexpr double kStationaryTol = 1e-10;  // residual tolerance for pi*P = 0
inline constexpr double kDensityTol = 1e-8;      // default truncation error for e^{At}

// Conservative generator of an irreducible CTMC. Rows sum to zero; the
// diagonal is derived from the off-diagonal rates at construction.
class Generator {
  public:
    // Off-diagonal entries of `rates` are transition rates (must be >= 0);
    // the diagonal is ignored and replaced by the negative row sum.
    explicit Generator(const Matrix& rates);

    int size() const { return static_cast<int>(q_.rows()); }
    const Matrix& matrix() const { return q_; }
    double rate(int from, int to) const { return q_(from, to); }

  private:
    Matrix q_;
};

// Transient part of an absorbing CTMC: sub-generator A, one or more named
// absorption rate vectors (row sums of A plus their sum close to zero), named
// weight vectors used for occupancy functionals, and the initial distribution
// over transient states.
struct AbsorbingChain {
    Matrix A;                                          // m x m sub-generator
    std::vector<std::pair<std::string, Vector>> absorb;  // e.g. {"u", ...}, {"s", ...}
    std::vector<std::pair<std::string, Vector>> weight;  // e.g. {"h", ...}
    RowVector alpha;                                   // initial probabilities

    int size() const { return static_cast<int>(A.rows()); }
    const Vector& absorb_vector(const std::string& name) const;
    const Vector& weight_vector(const std::string& name) const;

    // Throws InconsistentInput when the closure A*1 + sum(absorb) = 0, the
    // sign constraints, or alpha's normalization are violated.
    void validate(double tol = kGeneratorTol) const;
};

// Stationary distribution pi with pi*Q = 0, sum(pi) = 1. One balance equation
// is replaced by the normalization row and the system solved by dense LU with
// full pivoting. Throws SingularSystem for reducible or degenerate chains.
RowVector stationary(const Generator& gen);

// Row vector alpha * e^{At}, evaluated by uniformization: with Lambda =
// max_i |A_ii| and P = I + A/Lambda, the series sum_k Poisson(k; Lambda*t) *
// alpha P^k is truncated once the accumulated Poisson mass exceeds 1 - tol.
// Every term is nonnegative, so the result is a nonnegative sub-probability
// vector with elementwise truncation error below tol.
RowVector transient_distribution(const AbsorbingChain& chain, double t, double tol = kDensityTol);

// alpha * e^{At} * v. t must be >= 0 and tol in (0, 1e-3].
double exp_action(const AbsorbingChain& chain, const Vector& v, double t, double tol = kDensityTol);

// alpha * e^{At} * v on an increasing grid of times. The matrix exponential is
// marched between consecutive grid points, so a full grid costs little more
// than a single evaluation at the largest time.
std::vector<double> exp_action_grid(const AbsorbingChain& chain, const Vector& v,
                                    const std::vector<double>& ts, double tol = kDensityTol);

// alpha * (-A)^{-(k+1)} * w via k+1 successive linear solves against -A (the
// factorization is reused; no explicit inverse). Throws SingularSystem when A
// is singular.
double resolvent_moment(const AbsorbingChain& chain, const Vector& w, int k);

// Functionals of the absorption-time / occupancy distribution attached to a
// weight or absorption vector w:
//   pdf(x)  = c * alpha e^{Ax} w          with  c^{-1} = alpha (-A)^{-1} w
//   cdf(x)  = 1 - c * alpha e^{Ax} (-A)^{-1} w
//   moment(k) = c * alpha (-A)^{-k-1} w
double pdf(const AbsorbingChain& chain, const Vector& w, double x, double tol = kDensityTol);
double cdf(const AbsorbingChain& chain, const Vector& w, double x, double tol = kDensityTol);
double moment(const AbsorbingChain& chain, const Vector& w, int k);

// pdf on an increasing grid (single march across the grid).
std::vector<double> pdf_grid(const AbsorbingChain& chain, const Vector& w,
                             const std::vector<double>& xs, double tol = kDensityTol);

}  // namespace agekit::ctmc

#endif
