#pragma once

// Dense complex/real matrix foundation: unitarity and stochasticity
// validation, Kronecker products, partial traces, Hermitian matrix
// exponentials, and the two probability-carrying value types shared by
// every other component. All types are immutable after construction and
// all operations are pure, so everything here is safe to use from
// parallel loops without synchronization.

#include <Eigen/Dense>

#include <complex>
#include <vector>

#include "unilab/errors.hpp"

namespace unilab {

using cxd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

namespace tol {
// Default tolerances. Every operation that compares against one of these
// accepts an override parameter.
inline constexpr double prob = 1e-10;
inline constexpr double herm = 1e-10;
inline constexpr double unitary = 1e-9;
inline constexpr double causal = 1e-9;
// Condition-number cutoff above which the divisibility decision switches
// from the closed-form inverse to the LP feasibility solver.
inline constexpr double cond_max = 1e8;
// Residual level at which the LP feasibility phase declares a solution.
inline constexpr double lp_feas = 1e-8;
} // namespace tol

double max_abs(const CMatrix& m);
double max_abs(const RMatrix& m);
bool all_finite(const CMatrix& m);
bool all_finite(const RVector& v);

// max-abs-entry of (m' m - I) <= tolerance. Throws dimension_error on
// non-square input.
bool is_unitary(const CMatrix& m, double tolerance = tol::unitary);

// max-abs-entry of (m - m') <= tolerance. Throws dimension_error on
// non-square input.
bool is_hermitian(const CMatrix& m, double tolerance = tol::herm);

// Kronecker (tensor) product, row-major block convention:
// (a (x) b)[i1*rb + i2, j1*cb + j2] = a[i1,j1] * b[i2,j2].
CMatrix kron(const CMatrix& a, const CMatrix& b);
RMatrix kron(const RMatrix& a, const RMatrix& b);

// Trace out the factors not listed in `keep` from a square matrix on the
// tensor product of the spaces in `dims`. The kept factors retain their
// original relative order. `keep` may be empty (full trace to a 1x1) or
// cover everything (identity operation). Preserves the trace.
CMatrix partial_trace(const CMatrix& m, const std::vector<int>& dims,
                      const std::vector<int>& keep);

// exp(-i h t) for Hermitian h, via the eigendecomposition
// h = V diag(lambda) V'. The result is unitary up to rounding.
// Throws validation_error if h is not Hermitian within `tolerance`.
CMatrix herm_expm(const CMatrix& h, double t, double tolerance = tol::herm);

// Probability distribution over configurations. Entries in
// [-tolerance, 0) are clamped to zero and the vector is renormalized
// when the total deficit is within tolerance; anything worse is a
// validation_error.
class ProbabilityVector {
public:
    explicit ProbabilityVector(RVector p, double tolerance = tol::prob);

    int dim() const { return static_cast<int>(p_.size()); }
    double operator[](int i) const { return p_(i); }
    const RVector& vec() const { return p_; }

    static ProbabilityVector point_mass(int dim, int i);
    static ProbabilityVector uniform(int dim);

private:
    RVector p_;
};

// Column-stochastic matrix of directed conditional probabilities: entry
// (i, j) is the probability of configuration i at the final time given
// configuration j at the initial time. Same clamping rule as
// ProbabilityVector, applied per column.
class StochasticMatrix {
public:
    explicit StochasticMatrix(RMatrix m, double tolerance = tol::prob);

    int dim() const { return static_cast<int>(m_.rows()); }
    double operator()(int i, int j) const { return m_(i, j); }
    const RMatrix& mat() const { return m_; }

    ProbabilityVector column(int j, double tolerance = tol::prob) const;

    static StochasticMatrix identity(int dim);

private:
    RMatrix m_;
};

} // namespace unilab
