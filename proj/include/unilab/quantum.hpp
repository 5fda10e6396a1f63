#pragma once

// Hilbert-space representation layered on top of the stochastic process:
// density matrices, state vectors, the Born rule, beable/emergeable
// expectation values, and a finite-difference check of the von Neumann
// equation.

#include "unilab/dynamics.hpp"
#include "unilab/matrix.hpp"

namespace unilab {

// Hermitian, unit-trace, positive-semidefinite matrix.
class DensityMatrix {
public:
    explicit DensityMatrix(CMatrix m, double tol_hermitian = tol::herm,
                           double tol_trace = tol::prob);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& mat() const { return m_; }
    RVector diagonal() const { return m_.diagonal().real(); }

private:
    CMatrix m_;
};

// rho(0) = diag(p): the density matrix carrying a standalone probability
// distribution with no coherences.
DensityMatrix density_from_distribution(const ProbabilityVector& p);

// rho(t) = U rho U'.
DensityMatrix evolve_density(const DensityMatrix& rho0, const CMatrix& u,
                             double tol_unitary = tol::unitary);

class StateVector {
public:
    explicit StateVector(CVector psi, double tolerance = tol::prob);

    int dim() const { return static_cast<int>(psi_.size()); }
    const CVector& vec() const { return psi_; }

    static StateVector basis_state(int dim, int i);

private:
    CVector psi_;
};

// Psi(t) = U Psi(0).
StateVector evolve_state(const StateVector& psi0, const CMatrix& u,
                         double tol_unitary = tol::unitary);

// p_i = |Psi_i|^2.
ProbabilityVector born_rule(const StateVector& psi, double tolerance = tol::prob);

enum class ObservableKind {
    beable,    // diagonal in the configuration basis: a genuine random variable
    emergeable // non-diagonal: emergent at the measurement level
};

// Hermitian matrix tagged by whether it is diagonal in the configuration
// basis. The kind is derived from the matrix, never chosen by the caller,
// so the invariant (beable iff off-diagonals vanish within tolerance)
// holds by construction.
class Observable {
public:
    explicit Observable(CMatrix m, double tolerance = tol::herm);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix& mat() const { return m_; }
    ObservableKind kind() const { return kind_; }

private:
    CMatrix m_;
    ObservableKind kind_;
};

// tr(obs rho). The imaginary residue must be below tolerance (it is zero
// in exact arithmetic for Hermitian inputs) and is discarded; a larger
// residue is a validation_error since it signals invalid inputs.
double expectation(const Observable& obs, const DensityMatrix& rho,
                   double tolerance = tol::herm);

// Rank-one projector onto configuration i: diag(0,...,1,...,0).
Observable config_projector(int dim, int i);

// Max-abs-entry of the central-difference d(rho)/dt minus -i [H(t), rho(t)]
// at time t. O(dt^2) on smooth segments. Throws range_error when
// [t - dt, t + dt] straddles a segment boundary, where the central
// difference is not second-order.
double von_neumann_residual(const UnitaryEvolution& ev, const DensityMatrix& rho0, double t,
                            double dt);

} // namespace unilab
