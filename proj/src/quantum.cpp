#include "unilab/quantum.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace unilab {

DensityMatrix::DensityMatrix(CMatrix m, double tol_hermitian, double tol_trace)
    : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw dimension_error("DensityMatrix: must be square");
    if (!all_finite(m_)) throw validation_error("DensityMatrix: non-finite entry");
    if (!is_hermitian(m_, tol_hermitian))
        throw validation_error("DensityMatrix: not Hermitian within tolerance");
    const cxd tr = m_.trace();
    if (std::abs(tr - cxd(1.0, 0.0)) > tol_trace)
        throw validation_error("DensityMatrix: trace != 1 within tolerance");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol_hermitian)
        throw validation_error("DensityMatrix: not positive semidefinite within tolerance");
}

DensityMatrix density_from_distribution(const ProbabilityVector& p) {
    CMatrix m = CMatrix::Zero(p.dim(), p.dim());
    for (int i = 0; i < p.dim(); ++i) m(i, i) = p[i];
    return DensityMatrix(std::move(m));
}

DensityMatrix evolve_density(const DensityMatrix& rho0, const CMatrix& u, double tol_unitary) {
    if (u.rows() != rho0.dim() || u.cols() != rho0.dim())
        throw dimension_error("evolve_density: dimension mismatch");
    if (!is_unitary(u, tol_unitary))
        throw validation_error("evolve_density: u not unitary within tolerance");
    return DensityMatrix(u * rho0.mat() * u.adjoint());
}

StateVector::StateVector(CVector psi, double tolerance) : psi_(std::move(psi)) {
    if (psi_.size() == 0) throw dimension_error("StateVector: empty");
    const double norm2 = psi_.squaredNorm();
    if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > tolerance)
        throw validation_error("StateVector: not unit norm within tolerance");
}

StateVector StateVector::basis_state(int dim, int i) {
    if (i < 0 || i >= dim) throw range_error("basis_state: index out of range");
    CVector psi = CVector::Zero(dim);
    psi(i) = 1.0;
    return StateVector(std::move(psi));
}

StateVector evolve_state(const StateVector& psi0, const CMatrix& u, double tol_unitary) {
    if (u.rows() != psi0.dim() || u.cols() != psi0.dim())
        throw dimension_error("evolve_state: dimension mismatch");
    if (!is_unitary(u, tol_unitary))
        throw validation_error("evolve_state: u not unitary within tolerance");
    return StateVector(u * psi0.vec());
}

ProbabilityVector born_rule(const StateVector& psi, double tolerance) {
    return ProbabilityVector(psi.vec().cwiseAbs2(), tolerance);
}

Observable::Observable(CMatrix m, double tolerance) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw dimension_error("Observable: must be square");
    if (!is_hermitian(m_, tolerance))
        throw validation_error("Observable: not Hermitian within tolerance");
    double off = 0.0;
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
        for (Eigen::Index j = 0; j < m_.cols(); ++j)
            if (i != j) off = std::max(off, std::abs(m_(i, j)));
    kind_ = off <= tolerance ? ObservableKind::beable : ObservableKind::emergeable;
}

double expectation(const Observable& obs, const DensityMatrix& rho, double tolerance) {
    if (obs.dim() != rho.dim()) throw dimension_error("expectation: dimension mismatch");
    const cxd value = (obs.mat() * rho.mat()).trace();
    if (std::abs(value.imag()) > tolerance)
        throw validation_error("expectation: imaginary residue exceeds tolerance");
    return value.real();
}

Observable config_projector(int dim, int i) {
    if (i < 0 || i >= dim) throw range_error("config_projector: index out of range");
    CMatrix m = CMatrix::Zero(dim, dim);
    m(i, i) = 1.0;
    return Observable(std::move(m));
}

double von_neumann_residual(const UnitaryEvolution& ev, const DensityMatrix& rho0, double t,
                            double dt) {
    if (!(dt > 0.0)) throw range_error("von_neumann_residual: dt must be positive");
    const int seg = ev.segment_index(t);
    // Negative times run under segment 0's generator, so the lower boundary
    // only matters for later segments.
    const bool below = seg > 0 && t - dt < ev.segment_start(seg) - 1e-15;
    if (below || t + dt > ev.segment_end(seg) + 1e-15)
        throw range_error(
            "von_neumann_residual: [t - dt, t + dt] straddles a segment boundary");

    const CMatrix rho_plus = evolve_density(rho0, ev.evaluate(t + dt)).mat();
    const CMatrix rho_minus = evolve_density(rho0, ev.evaluate(t - dt)).mat();
    const CMatrix rho_t = evolve_density(rho0, ev.evaluate(t)).mat();
    const CMatrix& h = ev.hamiltonian_at(t);

    const CMatrix lhs = (rho_plus - rho_minus) / (2.0 * dt);
    const CMatrix rhs = cxd(0.0, -1.0) * (h * rho_t - rho_t * h);
    return max_abs(CMatrix(lhs - rhs));
}

} // namespace unilab
