#include "unilab/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

#include "unilab/linprog.hpp"

namespace unilab {

HamiltonianSchedule::HamiltonianSchedule(int dim, std::vector<ScheduleSegment> segments,
                                         double tolerance)
    : dim_(dim), segments_(std::move(segments)), total_(0.0) {
    if (dim_ < 1) throw dimension_error("HamiltonianSchedule: dim must be positive");
    if (segments_.empty()) throw validation_error("HamiltonianSchedule: no segments");
    for (const auto& seg : segments_) {
        if (!(seg.duration > 0.0))
            throw validation_error("HamiltonianSchedule: durations must be strictly positive");
        if (seg.h.rows() != dim_ || seg.h.cols() != dim_)
            throw dimension_error("HamiltonianSchedule: segment matrix dim mismatch");
        if (!is_hermitian(seg.h, tolerance))
            throw validation_error("HamiltonianSchedule: segment generator not Hermitian");
        total_ += seg.duration;
    }
}

UnitaryEvolution::UnitaryEvolution(HamiltonianSchedule schedule)
    : schedule_(std::move(schedule)) {
    const int n = schedule_.dim();
    CMatrix accumulated = CMatrix::Identity(n, n);
    double t0 = 0.0;
    for (const auto& seg : schedule_.segments()) {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(seg.h);
        CompiledSegment cs;
        cs.start = t0;
        cs.end = t0 + seg.duration;
        cs.evals = es.eigenvalues();
        cs.evecs = es.eigenvectors();
        cs.u_start = accumulated;
        // Advance the accumulated product to the segment end.
        CVector phases(n);
        for (int k = 0; k < n; ++k)
            phases(k) = std::exp(cxd(0.0, -cs.evals(k) * seg.duration));
        accumulated = cs.evecs * phases.asDiagonal() * cs.evecs.adjoint() * accumulated;
        t0 = cs.end;
        compiled_.push_back(std::move(cs));
    }
    support_slack_ = 1e-12 * (1.0 + schedule_.total_duration());
}

int UnitaryEvolution::segment_index(double t) const {
    if (t > schedule_.total_duration() + support_slack_)
        throw range_error("UnitaryEvolution: t = " + std::to_string(t) +
                          " beyond schedule support " +
                          std::to_string(schedule_.total_duration()));
    if (t <= 0.0) return 0;
    for (std::size_t k = 0; k < compiled_.size(); ++k)
        if (t < compiled_[k].end) return static_cast<int>(k);
    return static_cast<int>(compiled_.size()) - 1;
}

double UnitaryEvolution::segment_start(int index) const { return compiled_.at(index).start; }
double UnitaryEvolution::segment_end(int index) const { return compiled_.at(index).end; }

CMatrix UnitaryEvolution::evaluate(double t) const {
    const CompiledSegment& seg = compiled_[segment_index(t)];
    const double dt = t - seg.start; // negative t extends segment 0 backward
    const int n = dim();
    CVector phases(n);
    for (int k = 0; k < n; ++k)
        phases(k) = std::exp(cxd(0.0, -seg.evals(k) * dt));
    return seg.evecs * phases.asDiagonal() * seg.evecs.adjoint() * seg.u_start;
}

CMatrix UnitaryEvolution::relative(double t, double t_prime) const {
    return evaluate(t) * evaluate(t_prime).adjoint();
}

const CMatrix& UnitaryEvolution::hamiltonian_at(double t) const {
    return schedule_.segments()[segment_index(t)].h;
}

StochasticMatrix unistochastic_from_unitary(const CMatrix& u, double tol_unitary,
                                            double tol_prob) {
    if (!is_unitary(u, tol_unitary))
        throw validation_error("unistochastic_from_unitary: input not unitary within tolerance");
    return StochasticMatrix(u.cwiseAbs2(), tol_prob);
}

ProbabilityVector propagate(const StochasticMatrix& gamma, const ProbabilityVector& p0,
                            double tolerance) {
    if (gamma.dim() != p0.dim())
        throw dimension_error("propagate: dimension mismatch");
    return ProbabilityVector(gamma.mat() * p0.vec(), tolerance);
}

// Tries to promote a candidate witness: clamp per the StochasticMatrix
// rule, then confirm it actually reproduces gamma_t.
static std::optional<StochasticMatrix> certify_witness(const RMatrix& candidate,
                                                       const StochasticMatrix& gamma_t,
                                                       const StochasticMatrix& gamma_tp,
                                                       double tolerance) {
    if (candidate.minCoeff() < -tolerance) return std::nullopt;
    for (Eigen::Index j = 0; j < candidate.cols(); ++j)
        if (std::abs(candidate.col(j).sum() - 1.0) > tolerance) return std::nullopt;
    StochasticMatrix witness(candidate, tolerance);
    const double residual = max_abs(RMatrix(gamma_t.mat() - witness.mat() * gamma_tp.mat()));
    if (residual > 10.0 * tolerance) return std::nullopt;
    return witness;
}

DivisibilityResult divisibility_decide(const StochasticMatrix& gamma_t,
                                       const StochasticMatrix& gamma_tp,
                                       double tolerance) {
    if (gamma_t.dim() != gamma_tp.dim())
        throw dimension_error("divisibility_decide: dimension mismatch");
    const int n = gamma_t.dim();

    // Closed-form route: when gamma_tp is invertible, M is unique.
    Eigen::JacobiSVD<RMatrix> svd(gamma_tp.mat());
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    const bool well_conditioned = smin > 0.0 && smax / smin <= tol::cond_max;
    if (well_conditioned) {
        const RMatrix m = gamma_tp.mat().transpose().partialPivLu().solve(gamma_t.mat().transpose()).transpose();
        if (auto witness = certify_witness(m, gamma_t, gamma_tp, tolerance))
            return {true, std::move(witness)};
        // Rounding near the feasible boundary can push the unique solution
        // just outside the tolerance band; let the LP have the final word.
    }

    // Feasibility phase: variables are the n^2 entries of M (row-major),
    // constraints M gamma_tp = gamma_t plus unit column sums, M >= 0.
    const int nv = n * n;
    const int nc = n * n + n;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nc, nv);
    Eigen::VectorXd b(nc);
    int row = 0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j, ++row) {
            for (int k = 0; k < n; ++k) A(row, i * n + k) = gamma_tp(k, j);
            b(row) = gamma_t(i, j);
        }
    for (int j = 0; j < n; ++j, ++row) {
        for (int i = 0; i < n; ++i) A(row, i * n + j) = 1.0;
        b(row) = 1.0;
    }

    auto x = solve_equality_feasibility(A, b, tol::lp_feas);
    if (!x) return {false, std::nullopt};
    RMatrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) m(i, k) = (*x)(i * n + k);
    if (auto witness = certify_witness(m, gamma_t, gamma_tp, tolerance))
        return {true, std::move(witness)};
    return {false, std::nullopt};
}

TransitionReport transition_report(const UnitaryEvolution& ev, double t, double t_prime,
                                   double tolerance) {
    if (t_prime < 0.0 || t_prime > t)
        throw range_error("transition_report: need 0 <= t' <= t");
    const CMatrix u_t = ev.evaluate(t);
    const CMatrix u_tp = ev.evaluate(t_prime);

    StochasticMatrix gamma_t = unistochastic_from_unitary(u_t, tol::unitary, tolerance);
    StochasticMatrix gamma_tp = unistochastic_from_unitary(u_tp, tol::unitary, tolerance);
    StochasticMatrix gamma_rel =
        unistochastic_from_unitary(u_t * u_tp.adjoint(), tol::unitary, tolerance);

    StochasticMatrix nearest(gamma_rel.mat() * gamma_tp.mat(), tolerance);
    RMatrix interference = gamma_t.mat() - nearest.mat();
    const double interference_norm = max_abs(interference);

    DivisibilityResult decision = divisibility_decide(gamma_t, gamma_tp, tolerance);
    return TransitionReport{t,
                            t_prime,
                            std::move(gamma_t),
                            std::move(nearest),
                            std::move(interference),
                            interference_norm,
                            decision.divisible,
                            std::move(decision.witness)};
}

static ScanPoint scan_point(const UnitaryEvolution& ev, double t, double t_prime,
                            double tolerance) {
    TransitionReport rep = transition_report(ev, t, t_prime, tolerance);
    return ScanPoint{t_prime, rep.interference_norm, rep.divisible};
}

static void validate_grid(const UnitaryEvolution& ev, double t, const std::vector<double>& grid) {
    if (t > ev.support_end() + 1e-12 * (1.0 + ev.support_end()))
        throw range_error("division_event_scan: t beyond schedule support");
    for (double g : grid)
        if (g < 0.0 || g > t)
            throw range_error("division_event_scan: grid point " + std::to_string(g) +
                              " outside [0, t]");
}

std::vector<ScanPoint> division_event_scan_serial(const UnitaryEvolution& ev, double t,
                                                  const std::vector<double>& grid,
                                                  double tolerance) {
    validate_grid(ev, t, grid);
    std::vector<ScanPoint> out(grid.size());
    for (std::size_t k = 0; k < grid.size(); ++k)
        out[k] = scan_point(ev, t, grid[k], tolerance);
    return out;
}

std::vector<ScanPoint> division_event_scan(const UnitaryEvolution& ev, double t,
                                           const std::vector<double>& grid, double tolerance) {
    validate_grid(ev, t, grid);
    std::vector<ScanPoint> out(grid.size());
    const long count = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (long k = 0; k < count; ++k)
        out[k] = scan_point(ev, t, grid[k], tolerance);
    return out;
}

} // namespace unilab
