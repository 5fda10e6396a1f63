#pragma once

// Generalized stochastic processes driven by unitary dynamics: transition
// matrices as entrywise modulus-squares of time-evolution operators,
// probability propagation, divisibility decisions, interference
// quantification, and division-event scans.

#include <optional>
#include <vector>

#include "unilab/matrix.hpp"

namespace unilab {

struct ScheduleSegment {
    double duration; // strictly positive
    CMatrix h;       // Hermitian generator, units of inverse time (hbar = 1)
};

// Piecewise-constant Hamiltonian H(t) on [0, sum of durations].
class HamiltonianSchedule {
public:
    HamiltonianSchedule(int dim, std::vector<ScheduleSegment> segments,
                        double tolerance = tol::herm);

    int dim() const { return dim_; }
    const std::vector<ScheduleSegment>& segments() const { return segments_; }
    double total_duration() const { return total_; }

private:
    int dim_;
    std::vector<ScheduleSegment> segments_;
    double total_;
};

// U(t) generated by a Hamiltonian schedule. Each segment contributes
// exp(-i h dt) via its eigendecomposition, composed with the exact group
// law at segment boundaries. Negative times evolve backward under the
// first segment's generator; times past the end of the schedule are a
// range_error. All eigendecompositions happen at construction, so a
// const UnitaryEvolution is safe to share across threads.
class UnitaryEvolution {
public:
    explicit UnitaryEvolution(HamiltonianSchedule schedule);

    int dim() const { return schedule_.dim(); }
    double support_end() const { return schedule_.total_duration(); }
    const HamiltonianSchedule& schedule() const { return schedule_; }

    // U(t); U(0) = identity.
    CMatrix evaluate(double t) const;

    // U(t <- t') = U(t) U'(t'). Unitary for any pair of supported times.
    CMatrix relative(double t, double t_prime) const;

    // Generator in effect at time t (segment containing t; boundaries
    // belong to the segment they start).
    const CMatrix& hamiltonian_at(double t) const;

    // Index of the segment whose half-open interval [start, end) contains
    // t; the final boundary belongs to the last segment. Negative t maps
    // to segment 0.
    int segment_index(double t) const;
    double segment_start(int index) const;
    double segment_end(int index) const;

private:
    struct CompiledSegment {
        double start;
        double end;
        RVector evals;
        CMatrix evecs;
        CMatrix u_start; // U(start), accumulated product of earlier segments
    };

    HamiltonianSchedule schedule_;
    std::vector<CompiledSegment> compiled_;
    double support_slack_;
};

// Gamma_ij = |U_ij|^2. Validates unitarity of the input; the result is
// doubly stochastic by construction.
StochasticMatrix unistochastic_from_unitary(const CMatrix& u,
                                            double tol_unitary = tol::unitary,
                                            double tol_prob = tol::prob);

// p(t) = Gamma p(0).
ProbabilityVector propagate(const StochasticMatrix& gamma, const ProbabilityVector& p0,
                            double tolerance = tol::prob);

struct DivisibilityResult {
    bool divisible;
    std::optional<StochasticMatrix> witness; // M with gamma_t = M gamma_tp
};

// Decides whether a column-stochastic M with gamma_t = M gamma_tp exists.
// Closed-form inverse when gamma_tp is well conditioned; LP feasibility
// phase otherwise (and as a fallback when the inverse fails to certify,
// which guards against conditioning noise near the feasible boundary).
// A returned witness always satisfies the StochasticMatrix invariants and
// reproduces gamma_t within 10x tolerance.
DivisibilityResult divisibility_decide(const StochasticMatrix& gamma_t,
                                       const StochasticMatrix& gamma_tp,
                                       double tolerance = tol::prob);

struct TransitionReport {
    double t;
    double t_prime;
    StochasticMatrix gamma_t;
    StochasticMatrix gamma_nearest_divisible; // Gamma(t <- t') Gamma(t')
    RMatrix interference;                     // gamma_t - gamma_nearest_divisible
    double interference_norm;                 // max-abs-entry
    bool divisible;
    std::optional<StochasticMatrix> witness;
};

// Full comparison of the actual evolution from 0 to t against the
// nearest-divisible evolution through t', plus the divisibility decision
// for the pair (Gamma(t), Gamma(t')). Requires 0 <= t' <= t within the
// schedule support.
TransitionReport transition_report(const UnitaryEvolution& ev, double t, double t_prime,
                                   double tolerance = tol::prob);

struct ScanPoint {
    double t_prime;
    double interference_norm;
    bool divisible; // a division event iff true
};

// Division-event scan over candidate times t' in [0, t]. Points are
// independent, so the default implementation distributes them over
// OpenMP threads; the serial variant is the reference the tests compare
// against. Both produce identical results in grid order.
std::vector<ScanPoint> division_event_scan(const UnitaryEvolution& ev, double t,
                                           const std::vector<double>& grid,
                                           double tolerance = tol::prob);
std::vector<ScanPoint> division_event_scan_serial(const UnitaryEvolution& ev, double t,
                                                  const std::vector<double>& grid,
                                                  double tolerance = tol::prob);

} // namespace unilab
