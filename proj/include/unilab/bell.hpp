#pragma once

// EPR/Bell workbench: quantum CHSH and Bell-1964 correlators computed
// through the stochastic machinery (with a density-matrix route as the
// independent cross-check), the four-subsystem no-signaling computation,
// and evaluators for local-hidden-variable models.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unilab/causality.hpp"
#include "unilab/dynamics.hpp"
#include "unilab/matrix.hpp"
#include "unilab/quantum.hpp"

namespace unilab {

// Basis-rotation unitary for a measurement along angle theta in the x-z
// plane: rows are the +1 and -1 eigenbras of cos(theta) sigma_z +
// sin(theta) sigma_x, so outcome +1 corresponds to configuration 0 after
// the rotation.
CMatrix measurement_rotation(double theta);

// cos(theta) sigma_z + sin(theta) sigma_x.
CMatrix axis_observable(double theta);

enum class CouplingKind {
    controlled_copy, // rotate by the setting, then copy the system
                     // configuration into the observer pointer (mod shift)
    explicit_pair,   // caller-supplied U_QA and U_RB, reused for every setting
    explicit_full    // caller-supplied joint relative operator; must
                     // tensor-factorize across (Q,A) | (R,B)
};

struct PointerCoupling {
    CouplingKind kind = CouplingKind::controlled_copy;
    CMatrix qa;   // explicit_pair
    CMatrix rb;   // explicit_pair
    CMatrix full; // explicit_full, subsystem order Q, R, A, B
};

// Everything needed to run the EPR/Bell computations: measurement settings
// for the two observers, the interaction and readout times, and the
// Hamiltonian schedule that entangles Q and R by the interaction time.
// Nothing here encodes a collapse; measurements are unitary couplings.
struct BellScenario {
    std::vector<double> settings_a;
    std::vector<double> settings_b;
    double interaction_time; // t' > 0
    double readout_time;     // t >= t'
    HamiltonianSchedule state_prep;
    std::vector<int> dims{2, 2, 2, 2}; // Q, R, A, B
    PointerCoupling coupling{};
    int initial_q = 0;
    int initial_r = 0;

    void validate() const;

    // U(t') of the preparation schedule, acting on Q x R.
    CMatrix preparation_unitary() const;
};

struct Correlator {
    double value; // in [-1, 1]
    double setting_a;
    double setting_b;
    std::optional<double> std_error; // present for Monte-Carlo estimates
};

// E(a, b) through the stochastic route: form the full process unitary
// (rotations after preparation), modulus-square it into the transition
// matrix, read the Born distribution off the initial-configuration
// column, and sum A B p(A, B).
Correlator quantum_correlator(const BellScenario& scenario, double angle_a, double angle_b);

// The same number through the Hilbert-space route: expectation value of
// the emergeable axis observable pair on the evolved density matrix.
// Kept as an independent computation for cross-checking.
double quantum_correlator_density(const BellScenario& scenario, double angle_a, double angle_b);

struct Bell1964Result {
    double lhs; // 1 + P(b, c)
    double rhs; // |P(a, b) - P(a, c)|
    bool satisfied;
};

// The 1964 inequality 1 + P(b,c) >= |P(a,b) - P(a,c)|. Validates that the
// three correlators share settings consistently: p_ab = P(a,b),
// p_ac = P(a,c), p_bc = P(b,c).
Bell1964Result bell_1964_check(const Correlator& p_ab, const Correlator& p_ac,
                               const Correlator& p_bc, double tolerance = tol::prob);

// CHSH combination |E(a,b) - E(a,b') + E(a',b) + E(a',b')| from
// quantum_correlator. Requires exactly two settings per side.
double chsh_value(const BellScenario& scenario);

// Stochastic local-causal model over a finite hidden-variable support:
// rho(lambda) plus per-side response tables rho(A|a,lambda) and
// rho(B|b,lambda). Parameter and Outcome Independence hold by
// construction since each side's table never sees the other side's
// setting or outcome.
class LocalCausalModel {
public:
    // response[setting][lambda] = { p(outcome +1), p(outcome -1) }.
    LocalCausalModel(std::vector<double> settings_a, std::vector<double> settings_b,
                     RVector rho_lambda,
                     std::vector<std::vector<std::array<double, 2>>> response_a,
                     std::vector<std::vector<std::array<double, 2>>> response_b,
                     double tolerance = tol::prob);

    int lambda_count() const { return static_cast<int>(rho_lambda_.size()); }
    const std::vector<double>& settings_a() const { return settings_a_; }
    const std::vector<double>& settings_b() const { return settings_b_; }
    const RVector& rho_lambda() const { return rho_lambda_; }
    const std::vector<std::vector<std::array<double, 2>>>& response_a() const {
        return response_a_;
    }
    const std::vector<std::vector<std::array<double, 2>>>& response_b() const {
        return response_b_;
    }

    int setting_index_a(double angle) const; // throws on unknown setting
    int setting_index_b(double angle) const;

    static LocalCausalModel random(std::uint64_t seed, std::vector<double> settings_a,
                                   std::vector<double> settings_b, int lambda_count);

private:
    std::vector<double> settings_a_;
    std::vector<double> settings_b_;
    RVector rho_lambda_;
    std::vector<std::vector<std::array<double, 2>>> response_a_;
    std::vector<std::vector<std::array<double, 2>>> response_b_;
};

// Exact P(a,b) = sum_lambda rho(lambda) (sum_A rho(A|a,lambda) A)
//                                        (sum_B rho(B|b,lambda) B).
Correlator lhv_correlator(const LocalCausalModel& model, double angle_a, double angle_b);

// CHSH combination from lhv_correlator; requires two settings per side.
double lhv_chsh(const LocalCausalModel& model);

enum class LambdaGeometry { circle, sphere };

// Outcome-deterministic sign model: lambda uniform on the unit circle or
// sphere, A = sign(a . lambda), B = -sign(b . lambda), sign(0) = +1.
struct DeterministicLhv {
    LambdaGeometry geometry = LambdaGeometry::circle;
};

// Monte-Carlo estimate of P(a, b) with standard error. Samples are drawn
// in fixed-size chunks whose seeds derive from the master seed by
// counter, so the result is bit-identical no matter how chunks are
// scheduled over threads. The serial variant is the reference.
Correlator lhv_deterministic_correlator(const DeterministicLhv& model, double angle_a,
                                        double angle_b, long samples, std::uint64_t seed);
Correlator lhv_deterministic_correlator_serial(const DeterministicLhv& model, double angle_a,
                                               double angle_b, long samples,
                                               std::uint64_t seed);

struct EprReport {
    double max_variation; // of p(a_t | q0, r0, a0, b0) over b0 and B-settings
    bool no_signaling;    // max_variation <= tolerance
    double tolerance;
};

// Four-subsystem EPR computation: Q and R entangle by t' under the
// preparation schedule, then (Q,A) and (R,B) couple locally through the
// pointer couplings. Builds the full transition matrix for every B-side
// setting, marginalizes to observer A's final configuration, and reports
// the largest variation of that conditional as b0 or the B-side setting
// changes. Throws validation_error if an explicit joint coupling fails to
// tensor-factorize across (Q,A) | (R,B), since the computation's premise
// fails there.
EprReport epr_no_signaling(const BellScenario& scenario, double tolerance = tol::causal);

// Full joint response table rho(A, B | a, b, lambda) over binary outcomes,
// used by the table-level independence predicates below.
class JointResponseTable {
public:
    JointResponseTable(int settings_a, int settings_b, int lambda_count);

    int na() const { return na_; }
    int nb() const { return nb_; }
    int nl() const { return nl_; }

    double& at(int a, int b, int l, int outcome_a, int outcome_b);
    double at(int a, int b, int l, int outcome_a, int outcome_b) const;

    void validate(double tolerance = tol::prob) const;

    // Builds the product table from per-side responses, so Outcome and
    // Parameter Independence hold by construction.
    static JointResponseTable from_local_model(const LocalCausalModel& model);

private:
    int na_, nb_, nl_;
    std::vector<double> p_;
};

// Residuals for the three locality conditions; zero (up to rounding) iff
// the condition holds. The factorization condition is equivalent to the
// conjunction of the other two.
double outcome_independence_residual(const JointResponseTable& table);
double parameter_independence_residual(const JointResponseTable& table);
double local_causality_residual(const JointResponseTable& table);

} // namespace unilab
