#include "unilab/bell.hpp"

#include <Eigen/SVD>

#include <cmath>

#include "unilab/rng.hpp"

namespace unilab {

CMatrix measurement_rotation(double theta) {
    const double c = std::cos(theta / 2.0);
    const double s = std::sin(theta / 2.0);
    CMatrix r(2, 2);
    r << c, s, -s, c;
    return r;
}

CMatrix axis_observable(double theta) {
    CMatrix m(2, 2);
    m << std::cos(theta), std::sin(theta), std::sin(theta), -std::cos(theta);
    return m;
}

void BellScenario::validate() const {
    if (settings_a.empty() || settings_b.empty())
        throw validation_error("BellScenario: need at least one setting per side");
    if (!(interaction_time > 0.0) || interaction_time > readout_time)
        throw validation_error("BellScenario: need 0 < t' <= t");
    if (dims.size() != 4)
        throw dimension_error("BellScenario: dims must list Q, R, A, B");
    for (int d : dims)
        if (d < 2) throw dimension_error("BellScenario: subsystem dims must be >= 2");
    if (state_prep.dim() != dims[0] * dims[1])
        throw dimension_error("BellScenario: state_prep dim must equal dim(Q) * dim(R)");
    if (initial_q < 0 || initial_q >= dims[0] || initial_r < 0 || initial_r >= dims[1])
        throw range_error("BellScenario: initial configuration out of range");
}

CMatrix BellScenario::preparation_unitary() const {
    return UnitaryEvolution(state_prep).evaluate(interaction_time);
}

namespace {

int sign_of_config(int config) { return config == 0 ? +1 : -1; }

Correlator make_correlator(double value, double a, double b,
                           std::optional<double> std_error = std::nullopt) {
    if (std::abs(value) > 1.0 + tol::prob)
        throw validation_error("Correlator: |value| exceeds 1");
    return Correlator{value, a, b, std_error};
}

} // namespace

Correlator quantum_correlator(const BellScenario& scenario, double angle_a, double angle_b) {
    scenario.validate();
    if (scenario.dims[0] != 2 || scenario.dims[1] != 2)
        throw dimension_error("quantum_correlator: Q and R must be qubits");
    const CMatrix u_prep = scenario.preparation_unitary();
    const CMatrix u_t = kron(measurement_rotation(angle_a), measurement_rotation(angle_b)) * u_prep;

    const StochasticMatrix gamma = unistochastic_from_unitary(u_t);
    const int j0 = scenario.initial_q * 2 + scenario.initial_r;
    const ProbabilityVector p = gamma.column(j0);

    double value = 0.0;
    for (int i = 0; i < 4; ++i)
        value += sign_of_config(i / 2) * sign_of_config(i % 2) * p[i];
    return make_correlator(value, angle_a, angle_b);
}

double quantum_correlator_density(const BellScenario& scenario, double angle_a, double angle_b) {
    scenario.validate();
    if (scenario.dims[0] != 2 || scenario.dims[1] != 2)
        throw dimension_error("quantum_correlator_density: Q and R must be qubits");
    const CMatrix u_prep = scenario.preparation_unitary();
    const int j0 = scenario.initial_q * 2 + scenario.initial_r;

    const DensityMatrix rho0 = density_from_distribution(ProbabilityVector::point_mass(4, j0));
    const DensityMatrix rho_tp = evolve_density(rho0, u_prep);
    const Observable obs(kron(axis_observable(angle_a), axis_observable(angle_b)));
    return expectation(obs, rho_tp);
}

Bell1964Result bell_1964_check(const Correlator& p_ab, const Correlator& p_ac,
                               const Correlator& p_bc, double tolerance) {
    const double angle_eps = 1e-12;
    if (std::abs(p_ab.setting_a - p_ac.setting_a) > angle_eps)
        throw validation_error("bell_1964_check: P(a,b) and P(a,c) disagree on setting a");
    if (std::abs(p_ab.setting_b - p_bc.setting_a) > angle_eps)
        throw validation_error("bell_1964_check: P(a,b) and P(b,c) disagree on setting b");
    if (std::abs(p_ac.setting_b - p_bc.setting_b) > angle_eps)
        throw validation_error("bell_1964_check: P(a,c) and P(b,c) disagree on setting c");

    const double lhs = 1.0 + p_bc.value;
    const double rhs = std::abs(p_ab.value - p_ac.value);
    return Bell1964Result{lhs, rhs, lhs >= rhs - tolerance};
}

double chsh_value(const BellScenario& scenario) {
    scenario.validate();
    if (scenario.settings_a.size() != 2 || scenario.settings_b.size() != 2)
        throw validation_error("chsh_value: need exactly two settings per side");
    const double a = scenario.settings_a[0], ap = scenario.settings_a[1];
    const double b = scenario.settings_b[0], bp = scenario.settings_b[1];
    const double e_ab = quantum_correlator(scenario, a, b).value;
    const double e_abp = quantum_correlator(scenario, a, bp).value;
    const double e_apb = quantum_correlator(scenario, ap, b).value;
    const double e_apbp = quantum_correlator(scenario, ap, bp).value;
    return std::abs(e_ab - e_abp + e_apb + e_apbp);
}

LocalCausalModel::LocalCausalModel(std::vector<double> settings_a, std::vector<double> settings_b,
                                   RVector rho_lambda,
                                   std::vector<std::vector<std::array<double, 2>>> response_a,
                                   std::vector<std::vector<std::array<double, 2>>> response_b,
                                   double tolerance)
    : settings_a_(std::move(settings_a)),
      settings_b_(std::move(settings_b)),
      rho_lambda_(ProbabilityVector(std::move(rho_lambda), tolerance).vec()),
      response_a_(std::move(response_a)),
      response_b_(std::move(response_b)) {
    if (settings_a_.empty() || settings_b_.empty())
        throw validation_error("LocalCausalModel: need at least one setting per side");
    auto check_side = [&](const std::vector<std::vector<std::array<double, 2>>>& resp,
                          std::size_t n_settings, const char* side) {
        if (resp.size() != n_settings)
            throw dimension_error(std::string("LocalCausalModel: response table for side ")
                                  + side + " has wrong setting count");
        for (const auto& per_lambda : resp) {
            if (per_lambda.size() != static_cast<std::size_t>(rho_lambda_.size()))
                throw dimension_error("LocalCausalModel: response table lambda count mismatch");
            for (const auto& d : per_lambda) {
                if (d[0] < -tolerance || d[1] < -tolerance ||
                    std::abs(d[0] + d[1] - 1.0) > tolerance)
                    throw validation_error(
                        "LocalCausalModel: response distribution does not sum to 1");
            }
        }
    };
    check_side(response_a_, settings_a_.size(), "A");
    check_side(response_b_, settings_b_.size(), "B");
}

namespace {

int find_setting(const std::vector<double>& settings, double angle, const char* side) {
    for (std::size_t k = 0; k < settings.size(); ++k)
        if (std::abs(settings[k] - angle) <= 1e-12) return static_cast<int>(k);
    throw validation_error(std::string("LocalCausalModel: unknown setting for side ") + side);
}

} // namespace

int LocalCausalModel::setting_index_a(double angle) const {
    return find_setting(settings_a_, angle, "A");
}

int LocalCausalModel::setting_index_b(double angle) const {
    return find_setting(settings_b_, angle, "B");
}

LocalCausalModel LocalCausalModel::random(std::uint64_t seed, std::vector<double> settings_a,
                                          std::vector<double> settings_b, int lambda_count) {
    SplitMix64 rng(seed);
    RVector rho(lambda_count);
    for (int l = 0; l < lambda_count; ++l) rho(l) = rng.next_double() + 1e-3;
    rho /= rho.sum();

    auto random_side = [&](std::size_t n_settings) {
        std::vector<std::vector<std::array<double, 2>>> resp(n_settings);
        for (auto& per_lambda : resp) {
            per_lambda.resize(lambda_count);
            for (auto& d : per_lambda) {
                const double p = rng.next_double();
                d = {p, 1.0 - p};
            }
        }
        return resp;
    };
    auto ra = random_side(settings_a.size());
    auto rb = random_side(settings_b.size());
    return LocalCausalModel(std::move(settings_a), std::move(settings_b), std::move(rho),
                            std::move(ra), std::move(rb));
}

Correlator lhv_correlator(const LocalCausalModel& model, double angle_a, double angle_b) {
    const int sa = model.setting_index_a(angle_a);
    const int sb = model.setting_index_b(angle_b);
    double value = 0.0;
    for (int l = 0; l < model.lambda_count(); ++l) {
        const auto& da = model.response_a()[sa][l];
        const auto& db = model.response_b()[sb][l];
        value += model.rho_lambda()(l) * (da[0] - da[1]) * (db[0] - db[1]);
    }
    return make_correlator(value, angle_a, angle_b);
}

double lhv_chsh(const LocalCausalModel& model) {
    if (model.settings_a().size() != 2 || model.settings_b().size() != 2)
        throw validation_error("lhv_chsh: need exactly two settings per side");
    const double a = model.settings_a()[0], ap = model.settings_a()[1];
    const double b = model.settings_b()[0], bp = model.settings_b()[1];
    return std::abs(lhv_correlator(model, a, b).value - lhv_correlator(model, a, bp).value +
                    lhv_correlator(model, ap, b).value + lhv_correlator(model, ap, bp).value);
}

namespace {

constexpr long kMcChunk = 1L << 16;

inline int sign_plus(double x) { return x >= 0.0 ? +1 : -1; } // sign(0) = +1

// Sum of A B over one chunk of samples; integer so chunk totals combine
// exactly regardless of summation order.
long mc_chunk_sum(const DeterministicLhv& model, double angle_a, double angle_b,
                  long chunk_samples, std::uint64_t chunk_seed) {
    SplitMix64 rng(chunk_seed);
    long sum = 0;
    if (model.geometry == LambdaGeometry::circle) {
        for (long s = 0; s < chunk_samples; ++s) {
            const double phi = rng.next_double(0.0, 2.0 * M_PI);
            const int a = sign_plus(std::cos(phi - angle_a));
            const int b = -sign_plus(std::cos(phi - angle_b));
            sum += a * b;
        }
    } else {
        // Measurement axes live in the x-z plane; lambda uniform on S^2.
        const double ax = std::sin(angle_a), az = std::cos(angle_a);
        const double bx = std::sin(angle_b), bz = std::cos(angle_b);
        for (long s = 0; s < chunk_samples; ++s) {
            const double z = rng.next_double(-1.0, 1.0);
            const double phi = rng.next_double(0.0, 2.0 * M_PI);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double x = r * std::cos(phi);
            const int a = sign_plus(ax * x + az * z);
            const int b = -sign_plus(bx * x + bz * z);
            sum += a * b;
        }
    }
    return sum;
}

Correlator mc_result(double total, long samples, double angle_a, double angle_b) {
    const double mean = total / static_cast<double>(samples);
    // Outcome products are +-1, so the sample variance is determined by
    // the mean: s^2 = n (1 - mean^2) / (n - 1).
    const double std_error =
        samples > 1 ? std::sqrt(std::max(0.0, 1.0 - mean * mean) / (samples - 1)) : 1.0;
    return Correlator{mean, angle_a, angle_b, std_error};
}

} // namespace

Correlator lhv_deterministic_correlator_serial(const DeterministicLhv& model, double angle_a,
                                               double angle_b, long samples,
                                               std::uint64_t seed) {
    if (samples < 1) throw validation_error("lhv_deterministic_correlator: samples must be >= 1");
    const long chunks = (samples + kMcChunk - 1) / kMcChunk;
    long total = 0;
    for (long c = 0; c < chunks; ++c) {
        const long n = std::min(kMcChunk, samples - c * kMcChunk);
        total += mc_chunk_sum(model, angle_a, angle_b, n, split_seed(seed, c));
    }
    return mc_result(static_cast<double>(total), samples, angle_a, angle_b);
}

Correlator lhv_deterministic_correlator(const DeterministicLhv& model, double angle_a,
                                        double angle_b, long samples, std::uint64_t seed) {
    if (samples < 1) throw validation_error("lhv_deterministic_correlator: samples must be >= 1");
    const long chunks = (samples + kMcChunk - 1) / kMcChunk;
    long total = 0;
#pragma omp parallel for reduction(+ : total) schedule(dynamic)
    for (long c = 0; c < chunks; ++c) {
        const long n = std::min(kMcChunk, samples - c * kMcChunk);
        total += mc_chunk_sum(model, angle_a, angle_b, n, split_seed(seed, c));
    }
    return mc_result(static_cast<double>(total), samples, angle_a, angle_b);
}

namespace {

// |q, pointer> -> |q, (pointer + q) mod dim> : copies the system
// configuration into the observer subsystem.
CMatrix controlled_shift(int system_dim, int pointer_dim) {
    const int n = system_dim * pointer_dim;
    CMatrix u = CMatrix::Zero(n, n);
    for (int q = 0; q < system_dim; ++q)
        for (int a = 0; a < pointer_dim; ++a)
            u(q * pointer_dim + (a + q) % pointer_dim, q * pointer_dim + a) = 1.0;
    return u;
}

// Verifies that a joint operator on (Q, R, A, B) tensor-factorizes across
// the (Q,A) | (R,B) grouping, via the rank of the reshuffled matrix.
void require_pair_factorization(const CompositeSystem& cs, const CMatrix& full,
                                double tolerance) {
    const int dq = cs.dims()[0], dr = cs.dims()[1], da = cs.dims()[2], db = cs.dims()[3];
    const long dqa = static_cast<long>(dq) * da;
    const long drb = static_cast<long>(dr) * db;
    Eigen::MatrixXcd reshuffled(dqa * dqa, drb * drb);
    for (long i = 0; i < cs.joint_dim(); ++i) {
        const std::vector<int> ci = cs.joint_unindex(i);
        const long gi_qa = static_cast<long>(ci[0]) * da + ci[2];
        const long gi_rb = static_cast<long>(ci[1]) * db + ci[3];
        for (long j = 0; j < cs.joint_dim(); ++j) {
            const std::vector<int> cj = cs.joint_unindex(j);
            const long gj_qa = static_cast<long>(cj[0]) * da + cj[2];
            const long gj_rb = static_cast<long>(cj[1]) * db + cj[3];
            reshuffled(gi_qa * dqa + gj_qa, gi_rb * drb + gj_rb) = full(i, j);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(reshuffled);
    const auto& sv = svd.singularValues();
    if (sv.size() > 1 && sv(1) > tolerance * std::max(1.0, sv(0)))
        throw validation_error(
            "epr_no_signaling: relative evolution does not tensor-factorize across "
            "(Q,A) | (R,B); the no-signaling premise fails");
}

} // namespace

EprReport epr_no_signaling(const BellScenario& scenario, double tolerance) {
    scenario.validate();
    const CompositeSystem cs({"Q", "R", "A", "B"}, scenario.dims);
    const int dq = scenario.dims[0], dr = scenario.dims[1];
    const int da = scenario.dims[2], db = scenario.dims[3];

    const CMatrix u_prep_full = embed_op(cs, scenario.preparation_unitary(), {0, 1});

    // Relative evolution from t' to t for one (A-setting, B-setting) pair.
    auto relative_op = [&](double sa, double sb) -> CMatrix {
        switch (scenario.coupling.kind) {
            case CouplingKind::controlled_copy: {
                if (dq != 2 || dr != 2)
                    throw dimension_error(
                        "epr_no_signaling: controlled_copy couplings need qubit Q and R");
                const CMatrix u_qa = controlled_shift(dq, da) *
                                     kron(measurement_rotation(sa), CMatrix::Identity(da, da));
                const CMatrix u_rb = controlled_shift(dr, db) *
                                     kron(measurement_rotation(sb), CMatrix::Identity(db, db));
                return embed_op(cs, u_qa, {0, 2}) * embed_op(cs, u_rb, {1, 3});
            }
            case CouplingKind::explicit_pair: {
                if (scenario.coupling.qa.rows() != dq * da ||
                    scenario.coupling.rb.rows() != dr * db)
                    throw dimension_error("epr_no_signaling: explicit coupling dims mismatch");
                return embed_op(cs, scenario.coupling.qa, {0, 2}) *
                       embed_op(cs, scenario.coupling.rb, {1, 3});
            }
            case CouplingKind::explicit_full: {
                if (scenario.coupling.full.rows() != cs.joint_dim())
                    throw dimension_error("epr_no_signaling: explicit full coupling dim mismatch");
                if (!is_unitary(scenario.coupling.full, tol::unitary))
                    throw validation_error("epr_no_signaling: explicit coupling not unitary");
                require_pair_factorization(cs, scenario.coupling.full, 1e-9);
                return scenario.coupling.full;
            }
        }
        throw validation_error("epr_no_signaling: unknown coupling kind");
    };

    // Observer A's conditional table for every B-side setting. The A-side
    // setting is held at its first value; varying it only redefines A's own
    // measurement, not the quantity whose b0-independence is under test.
    const double setting_a = scenario.settings_a.front();
    std::vector<RMatrix> tables;
    tables.reserve(scenario.settings_b.size());
    for (double sb : scenario.settings_b) {
        const CMatrix u_t = relative_op(setting_a, sb) * u_prep_full;
        const StochasticMatrix gamma = unistochastic_from_unitary(u_t);
        tables.push_back(marginal_conditional(cs, gamma, "A"));
    }

    // Vary b0 and the B-side setting with (q0, r0, a0) held fixed.
    double max_variation = 0.0;
    for (int q0 = 0; q0 < dq; ++q0)
        for (int r0 = 0; r0 < dr; ++r0)
            for (int a0 = 0; a0 < da; ++a0) {
                for (std::size_t s1 = 0; s1 < tables.size(); ++s1)
                    for (int b1 = 0; b1 < db; ++b1) {
                        const long j1 = cs.joint_index({q0, r0, a0, b1});
                        for (std::size_t s2 = s1; s2 < tables.size(); ++s2)
                            for (int b2 = 0; b2 < db; ++b2) {
                                const long j2 = cs.joint_index({q0, r0, a0, b2});
                                const double diff =
                                    (tables[s1].col(j1) - tables[s2].col(j2))
                                        .cwiseAbs()
                                        .maxCoeff();
                                max_variation = std::max(max_variation, diff);
                            }
                    }
            }

    return EprReport{max_variation, max_variation <= tolerance, tolerance};
}

JointResponseTable::JointResponseTable(int settings_a, int settings_b, int lambda_count)
    : na_(settings_a), nb_(settings_b), nl_(lambda_count),
      p_(static_cast<std::size_t>(settings_a) * settings_b * lambda_count * 4, 0.0) {
    if (na_ < 1 || nb_ < 1 || nl_ < 1)
        throw dimension_error("JointResponseTable: all counts must be >= 1");
}

double& JointResponseTable::at(int a, int b, int l, int outcome_a, int outcome_b) {
    return p_[(((static_cast<std::size_t>(a) * nb_ + b) * nl_ + l) * 2 + outcome_a) * 2 +
              outcome_b];
}

double JointResponseTable::at(int a, int b, int l, int outcome_a, int outcome_b) const {
    return p_[(((static_cast<std::size_t>(a) * nb_ + b) * nl_ + l) * 2 + outcome_a) * 2 +
              outcome_b];
}

void JointResponseTable::validate(double tolerance) const {
    for (int a = 0; a < na_; ++a)
        for (int b = 0; b < nb_; ++b)
            for (int l = 0; l < nl_; ++l) {
                double sum = 0.0;
                for (int oa = 0; oa < 2; ++oa)
                    for (int ob = 0; ob < 2; ++ob) {
                        const double v = at(a, b, l, oa, ob);
                        if (v < -tolerance)
                            throw validation_error("JointResponseTable: negative probability");
                        sum += v;
                    }
                if (std::abs(sum - 1.0) > tolerance)
                    throw validation_error("JointResponseTable: distribution does not sum to 1");
            }
}

JointResponseTable JointResponseTable::from_local_model(const LocalCausalModel& model) {
    JointResponseTable table(static_cast<int>(model.settings_a().size()),
                             static_cast<int>(model.settings_b().size()),
                             model.lambda_count());
    for (int a = 0; a < table.na(); ++a)
        for (int b = 0; b < table.nb(); ++b)
            for (int l = 0; l < table.nl(); ++l)
                for (int oa = 0; oa < 2; ++oa)
                    for (int ob = 0; ob < 2; ++ob)
                        table.at(a, b, l, oa, ob) =
                            model.response_a()[a][l][oa] * model.response_b()[b][l][ob];
    return table;
}

namespace {

double marginal_a(const JointResponseTable& t, int a, int b, int l, int oa) {
    return t.at(a, b, l, oa, 0) + t.at(a, b, l, oa, 1);
}

double marginal_b(const JointResponseTable& t, int a, int b, int l, int ob) {
    return t.at(a, b, l, 0, ob) + t.at(a, b, l, 1, ob);
}

} // namespace

double outcome_independence_residual(const JointResponseTable& t) {
    double residual = 0.0;
    for (int a = 0; a < t.na(); ++a)
        for (int b = 0; b < t.nb(); ++b)
            for (int l = 0; l < t.nl(); ++l)
                for (int oa = 0; oa < 2; ++oa)
                    for (int ob = 0; ob < 2; ++ob)
                        residual = std::max(
                            residual, std::abs(t.at(a, b, l, oa, ob) -
                                               marginal_a(t, a, b, l, oa) *
                                                   marginal_b(t, a, b, l, ob)));
    return residual;
}

double parameter_independence_residual(const JointResponseTable& t) {
    double residual = 0.0;
    // A's marginal must not depend on b.
    for (int a = 0; a < t.na(); ++a)
        for (int l = 0; l < t.nl(); ++l)
            for (int oa = 0; oa < 2; ++oa)
                for (int b1 = 0; b1 < t.nb(); ++b1)
                    for (int b2 = b1 + 1; b2 < t.nb(); ++b2)
                        residual = std::max(residual,
                                            std::abs(marginal_a(t, a, b1, l, oa) -
                                                     marginal_a(t, a, b2, l, oa)));
    // B's marginal must not depend on a.
    for (int b = 0; b < t.nb(); ++b)
        for (int l = 0; l < t.nl(); ++l)
            for (int ob = 0; ob < 2; ++ob)
                for (int a1 = 0; a1 < t.na(); ++a1)
                    for (int a2 = a1 + 1; a2 < t.na(); ++a2)
                        residual = std::max(residual,
                                            std::abs(marginal_b(t, a1, b, l, ob) -
                                                     marginal_b(t, a2, b, l, ob)));
    return residual;
}

double local_causality_residual(const JointResponseTable& t) {
    double residual = 0.0;
    for (int a = 0; a < t.na(); ++a)
        for (int b = 0; b < t.nb(); ++b)
            for (int l = 0; l < t.nl(); ++l)
                for (int oa = 0; oa < 2; ++oa)
                    for (int ob = 0; ob < 2; ++ob) {
                        // Setting-averaged per-side responses; under
                        // Parameter Independence these equal rho(A|a,l)
                        // and rho(B|b,l).
                        double ra = 0.0;
                        for (int bb = 0; bb < t.nb(); ++bb) ra += marginal_a(t, a, bb, l, oa);
                        ra /= t.nb();
                        double rb = 0.0;
                        for (int aa = 0; aa < t.na(); ++aa) rb += marginal_b(t, aa, b, l, ob);
                        rb /= t.na();
                        residual =
                            std::max(residual, std::abs(t.at(a, b, l, oa, ob) - ra * rb));
                    }
    return residual;
}

} // namespace unilab
