#include "unilab/causality.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace unilab {

CompositeSystem::CompositeSystem(std::vector<std::string> labels, std::vector<int> dims)
    : labels_(std::move(labels)), dims_(std::move(dims)), joint_dim_(1) {
    if (labels_.size() != dims_.size())
        throw dimension_error("CompositeSystem: labels and dims must have equal length");
    if (labels_.empty()) throw dimension_error("CompositeSystem: empty");
    std::set<std::string> seen;
    for (const auto& l : labels_)
        if (!seen.insert(l).second)
            throw validation_error("CompositeSystem: duplicate label '" + l + "'");
    for (int d : dims_) {
        if (d < 1) throw dimension_error("CompositeSystem: dims must be >= 1");
        joint_dim_ *= d;
    }
}

int CompositeSystem::position_of(const std::string& label) const {
    for (std::size_t k = 0; k < labels_.size(); ++k)
        if (labels_[k] == label) return static_cast<int>(k);
    throw validation_error("CompositeSystem: unknown label '" + label + "'");
}

long CompositeSystem::joint_index(const std::vector<int>& configs) const {
    if (configs.size() != dims_.size())
        throw dimension_error("joint_index: wrong number of configurations");
    long index = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (configs[k] < 0 || configs[k] >= dims_[k])
            throw range_error("joint_index: configuration out of range for subsystem " +
                              labels_[k]);
        index = index * dims_[k] + configs[k];
    }
    return index;
}

std::vector<int> CompositeSystem::joint_unindex(long index) const {
    if (index < 0 || index >= joint_dim_) throw range_error("joint_unindex: index out of range");
    std::vector<int> configs(dims_.size());
    for (int k = static_cast<int>(dims_.size()) - 1; k >= 0; --k) {
        configs[k] = static_cast<int>(index % dims_[k]);
        index /= dims_[k];
    }
    return configs;
}

CMatrix embed_op(const CompositeSystem& cs, const CMatrix& op,
                 const std::vector<int>& positions) {
    long op_dim = 1;
    std::vector<bool> used(cs.subsystem_count(), false);
    for (int p : positions) {
        if (p < 0 || p >= cs.subsystem_count())
            throw range_error("embed_op: position out of range");
        if (used[p]) throw validation_error("embed_op: repeated position");
        used[p] = true;
        op_dim *= cs.dims()[p];
    }
    if (op.rows() != op_dim || op.cols() != op_dim)
        throw dimension_error("embed_op: operator dim does not match listed subsystems");

    const long n = cs.joint_dim();
    // Sub-index of a joint configuration within the listed positions.
    auto sub_index = [&](long joint) {
        const std::vector<int> c = cs.joint_unindex(joint);
        long s = 0;
        for (int p : positions) s = s * cs.dims()[p] + c[p];
        return s;
    };
    // Rest-index over the unlisted positions, to enforce the identity part.
    auto rest_index = [&](long joint) {
        const std::vector<int> c = cs.joint_unindex(joint);
        long r = 0;
        for (int k = 0; k < cs.subsystem_count(); ++k)
            if (!used[k]) r = r * cs.dims()[k] + c[k];
        return r;
    };

    std::vector<long> sub(n), rest(n);
    for (long i = 0; i < n; ++i) {
        sub[i] = sub_index(i);
        rest[i] = rest_index(i);
    }

    CMatrix out = CMatrix::Zero(n, n);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j)
            if (rest[i] == rest[j]) out(i, j) = op(sub[i], sub[j]);
    return out;
}

RMatrix marginal_conditional(const CompositeSystem& cs, const StochasticMatrix& gamma,
                             const std::string& target) {
    if (gamma.dim() != cs.joint_dim())
        throw dimension_error("marginal_conditional: gamma dim != joint dim");
    const int pos = cs.position_of(target);
    const int target_dim = cs.dims()[pos];
    const long n = cs.joint_dim();

    RMatrix table = RMatrix::Zero(target_dim, n);
    for (long i = 0; i < n; ++i) {
        const int target_final = cs.joint_unindex(i)[pos];
        for (long j = 0; j < n; ++j) table(target_final, j) += gamma(i, j);
    }
    return table;
}

namespace {

struct InfluenceGeometry {
    int source_pos;
    int source_dim;
    long group_count; // joint assignments of every non-source subsystem
    std::vector<long> source_stride_index; // joint index from (group, source config)
};

// Precomputed map (group, source config) -> joint initial index.
InfluenceGeometry influence_geometry(const CompositeSystem& cs, int source_pos) {
    InfluenceGeometry g;
    g.source_pos = source_pos;
    g.source_dim = cs.dims()[source_pos];
    g.group_count = cs.joint_dim() / g.source_dim;
    g.source_stride_index.resize(g.group_count * g.source_dim);
    std::vector<int> configs(cs.subsystem_count(), 0);
    for (long group = 0; group < g.group_count; ++group) {
        long rem = group;
        for (int k = cs.subsystem_count() - 1; k >= 0; --k) {
            if (k == source_pos) continue;
            configs[k] = static_cast<int>(rem % cs.dims()[k]);
            rem /= cs.dims()[k];
        }
        for (int s = 0; s < g.source_dim; ++s) {
            configs[source_pos] = s;
            g.source_stride_index[group * g.source_dim + s] = cs.joint_index(configs);
        }
    }
    return g;
}

double group_max_tv(const RMatrix& table, const InfluenceGeometry& g, long group) {
    double worst = 0.0;
    for (int s1 = 0; s1 < g.source_dim; ++s1) {
        const long j1 = g.source_stride_index[group * g.source_dim + s1];
        for (int s2 = s1 + 1; s2 < g.source_dim; ++s2) {
            const long j2 = g.source_stride_index[group * g.source_dim + s2];
            const double tv = 0.5 * (table.col(j1) - table.col(j2)).cwiseAbs().sum();
            worst = std::max(worst, tv);
        }
    }
    return worst;
}

CausalReport make_report(std::string source, std::string target, double influence,
                         double tolerance) {
    return CausalReport{std::move(source), std::move(target), influence,
                        influence > tolerance};
}

} // namespace

CausalReport causal_influence_serial(const CompositeSystem& cs, const StochasticMatrix& gamma,
                                     const std::string& source, const std::string& target,
                                     double tolerance) {
    if (source == target)
        throw validation_error("causal_influence: source and target must differ");
    const RMatrix table = marginal_conditional(cs, gamma, target);
    const InfluenceGeometry g = influence_geometry(cs, cs.position_of(source));
    double influence = 0.0;
    for (long group = 0; group < g.group_count; ++group)
        influence = std::max(influence, group_max_tv(table, g, group));
    return make_report(source, target, influence, tolerance);
}

CausalReport causal_influence(const CompositeSystem& cs, const StochasticMatrix& gamma,
                              const std::string& source, const std::string& target,
                              double tolerance) {
    if (source == target)
        throw validation_error("causal_influence: source and target must differ");
    const RMatrix table = marginal_conditional(cs, gamma, target);
    const InfluenceGeometry g = influence_geometry(cs, cs.position_of(source));
    double influence = 0.0;
#pragma omp parallel for reduction(max : influence) schedule(static)
    for (long group = 0; group < g.group_count; ++group)
        influence = std::max(influence, group_max_tv(table, g, group));
    return make_report(source, target, influence, tolerance);
}

FactorizationResult factorization_check(const CompositeSystem& cs, const StochasticMatrix& gamma,
                                        const std::vector<std::string>& side_a,
                                        double tolerance) {
    if (gamma.dim() != cs.joint_dim())
        throw dimension_error("factorization_check: gamma dim != joint dim");
    std::vector<bool> in_a(cs.subsystem_count(), false);
    for (const auto& label : side_a) {
        const int p = cs.position_of(label);
        if (in_a[p]) throw validation_error("factorization_check: duplicate label in split");
        in_a[p] = true;
    }
    const int a_count = static_cast<int>(std::count(in_a.begin(), in_a.end(), true));
    if (a_count == 0 || a_count == cs.subsystem_count())
        throw validation_error("factorization_check: split must be a proper bipartition");

    std::vector<int> pos_a, pos_b;
    for (int k = 0; k < cs.subsystem_count(); ++k) (in_a[k] ? pos_a : pos_b).push_back(k);

    long dim_a = 1, dim_b = 1;
    for (int p : pos_a) dim_a *= cs.dims()[p];
    for (int p : pos_b) dim_b *= cs.dims()[p];

    const long n = cs.joint_dim();
    std::vector<long> side_index_a(n), side_index_b(n);
    for (long i = 0; i < n; ++i) {
        const std::vector<int> c = cs.joint_unindex(i);
        long ia = 0, ib = 0;
        for (int p : pos_a) ia = ia * cs.dims()[p] + c[p];
        for (int p : pos_b) ib = ib * cs.dims()[p] + c[p];
        side_index_a[i] = ia;
        side_index_b[i] = ib;
    }

    // Candidate factors: marginalize the final configuration to one side and
    // average uniformly over the other side's initial configurations.
    RMatrix factor_a = RMatrix::Zero(dim_a, dim_a);
    RMatrix factor_b = RMatrix::Zero(dim_b, dim_b);
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            factor_a(side_index_a[i], side_index_a[j]) += gamma(i, j);
            factor_b(side_index_b[i], side_index_b[j]) += gamma(i, j);
        }
    factor_a /= static_cast<double>(dim_b);
    factor_b /= static_cast<double>(dim_a);

    double residual = 0.0;
    for (long i = 0; i < n; ++i)
        for (long j = 0; j < n; ++j) {
            const double candidate = factor_a(side_index_a[i], side_index_a[j]) *
                                     factor_b(side_index_b[i], side_index_b[j]);
            residual = std::max(residual, std::abs(gamma(i, j) - candidate));
        }
    return FactorizationResult{residual <= tolerance, residual};
}

} // namespace unilab
