#include "unilab/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace unilab {

namespace {

void check_distinct_names(const std::vector<Variable>& variables, const char* who) {
    std::set<std::string> seen;
    for (const auto& v : variables) {
        if (v.cardinality < 1)
            throw dimension_error(std::string(who) + ": cardinality must be >= 1");
        if (!seen.insert(v.name).second)
            throw validation_error(std::string(who) + ": duplicate variable '" + v.name + "'");
    }
}

long space_size(const std::vector<Variable>& variables) {
    long n = 1;
    for (const auto& v : variables) n *= v.cardinality;
    return n;
}

} // namespace

JointDistribution::JointDistribution(std::vector<Variable> variables, RVector probabilities,
                                     double tolerance)
    : variables_(std::move(variables)), probs_(std::move(probabilities)) {
    if (variables_.empty()) throw dimension_error("JointDistribution: no variables");
    check_distinct_names(variables_, "JointDistribution");
    if (probs_.size() != space_size(variables_))
        throw dimension_error("JointDistribution: probability array size mismatch");
    if (!all_finite(probs_))
        throw validation_error("JointDistribution: non-finite entry");
    for (Eigen::Index i = 0; i < probs_.size(); ++i) {
        if (probs_(i) < -tolerance)
            throw validation_error("JointDistribution: negative probability");
        if (probs_(i) < 0.0) probs_(i) = 0.0;
    }
    const double sum = probs_.sum();
    if (std::abs(sum - 1.0) > tolerance)
        throw validation_error("JointDistribution: probabilities sum to " + std::to_string(sum));
    if (sum > 0.0) probs_ /= sum;
}

int JointDistribution::position_of(const std::string& name) const {
    for (std::size_t k = 0; k < variables_.size(); ++k)
        if (variables_[k].name == name) return static_cast<int>(k);
    throw validation_error("JointDistribution: unknown variable '" + name + "'");
}

long JointDistribution::index_of(const std::vector<int>& assignment) const {
    if (assignment.size() != variables_.size())
        throw dimension_error("JointDistribution: assignment length mismatch");
    long index = 0;
    for (std::size_t k = 0; k < variables_.size(); ++k) {
        if (assignment[k] < 0 || assignment[k] >= variables_[k].cardinality)
            throw range_error("JointDistribution: value out of range for '" +
                              variables_[k].name + "'");
        index = index * variables_[k].cardinality + assignment[k];
    }
    return index;
}

std::vector<int> JointDistribution::assignment_of(long index) const {
    if (index < 0 || index >= size()) throw range_error("JointDistribution: index out of range");
    std::vector<int> assignment(variables_.size());
    for (int k = static_cast<int>(variables_.size()) - 1; k >= 0; --k) {
        assignment[k] = static_cast<int>(index % variables_[k].cardinality);
        index /= variables_[k].cardinality;
    }
    return assignment;
}

double JointDistribution::probability(const std::vector<int>& assignment) const {
    return probs_(index_of(assignment));
}

JointDistribution JointDistribution::marginal(const std::vector<std::string>& names) const {
    if (names.empty()) throw validation_error("marginal: no variables requested");
    std::vector<int> positions;
    std::vector<Variable> kept;
    for (const auto& n : names) {
        positions.push_back(position_of(n));
        kept.push_back(variables_[positions.back()]);
    }
    check_distinct_names(kept, "marginal");

    RVector out = RVector::Zero(space_size(kept));
    for (long i = 0; i < size(); ++i) {
        const std::vector<int> a = assignment_of(i);
        long idx = 0;
        for (std::size_t k = 0; k < positions.size(); ++k)
            idx = idx * kept[k].cardinality + a[positions[k]];
        out(idx) += probs_(i);
    }
    return JointDistribution(std::move(kept), std::move(out));
}

ConditionalTable::ConditionalTable(Variable child, std::vector<Variable> parents,
                                   std::vector<RVector> rows, double tolerance)
    : child_(std::move(child)), parents_(std::move(parents)), rows_(std::move(rows)) {
    if (child_.cardinality < 1)
        throw dimension_error("ConditionalTable: child cardinality must be >= 1");
    std::vector<Variable> all = parents_;
    all.push_back(child_);
    check_distinct_names(all, "ConditionalTable");
    if (static_cast<long>(rows_.size()) != space_size(parents_))
        throw dimension_error("ConditionalTable: wrong number of rows");
    for (auto& r : rows_) {
        if (r.size() != child_.cardinality)
            throw dimension_error("ConditionalTable: row length != child cardinality");
        // Reuse the ProbabilityVector cleaning semantics per row.
        r = ProbabilityVector(r, tolerance).vec();
    }
}

long ConditionalTable::parent_index(const std::vector<int>& parent_values) const {
    if (parent_values.size() != parents_.size())
        throw dimension_error("ConditionalTable: parent assignment length mismatch");
    long index = 0;
    for (std::size_t k = 0; k < parents_.size(); ++k) {
        if (parent_values[k] < 0 || parent_values[k] >= parents_[k].cardinality)
            throw range_error("ConditionalTable: parent value out of range");
        index = index * parents_[k].cardinality + parent_values[k];
    }
    return index;
}

namespace {

// Maps the table's parent order onto the joint's variable order and
// verifies they cover the same set.
std::vector<int> parent_positions(const ConditionalTable& ct, const JointDistribution& joint) {
    if (joint.variables().size() != ct.parents().size())
        throw validation_error("parent joint must cover exactly the table's parents");
    std::vector<int> pos;
    for (const auto& p : ct.parents()) {
        const int k = joint.position_of(p.name);
        if (joint.variables()[k].cardinality != p.cardinality)
            throw validation_error("cardinality mismatch for parent '" + p.name + "'");
        pos.push_back(k);
    }
    return pos;
}

} // namespace

JointDistribution propagate_multilinear(const ConditionalTable& ct,
                                        const JointDistribution& parent_joint) {
    const std::vector<int> pos = parent_positions(ct, parent_joint);
    RVector child = RVector::Zero(ct.child().cardinality);
    std::vector<int> parent_values(ct.parents().size());
    for (long j = 0; j < parent_joint.size(); ++j) {
        const std::vector<int> a = parent_joint.assignment_of(j);
        for (std::size_t k = 0; k < pos.size(); ++k) parent_values[k] = a[pos[k]];
        child += parent_joint.probabilities()(j) * ct.row(ct.parent_index(parent_values));
    }
    return JointDistribution({ct.child()}, std::move(child));
}

JointDistribution build_joint(const ConditionalTable& ct, const JointDistribution& parent_joint) {
    const std::vector<int> pos = parent_positions(ct, parent_joint);
    std::vector<Variable> variables;
    variables.push_back(ct.child());
    for (const auto& v : parent_joint.variables()) variables.push_back(v);

    const int nc = ct.child().cardinality;
    RVector out(nc * parent_joint.size());
    std::vector<int> parent_values(ct.parents().size());
    for (long j = 0; j < parent_joint.size(); ++j) {
        const std::vector<int> a = parent_joint.assignment_of(j);
        for (std::size_t k = 0; k < pos.size(); ++k) parent_values[k] = a[pos[k]];
        const RVector& row = ct.row(ct.parent_index(parent_values));
        for (int c = 0; c < nc; ++c) out(c * parent_joint.size() + j) =
            row(c) * parent_joint.probabilities()(j);
    }
    return JointDistribution(std::move(variables), std::move(out));
}

ConditionalTable reversed_conditional(const JointDistribution& joint, const std::string& child,
                                      const std::vector<std::string>& conditioning) {
    const int child_pos = joint.position_of(child);
    const Variable child_var = joint.variables()[child_pos];
    std::vector<Variable> parents;
    std::vector<int> cond_pos;
    for (const auto& name : conditioning) {
        if (name == child)
            throw validation_error("reversed_conditional: child cannot condition on itself");
        cond_pos.push_back(joint.position_of(name));
        parents.push_back(joint.variables()[cond_pos.back()]);
    }
    check_distinct_names(parents, "reversed_conditional");
    if (parents.size() + 1 != joint.variables().size())
        throw validation_error(
            "reversed_conditional: conditioning must cover all non-child variables");

    long rows_count = 1;
    for (const auto& p : parents) rows_count *= p.cardinality;
    std::vector<RVector> rows(rows_count, RVector::Zero(child_var.cardinality));
    RVector row_mass = RVector::Zero(rows_count);

    for (long i = 0; i < joint.size(); ++i) {
        const std::vector<int> a = joint.assignment_of(i);
        long r = 0;
        for (std::size_t k = 0; k < cond_pos.size(); ++k)
            r = r * parents[k].cardinality + a[cond_pos[k]];
        rows[r](a[child_pos]) += joint.probabilities()(i);
        row_mass(r) += joint.probabilities()(i);
    }
    for (long r = 0; r < rows_count; ++r) {
        if (row_mass(r) <= 0.0)
            throw zero_support_error(
                "reversed_conditional: conditioning assignment has zero probability");
        rows[r] /= row_mass(r);
    }
    return ConditionalTable(child_var, std::move(parents), std::move(rows));
}

ReichenbachResult reichenbach_test(const JointDistribution& joint, const std::string& a,
                                   const std::string& b, const std::string& c,
                                   double tolerance) {
    const JointDistribution pab = joint.marginal({a, b});
    const JointDistribution pa = joint.marginal({a});
    const JointDistribution pb = joint.marginal({b});
    const int na = pa.variables()[0].cardinality;
    const int nb = pb.variables()[0].cardinality;

    double corr_residual = 0.0;
    for (int ia = 0; ia < na; ++ia)
        for (int ib = 0; ib < nb; ++ib)
            corr_residual = std::max(corr_residual,
                                     std::abs(pab.probability({ia, ib}) -
                                              pa.probability({ia}) * pb.probability({ib})));

    const JointDistribution pabc = joint.marginal({a, b, c});
    const JointDistribution pc = joint.marginal({c});
    const int nc = pc.variables()[0].cardinality;

    double fact_residual = 0.0;
    bool skipped = false;
    for (int ic = 0; ic < nc; ++ic) {
        const double mass = pc.probability({ic});
        if (mass <= 0.0) {
            skipped = true;
            continue;
        }
        // Conditionals given this c value.
        RMatrix cond(na, nb);
        for (int ia = 0; ia < na; ++ia)
            for (int ib = 0; ib < nb; ++ib)
                cond(ia, ib) = pabc.probability({ia, ib, ic}) / mass;
        const RVector cond_a = cond.rowwise().sum();
        const RVector cond_b = cond.colwise().sum();
        for (int ia = 0; ia < na; ++ia)
            for (int ib = 0; ib < nb; ++ib)
                fact_residual = std::max(fact_residual,
                                         std::abs(cond(ia, ib) - cond_a(ia) * cond_b(ib)));
    }

    return ReichenbachResult{corr_residual > tolerance, fact_residual <= tolerance,
                             corr_residual, fact_residual, skipped};
}

} // namespace unilab
