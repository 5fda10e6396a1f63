#pragma once

// Directed conditional probability engine: nomological conditional tables
// over finite categorical variables, multilinear propagation, derived
// (contingent, nonlinear) reversed conditionals, and Reichenbach
// common-cause tests.

#include <string>
#include <vector>

#include "unilab/matrix.hpp"

namespace unilab {

struct Variable {
    std::string name;
    int cardinality;
};

// Joint probability distribution over an ordered list of finite
// variables, stored row-major (first variable most significant).
class JointDistribution {
public:
    JointDistribution(std::vector<Variable> variables, RVector probabilities,
                      double tolerance = tol::prob);

    const std::vector<Variable>& variables() const { return variables_; }
    long size() const { return probs_.size(); }
    const RVector& probabilities() const { return probs_; }

    int position_of(const std::string& name) const;
    long index_of(const std::vector<int>& assignment) const;
    std::vector<int> assignment_of(long index) const;
    double probability(const std::vector<int>& assignment) const;

    // Marginal over a subset of variables, in the listed order.
    JointDistribution marginal(const std::vector<std::string>& names) const;

private:
    std::vector<Variable> variables_;
    RVector probs_;
};

// Basic (nomological) conditional table p(child | parents), indexed by
// parent assignment (row-major over the parents in order) then child
// value. Each row is a distribution over the child.
class ConditionalTable {
public:
    ConditionalTable(Variable child, std::vector<Variable> parents,
                     std::vector<RVector> rows, double tolerance = tol::prob);

    const Variable& child() const { return child_; }
    const std::vector<Variable>& parents() const { return parents_; }
    long parent_assignments() const { return static_cast<long>(rows_.size()); }
    const RVector& row(long parent_assignment) const { return rows_.at(parent_assignment); }

    long parent_index(const std::vector<int>& parent_values) const;

private:
    Variable child_;
    std::vector<Variable> parents_;
    std::vector<RVector> rows_;
};

// p(a) = sum over parent assignments of p(a | parents) p(parents).
// Multilinear in the parent joint. The parent joint must cover exactly
// the table's parents, in any order.
JointDistribution propagate_multilinear(const ConditionalTable& ct,
                                        const JointDistribution& parent_joint);

// p(child, parents) = p(child | parents) p(parents), with the child as
// the first variable. Marginalizing the child back out recovers the
// parent joint exactly.
JointDistribution build_joint(const ConditionalTable& ct, const JointDistribution& parent_joint);

// Derived conditional p(child | conditioning) from a concrete joint.
// Depends nonlinearly on the joint's contingent probabilities, unlike the
// nomological tables above. Conditioning assignments of zero probability
// are a zero_support_error, never a silent NaN.
ConditionalTable reversed_conditional(const JointDistribution& joint, const std::string& child,
                                      const std::vector<std::string>& conditioning);

struct ReichenbachResult {
    bool correlated;              // P(a,b) != P(a) P(b) beyond tolerance
    bool factorizes_given_c;      // P(a,b|c) == P(a|c) P(b|c) within tolerance, all valid c
    double correlation_residual;  // max |P(a,b) - P(a) P(b)|
    double factorization_residual; // max over valid c of |P(a,b|c) - P(a|c) P(b|c)|
    bool skipped_zero_support_c;  // some c value had zero probability and was skipped
};

ReichenbachResult reichenbach_test(const JointDistribution& joint, const std::string& a,
                                   const std::string& b, const std::string& c,
                                   double tolerance = tol::prob);

} // namespace unilab
