#pragma once

// Composite systems and causal-influence semantics: mixed-radix joint
// configuration indexing, marginalized directed conditional probabilities,
// tensor-factorization tests, and the causal-locality verdict.

#include <string>
#include <vector>

#include "unilab/matrix.hpp"

namespace unilab {

// Labeled list of subsystems with per-subsystem configuration counts.
// Joint configurations are encoded row-major: the first subsystem is the
// most significant digit.
class CompositeSystem {
public:
    CompositeSystem(std::vector<std::string> labels, std::vector<int> dims);

    int subsystem_count() const { return static_cast<int>(dims_.size()); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::vector<int>& dims() const { return dims_; }
    long joint_dim() const { return joint_dim_; }

    int position_of(const std::string& label) const; // throws on unknown label

    long joint_index(const std::vector<int>& configs) const;
    std::vector<int> joint_unindex(long index) const;

private:
    std::vector<std::string> labels_;
    std::vector<int> dims_;
    long joint_dim_;
};

// Embed an operator acting on the listed subsystem positions (in the
// listed order) into the full joint space, acting as identity elsewhere.
CMatrix embed_op(const CompositeSystem& cs, const CMatrix& op, const std::vector<int>& positions);

// Conditional table p(target final configuration | joint initial
// configuration), obtained by summing gamma over every non-target final
// configuration. table(i, j): i indexes the target subsystem's final
// configuration, j the joint initial configuration. Columns sum to 1.
RMatrix marginal_conditional(const CompositeSystem& cs, const StochasticMatrix& gamma,
                             const std::string& target);

struct CausalReport {
    std::string source;
    std::string target;
    double influence; // max total-variation distance, in [0, 1]
    bool influenced;  // influence > tolerance
};

// Maximum total-variation distance between the target's marginalized
// conditionals as the source's initial configuration varies, holding every
// other subsystem's initial configuration fixed. Zero iff the target's
// directed conditional probabilities are independent of the source.
// The default implementation parallelizes over initial-configuration
// groups; the serial variant is the reference.
CausalReport causal_influence(const CompositeSystem& cs, const StochasticMatrix& gamma,
                              const std::string& source, const std::string& target,
                              double tolerance = tol::causal);
CausalReport causal_influence_serial(const CompositeSystem& cs, const StochasticMatrix& gamma,
                                     const std::string& source, const std::string& target,
                                     double tolerance = tol::causal);

struct FactorizationResult {
    bool factorized;
    double residual; // max-abs-entry of gamma minus the candidate product
};

// Tests whether gamma tensor-factorizes across the bipartition
// (side_a, complement). Candidate factors come from marginalizing gamma to
// each side with uniform weighting over the discarded side's initial
// configurations; for a genuinely factorized gamma this recovers the exact
// factors. Throws on degenerate partitions.
FactorizationResult factorization_check(const CompositeSystem& cs, const StochasticMatrix& gamma,
                                        const std::vector<std::string>& side_a,
                                        double tolerance = tol::prob);

} // namespace unilab
