#pragma once

// Phase-1 simplex for small dense equality-feasibility problems:
// find x >= 0 with A x = b, or report that none exists.

#include <Eigen/Dense>

#include <optional>

namespace unilab {

// Returns a feasible x if the phase-1 optimum (sum of artificial
// variables) is at most feas_tol, otherwise nullopt. Bland's rule, so
// termination is guaranteed on degenerate problems. Intended for the
// problem sizes this project needs (tens of variables), not as a general
// LP code.
std::optional<Eigen::VectorXd> solve_equality_feasibility(const Eigen::MatrixXd& A,
                                                          const Eigen::VectorXd& b,
                                                          double feas_tol);

} // namespace unilab
