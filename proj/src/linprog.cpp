#include "unilab/linprog.hpp"

#include "unilab/errors.hpp"

#include <cmath>
#include <vector>

namespace unilab {

std::optional<Eigen::VectorXd> solve_equality_feasibility(const Eigen::MatrixXd& A,
                                                          const Eigen::VectorXd& b,
                                                          double feas_tol) {
    const int m = static_cast<int>(A.rows());
    const int n = static_cast<int>(A.cols());
    if (b.size() != m) throw dimension_error("solve_equality_feasibility: A/b shape mismatch");

    // Tableau over [x | artificials | rhs], with rows flipped so rhs >= 0
    // and one artificial per row forming the starting basis.
    Eigen::MatrixXd tab(m + 1, n + m + 1);
    tab.setZero();
    for (int r = 0; r < m; ++r) {
        const double sign = b(r) < 0.0 ? -1.0 : 1.0;
        tab.block(r, 0, 1, n) = sign * A.row(r);
        tab(r, n + r) = 1.0;
        tab(r, n + m) = sign * b(r);
    }
    // Objective row: minimize sum of artificials. Expressed in terms of the
    // nonbasic x columns by subtracting the basic rows.
    for (int r = 0; r < m; ++r) tab.row(m) -= tab.row(r);
    tab.block(m, n, 1, m).setZero();

    std::vector<int> basis(m);
    for (int r = 0; r < m; ++r) basis[r] = n + r;

    const double pivot_eps = 1e-11;
    const int max_iters = 200 * (n + m) + 1000;

    for (int iter = 0; iter < max_iters; ++iter) {
        // Bland: entering column = lowest index with negative reduced cost.
        int enter = -1;
        for (int c = 0; c < n + m; ++c) {
            if (tab(m, c) < -pivot_eps) {
                enter = c;
                break;
            }
        }
        if (enter < 0) break; // optimal

        // Ratio test, Bland tie-break on basis index.
        int leave = -1;
        double best_ratio = 0.0;
        for (int r = 0; r < m; ++r) {
            if (tab(r, enter) > pivot_eps) {
                const double ratio = tab(r, n + m) / tab(r, enter);
                if (leave < 0 || ratio < best_ratio - pivot_eps ||
                    (std::abs(ratio - best_ratio) <= pivot_eps && basis[r] < basis[leave])) {
                    leave = r;
                    best_ratio = ratio;
                }
            }
        }
        if (leave < 0) {
            // Unbounded phase-1 cannot happen for a bounded-below objective;
            // treat as numerical failure.
            return std::nullopt;
        }

        tab.row(leave) /= tab(leave, enter);
        for (int r = 0; r <= m; ++r) {
            if (r == leave) continue;
            const double f = tab(r, enter);
            if (f != 0.0) tab.row(r) -= f * tab.row(leave);
        }
        basis[leave] = enter;
    }

    const double objective = -tab(m, n + m);
    if (std::abs(objective) > feas_tol) return std::nullopt;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (int r = 0; r < m; ++r)
        if (basis[r] < n) x(basis[r]) = tab(r, n + m);
    return x;
}

} // namespace unilab
