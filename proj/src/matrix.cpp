#include "unilab/matrix.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace unilab {

double max_abs(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double max_abs(const RMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

bool all_finite(const CMatrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag()))
                return false;
    return true;
}

bool all_finite(const RVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (!std::isfinite(v(i))) return false;
    return true;
}

static void require_square(const CMatrix& m, const char* who) {
    if (m.rows() != m.cols())
        throw dimension_error(std::string(who) + ": matrix is " +
                              std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                              ", expected square");
}

bool is_unitary(const CMatrix& m, double tolerance) {
    require_square(m, "is_unitary");
    CMatrix gram = m.adjoint() * m;
    gram.diagonal().array() -= 1.0;
    return max_abs(gram) <= tolerance;
}

bool is_hermitian(const CMatrix& m, double tolerance) {
    require_square(m, "is_hermitian");
    return max_abs(CMatrix(m - m.adjoint())) <= tolerance;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

RMatrix kron(const RMatrix& a, const RMatrix& b) {
    RMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

CMatrix partial_trace(const CMatrix& m, const std::vector<int>& dims,
                      const std::vector<int>& keep) {
    require_square(m, "partial_trace");
    long total = 1;
    for (int d : dims) {
        if (d < 1) throw dimension_error("partial_trace: factor dimensions must be >= 1");
        total *= d;
    }
    if (total != m.rows())
        throw dimension_error("partial_trace: factor dimensions multiply to " +
                              std::to_string(total) + ", matrix has dim " +
                              std::to_string(m.rows()));

    const int n = static_cast<int>(dims.size());
    std::vector<bool> kept(n, false);
    for (int k : keep) {
        if (k < 0 || k >= n) throw dimension_error("partial_trace: keep index out of range");
        kept[k] = true;
    }

    std::vector<int> keep_pos, drop_pos;
    for (int f = 0; f < n; ++f) (kept[f] ? keep_pos : drop_pos).push_back(f);

    long keep_dim = 1, drop_dim = 1;
    for (int f : keep_pos) keep_dim *= dims[f];
    for (int f : drop_pos) drop_dim *= dims[f];

    // Strides of each factor in the row-major joint index.
    std::vector<long> stride(n, 1);
    for (int f = n - 2; f >= 0; --f) stride[f] = stride[f + 1] * dims[f + 1];

    // Offset of a kept (resp. dropped) multi-index inside the joint index.
    auto offsets = [&](const std::vector<int>& pos, long count) {
        std::vector<long> off(count, 0);
        for (long idx = 0; idx < count; ++idx) {
            long rem = idx;
            for (int p = static_cast<int>(pos.size()) - 1; p >= 0; --p) {
                int f = pos[p];
                off[idx] += (rem % dims[f]) * stride[f];
                rem /= dims[f];
            }
        }
        return off;
    };
    const std::vector<long> keep_off = offsets(keep_pos, keep_dim);
    const std::vector<long> drop_off = offsets(drop_pos, drop_dim);

    CMatrix out = CMatrix::Zero(keep_dim, keep_dim);
    for (long r = 0; r < keep_dim; ++r)
        for (long c = 0; c < keep_dim; ++c) {
            cxd acc = 0.0;
            for (long d = 0; d < drop_dim; ++d)
                acc += m(keep_off[r] + drop_off[d], keep_off[c] + drop_off[d]);
            out(r, c) = acc;
        }
    return out;
}

CMatrix herm_expm(const CMatrix& h, double t, double tolerance) {
    if (!is_hermitian(h, tolerance))
        throw validation_error("herm_expm: matrix is not Hermitian within tolerance");
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    const RVector& evals = es.eigenvalues();
    CVector phases(evals.size());
    for (Eigen::Index k = 0; k < evals.size(); ++k)
        phases(k) = std::exp(cxd(0.0, -evals(k) * t));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

// Shared clamp-and-renormalize rule for probability data: tiny negatives
// (within tolerance) are rounding noise and get clamped to zero; larger
// violations are treated as bugs in the caller, not smoothed over.
static void clean_distribution(RVector& p, double tolerance, const char* who) {
    if (!all_finite(p))
        throw validation_error(std::string(who) + ": non-finite entry");
    for (Eigen::Index i = 0; i < p.size(); ++i) {
        if (p(i) < -tolerance)
            throw validation_error(std::string(who) + ": entry " + std::to_string(p(i)) +
                                   " below -tolerance");
        if (p(i) < 0.0) p(i) = 0.0;
    }
    const double sum = p.sum();
    if (std::abs(sum - 1.0) > tolerance)
        throw validation_error(std::string(who) + ": entries sum to " + std::to_string(sum) +
                               ", expected 1 within tolerance");
    if (sum > 0.0) p /= sum;
}

ProbabilityVector::ProbabilityVector(RVector p, double tolerance) : p_(std::move(p)) {
    if (p_.size() == 0)
        throw dimension_error("ProbabilityVector: empty");
    clean_distribution(p_, tolerance, "ProbabilityVector");
}

ProbabilityVector ProbabilityVector::point_mass(int dim, int i) {
    if (i < 0 || i >= dim) throw range_error("point_mass: index out of range");
    RVector p = RVector::Zero(dim);
    p(i) = 1.0;
    return ProbabilityVector(std::move(p));
}

ProbabilityVector ProbabilityVector::uniform(int dim) {
    return ProbabilityVector(RVector::Constant(dim, 1.0 / dim));
}

StochasticMatrix::StochasticMatrix(RMatrix m, double tolerance) : m_(std::move(m)) {
    if (m_.rows() != m_.cols())
        throw dimension_error("StochasticMatrix: must be square");
    if (m_.rows() == 0)
        throw dimension_error("StochasticMatrix: empty");
    for (Eigen::Index j = 0; j < m_.cols(); ++j) {
        RVector col = m_.col(j);
        clean_distribution(col, tolerance, "StochasticMatrix column");
        m_.col(j) = col;
    }
}

ProbabilityVector StochasticMatrix::column(int j, double tolerance) const {
    if (j < 0 || j >= dim()) throw range_error("StochasticMatrix::column: index out of range");
    return ProbabilityVector(m_.col(j), tolerance);
}

StochasticMatrix StochasticMatrix::identity(int dim) {
    return StochasticMatrix(RMatrix::Identity(dim, dim));
}

} // namespace unilab
