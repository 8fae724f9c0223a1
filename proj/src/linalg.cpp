#include "nestderiv/linalg.hpp"

#include "nestderiv/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <string>

namespace nestderiv {

Complex inner(const CVector& x, const CVector& y) {
    if (x.size() != y.size()) {
        throw Error(ErrorCode::dimension_mismatch, "inner: vector lengths differ");
    }
    // Eigen's dot is conjugate-linear in its first argument.
    return y.dot(x);
}

CMatrix rank_one(const CVector& xi, const CVector& eta) {
    if (xi.size() != eta.size() || xi.size() < 1) {
        throw Error(ErrorCode::dimension_mismatch,
                    "rank_one: vectors must have equal nonzero length (got " +
                        std::to_string(xi.size()) + " and " + std::to_string(eta.size()) + ")");
    }
    return eta * xi.adjoint();
}

double op_norm(const CMatrix& a) {
    if (a.size() == 0) return 0.0;
    if (a.rows() == 1 || a.cols() == 1) return a.norm();
    // sigma_max^2 is the top eigenvalue of the smaller Gram matrix; only the
    // largest singular value is needed, so squaring costs no accuracy there.
    const double scale = a.cwiseAbs().maxCoeff();
    if (scale == 0.0) return 0.0;
    const CMatrix s = a / scale;
    const CMatrix gram = s.rows() <= s.cols() ? CMatrix(s * s.adjoint()) : CMatrix(s.adjoint() * s);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    return scale * std::sqrt(std::max(eig.eigenvalues().maxCoeff(), 0.0));
}

ScalarPart scalar_identity_part(const CMatrix& a) {
    if (a.rows() != a.cols()) {
        throw Error(ErrorCode::dimension_mismatch, "scalar_identity_part: matrix is not square");
    }
    if (a.rows() == 0) return {};
    const Complex lambda = a.trace() / static_cast<double>(a.rows());
    CMatrix shifted = a;
    shifted.diagonal().array() -= lambda;
    return {lambda, op_norm(shifted)};
}

CMatrix commutator(const CMatrix& b, const CMatrix& a) {
    if (b.rows() != a.rows() || b.cols() != a.cols() || a.rows() != a.cols()) {
        throw Error(ErrorCode::dimension_mismatch, "commutator: operands must be square and equal size");
    }
    return b * a - a * b;
}

CMatrix unit_matrix(Index n, Index i, Index j) {
    CMatrix e = CMatrix::Zero(n, n);
    e(i, j) = 1.0;
    return e;
}

CVector basis_vector(Index n, Index i) {
    CVector e = CVector::Zero(n);
    e(i) = 1.0;
    return e;
}

CMatrix coordinate_projection(Index n, Index begin, Index end) {
    CMatrix p = CMatrix::Zero(n, n);
    for (Index r = begin; r < end; ++r) p(r, r) = 1.0;
    return p;
}

bool all_finite(const CMatrix& a) {
    return a.real().allFinite() && a.imag().allFinite();
}

bool is_projection(const CMatrix& p, double tol) {
    if (p.rows() != p.cols()) return false;
    const double t = scaled_tol(tol, op_norm(p));
    return op_norm(p * p - p) <= t && op_norm(p.adjoint() - p) <= t;
}

}  // namespace nestderiv
