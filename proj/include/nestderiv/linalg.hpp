#pragma once

#include <Eigen/Dense>

#include <complex>

namespace nestderiv {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Inner product, linear in the first slot and conjugate-linear in the second:
/// <x, y> = sum_i x_i conj(y_i).
Complex inner(const CVector& x, const CVector& y);

/// The rank-one operator xi (x) eta, defined by (xi (x) eta) zeta = <zeta, xi> eta.
/// Its matrix is eta * xi^H, so entry (i, j) is eta_i conj(xi_j).
CMatrix rank_one(const CVector& xi, const CVector& eta);

/// Largest singular value.
double op_norm(const CMatrix& a);

struct ScalarPart {
    Complex lambda;
    double residual = 0.0;  // op_norm(a - lambda I)
};

/// lambda = trace(a) / n and the distance of a from lambda I in operator norm.
/// Callers decide scalar-ness by comparing the residual with their tolerance.
ScalarPart scalar_identity_part(const CMatrix& a);

/// b a - a b
CMatrix commutator(const CMatrix& b, const CMatrix& a);

CMatrix unit_matrix(Index n, Index i, Index j);
CVector basis_vector(Index n, Index i);

/// Diagonal 0/1 projection onto coordinates [begin, end).
CMatrix coordinate_projection(Index n, Index begin, Index end);

bool all_finite(const CMatrix& a);

/// P = P^2 = P^* within tol (scaled by max(1, ||P||)).
bool is_projection(const CMatrix& p, double tol);

/// Absolute tolerance for comparisons involving operands of the given norm.
inline double scaled_tol(double tol, double operand_norm) {
    return tol * (operand_norm > 1.0 ? operand_norm : 1.0);
}

}  // namespace nestderiv
