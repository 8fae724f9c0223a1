#include "nestderiv/random.hpp"

#include <Eigen/QR>

#include <cmath>

namespace nestderiv {

Complex Rng::complex_normal() {
    const double re = normal();
    const double im = normal();
    return Complex(re, im) / std::sqrt(2.0);
}

CMatrix Rng::gaussian_matrix(Index rows, Index cols) {
    CMatrix m(rows, cols);
    // Fill row-major so the draw order matches the JSON layout.
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) m(i, j) = complex_normal();
    return m;
}

CVector Rng::gaussian_vector(Index n) {
    CVector v(n);
    for (Index i = 0; i < n; ++i) v(i) = complex_normal();
    return v;
}

CVector Rng::unit_vector(Index n) {
    CVector v = gaussian_vector(n);
    while (v.norm() == 0.0) v = gaussian_vector(n);
    return v / v.norm();
}

CMatrix Rng::unitary(Index n) {
    const CMatrix z = gaussian_matrix(n, n);
    Eigen::HouseholderQR<CMatrix> qr(z);
    CMatrix q = qr.householderQ();
    const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Index j = 0; j < n; ++j) {
        const double mag = std::abs(r(j, j));
        if (mag > 0.0) q.col(j) *= r(j, j) / mag;
    }
    return q;
}

Index Rng::uniform_index(Index lo, Index hi) {
    std::uniform_int_distribution<Index> dist(lo, hi);
    return dist(engine_);
}

}  // namespace nestderiv
