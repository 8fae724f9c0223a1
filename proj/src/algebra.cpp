#include "nestderiv/algebra.hpp"

#include "nestderiv/error.hpp"
#include "nestderiv/random.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace nestderiv {

NestAlgebra::NestAlgebra(Index n, std::vector<Index> chain) : n_(n), chain_(std::move(chain)) {
    if (n_ < 1) throw Error(ErrorCode::invalid_argument, "algebra dimension must be at least 1");
    if (chain_.empty() || chain_.back() != n_) {
        throw Error(ErrorCode::invalid_argument, "chain must be nonempty and end with n");
    }
    Index prev = 0;
    for (Index d : chain_) {
        if (d <= prev || d > n_) {
            throw Error(ErrorCode::invalid_argument,
                        "chain must be strictly increasing with values in 1..n");
        }
        prev = d;
    }
    block_.resize(static_cast<std::size_t>(n_));
    Index level = 0;
    for (Index r = 0; r < n_; ++r) {
        while (r >= chain_[static_cast<std::size_t>(level)]) ++level;
        block_[static_cast<std::size_t>(r)] = level;
    }
}

NestAlgebra NestAlgebra::triangular(Index n) {
    std::vector<Index> chain;
    for (Index d = 1; d <= n; ++d) chain.push_back(d);
    return NestAlgebra(n, std::move(chain));
}

NestAlgebra NestAlgebra::full(Index n) { return NestAlgebra(n, {n}); }

bool NestAlgebra::is_maximal_triangular() const { return levels() == n_; }

Index NestAlgebra::invariant_dim(Index level) const {
    if (level < 1 || level > levels()) {
        throw Error(ErrorCode::invalid_argument,
                    "chain level " + std::to_string(level) + " outside 1.." +
                        std::to_string(levels()));
    }
    return chain_[static_cast<std::size_t>(level - 1)];
}

std::vector<Index> NestAlgebra::interior_levels() const {
    std::vector<Index> out;
    for (Index k = 1; k < levels(); ++k) out.push_back(k);
    return out;
}

bool NestAlgebra::contains(const CMatrix& a, double tol) const {
    if (a.rows() != n_ || a.cols() != n_) {
        throw Error(ErrorCode::dimension_mismatch, "contains: matrix is not n x n");
    }
    for (Index i = 0; i < n_; ++i)
        for (Index j = 0; j < n_; ++j)
            if (!admissible(i, j) && std::abs(a(i, j)) > tol) return false;
    return true;
}

CMatrix NestAlgebra::lattice_projection(Index level) const {
    return coordinate_projection(n_, 0, invariant_dim(level));
}

std::vector<MatrixUnit> NestAlgebra::basis_units() const {
    std::vector<MatrixUnit> units;
    for (Index i = 0; i < n_; ++i)
        for (Index j = 0; j < n_; ++j)
            if (admissible(i, j)) units.push_back({i, j});
    return units;
}

namespace {

class Checker {
public:
    explicit Checker(StructureReport& report) : report_(report) {}

    void expect(bool ok, const std::string& what) {
        ++report_.assertions;
        if (!ok) {
            ++report_.failures;
            if (report_.messages.size() < 50) report_.messages.push_back(what);
        }
    }

private:
    StructureReport& report_;
};

CMatrix random_member(const NestAlgebra& alg, Rng& rng) {
    CMatrix a = rng.gaussian_matrix(alg.dim(), alg.dim());
    for (Index i = 0; i < alg.dim(); ++i)
        for (Index j = 0; j < alg.dim(); ++j)
            if (!alg.admissible(i, j)) a(i, j) = 0.0;
    return a;
}

// Orthonormal basis (columns) of the commutant {X : X u = u X for every basis
// unit u}, from the null space of the stacked constraint system.
Eigen::MatrixXd commutant_basis(const NestAlgebra& alg, double tol) {
    const Index n = alg.dim();
    const Index nn = n * n;
    auto var = [n](Index r, Index c) { return c * n + r; };  // column-major vec
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(nn, nn);
    Eigen::VectorXd row(nn);
    for (const MatrixUnit& u : alg.basis_units()) {
        // (X E_ij - E_ij X)(a, b) = X(a, i) [b == j] - [a == i] X(j, b)
        for (Index a = 0; a < n; ++a) {
            for (Index b = 0; b < n; ++b) {
                if (b != u.j && a != u.i) continue;
                row.setZero();
                if (b == u.j) row(var(a, u.i)) += 1.0;
                if (a == u.i) row(var(u.j, b)) -= 1.0;
                gram.noalias() += row * row.transpose();
            }
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
    const Eigen::VectorXd& vals = eig.eigenvalues();
    Index nullity = 0;
    while (nullity < nn && vals(nullity) <= tol * (1.0 + vals(nn - 1))) ++nullity;
    return eig.eigenvectors().leftCols(nullity);
}

}  // namespace

StructureReport check_structure(const NestAlgebra& alg, int trials, std::uint64_t seed, double tol) {
    if (trials < 1) throw Error(ErrorCode::invalid_argument, "check_structure: trials must be >= 1");
    StructureReport report;
    Checker check(report);
    Rng rng(seed);
    const Index n = alg.dim();
    const auto units = alg.basis_units();

    // Lattice: members of the diagonal, self-adjoint, idempotent, nested.
    for (Index k = 1; k <= alg.levels(); ++k) {
        const CMatrix p = alg.lattice_projection(k);
        check.expect(is_projection(p, tol), "lattice projection not a projection");
        check.expect(alg.contains(p, tol) && alg.contains(p.adjoint(), tol),
                     "lattice projection outside S or S*");
        if (k > 1) {
            const CMatrix prev = alg.lattice_projection(k - 1);
            check.expect(op_norm(prev * p - prev) <= tol, "lattice not totally ordered");
        }
    }

    // Commutant is one-dimensional and spanned by the identity.
    const Eigen::MatrixXd comm = commutant_basis(alg, tol);
    check.expect(comm.cols() == 1, "commutant dimension " + std::to_string(comm.cols()) + " != 1");

    for (int t = 0; t < trials; ++t) {
        const Index level = rng.uniform_index(1, alg.levels());
        const Index d = alg.invariant_dim(level);
        const CMatrix p = alg.lattice_projection(level);
        const CMatrix p_perp = CMatrix::Identity(n, n) - p;

        // p B(H) p^perp lies in S.
        const CMatrix m = rng.gaussian_matrix(n, n);
        check.expect(alg.contains(p * m * p_perp, tol), "p M p^perp outside S");

        // p^perp S p = 0 and p commutes with diagonal members.
        const CMatrix a = random_member(alg, rng);
        check.expect(op_norm(p_perp * a * p) <= tol * (1.0 + op_norm(a)), "p^perp a p != 0");
        CMatrix diag = CMatrix::Zero(n, n);
        diag.diagonal() = rng.gaussian_vector(n);
        check.expect(op_norm(commutator(p, diag)) <= tol, "p does not commute with diagonal");

        // S xi covers range(p) for xi in p^perp, via a = xi (x) eta.
        if (d < n) {
            CVector xi = CVector::Zero(n);
            xi.tail(n - d) = rng.unit_vector(n - d);
            for (Index r = 0; r < d; ++r) {
                const CVector eta = basis_vector(n, r);
                const CMatrix q = rank_one(xi, eta);
                check.expect(alg.contains(q, tol), "xi (x) eta outside S");
                check.expect((q * xi - eta).norm() <= tol, "(xi (x) eta) xi != eta");
            }
        }

        // A random operator projected onto the commutant is scalar, and a
        // random operator is not in the commutant.
        const CMatrix x = rng.gaussian_matrix(n, n);
        Eigen::VectorXcd vec_x = Eigen::Map<const Eigen::VectorXcd>(x.data(), n * n);
        const Eigen::VectorXcd proj = comm.cast<Complex>() * (comm.cast<Complex>().adjoint() * vec_x);
        const CMatrix x_comm = Eigen::Map<const CMatrix>(proj.data(), n, n);
        check.expect(scalar_identity_part(x_comm).residual <= tol * (1.0 + op_norm(x)),
                     "commutant element not scalar");
        if (n > 1) {
            double worst = 0.0;
            for (const MatrixUnit& u : units) {
                worst = std::max(worst, op_norm(commutator(x, unit_matrix(n, u.i, u.j))));
            }
            check.expect(worst > tol, "random non-scalar operator commutes with S");
        }
    }
    return report;
}

}  // namespace nestderiv
