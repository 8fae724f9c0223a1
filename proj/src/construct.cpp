#include "nestderiv/construct.hpp"

#include "nestderiv/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nestderiv {

namespace {

constexpr double kUnitTol = 1e-12;

// b E_ij - E_ij b without forming E_ij.
CMatrix unit_commutator(const CMatrix& b, Index i, Index j) {
    CMatrix out = CMatrix::Zero(b.rows(), b.cols());
    out.col(j) += b.col(i);
    out.row(i) -= b.row(j);
    return out;
}

struct Split {
    Index d;
    CMatrix p;
    CMatrix p_perp;
};

Split split_at(const NestAlgebra& alg, Index level) {
    const Index n = alg.dim();
    const Index d = alg.invariant_dim(level);
    CMatrix p = alg.lattice_projection(level);
    CMatrix p_perp = CMatrix::Identity(n, n) - p;
    return {d, std::move(p), std::move(p_perp)};
}

void require_same_algebra(const DerivationTable& table, const ConstructionChoices& choices) {
    check_choices(table.algebra(), choices);
}

}  // namespace

Index default_level(const NestAlgebra& alg) {
    const auto interior = alg.interior_levels();
    if (interior.empty()) {
        throw Error(ErrorCode::not_applicable,
                    "irreducible model: chain has no interior projection, construction inapplicable");
    }
    const Index n = alg.dim();
    const Index half_up = (n + 1) / 2;
    Index best = interior.front();
    Index best_gap = std::abs(2 * alg.invariant_dim(best) - 2 * half_up);
    for (Index k : interior) {
        const Index gap = std::abs(2 * alg.invariant_dim(k) - 2 * half_up);
        if (gap < best_gap) {
            best = k;
            best_gap = gap;
        }
    }
    return best;
}

ConstructionChoices default_choices(const NestAlgebra& alg, std::optional<Index> level) {
    const Index k = level ? *level : default_level(alg);
    const Index d = alg.invariant_dim(k);
    return choices_from_indices(alg, k, d, 0);
}

ConstructionChoices choices_from_indices(const NestAlgebra& alg, Index level, Index xi0_index,
                                         Index eta1_index) {
    const Index n = alg.dim();
    if (level < 1 || level >= alg.levels()) {
        throw Error(ErrorCode::invalid_argument,
                    "level " + std::to_string(level) + " is not interior (need 1 <= k < " +
                        std::to_string(alg.levels()) + ")");
    }
    const Index d = alg.invariant_dim(level);
    if (xi0_index < d || xi0_index >= n) {
        throw Error(ErrorCode::invalid_argument,
                    "xi0 index " + std::to_string(xi0_index) + " must lie in p^perp = [" + std::to_string(d) +
                        ", " + std::to_string(n) + ")");
    }
    if (eta1_index < 0 || eta1_index >= d) {
        throw Error(ErrorCode::invalid_argument,
                    "eta1 index " + std::to_string(eta1_index) + " must lie in p = [0, " + std::to_string(d) + ")");
    }
    return {level, basis_vector(n, xi0_index), basis_vector(n, eta1_index)};
}

void check_choices(const NestAlgebra& alg, const ConstructionChoices& c) {
    const Index n = alg.dim();
    if (c.level < 1 || c.level >= alg.levels()) {
        throw Error(ErrorCode::invalid_argument,
                    "construction needs an interior projection (0 != p != 1); level " + std::to_string(c.level) +
                        " is not interior");
    }
    if (c.xi0.size() != n || c.eta1.size() != n) {
        throw Error(ErrorCode::dimension_mismatch, "choice vectors must have length n");
    }
    if (std::abs(c.xi0.norm() - 1.0) > kUnitTol || std::abs(c.eta1.norm() - 1.0) > kUnitTol) {
        throw Error(ErrorCode::invalid_argument, "xi0 and eta1 must be unit vectors");
    }
    const Index d = alg.invariant_dim(c.level);
    if (c.xi0.head(d).norm() != 0.0) throw Error(ErrorCode::invalid_argument, "xi0 must lie in p^perp");
    if (c.eta1.tail(n - d).norm() != 0.0) throw Error(ErrorCode::invalid_argument, "eta1 must lie in p");
}

CMatrix build_b1(const DerivationTable& table, const ConstructionChoices& choices) {
    require_same_algebra(table, choices);
    const Index n = table.dim();
    const Index d = table.algebra().invariant_dim(choices.level);
    const CVector& xi0 = choices.xi0;
    const CMatrix p0 = rank_one(xi0, xi0);

    CMatrix b1 = CMatrix::Zero(n, n);
    for (Index r = 0; r < d; ++r) {
        const CVector eta = basis_vector(n, r);
        const CMatrix a = rank_one(xi0, eta);  // a xi0 = eta, a in p B(H) p^perp
        b1.col(r) = eval(table, a * p0) * xi0;
    }
    return b1;
}

CMatrix build_c1(const DerivationTable& table, const ConstructionChoices& choices) {
    require_same_algebra(table, choices);
    const Split s = split_at(table.algebra(), choices.level);
    return -(s.p * eval(table, s.p) * s.p_perp);
}

CMatrix build_c2(const DerivationTable& table, const ConstructionChoices& choices) {
    const Index n = table.dim();
    const Index d = table.algebra().invariant_dim(choices.level);
    CMatrix basis = CMatrix::Zero(n, n - d);
    basis.bottomRows(n - d) = CMatrix::Identity(n - d, n - d);
    return build_c2(table, choices, basis);
}

CMatrix build_c2(const DerivationTable& table, const ConstructionChoices& choices,
                 const CMatrix& complement_basis) {
    require_same_algebra(table, choices);
    const Index n = table.dim();
    const Split s = split_at(table.algebra(), choices.level);
    if (complement_basis.rows() != n || complement_basis.cols() != n - s.d) {
        throw Error(ErrorCode::dimension_mismatch, "complement basis must be n x (n - d)");
    }
    if (complement_basis.topRows(s.d).norm() != 0.0) {
        throw Error(ErrorCode::invalid_argument, "complement basis vectors must lie in p^perp");
    }
    const CMatrix gram = complement_basis.adjoint() * complement_basis;
    if (op_norm(gram - CMatrix::Identity(n - s.d, n - s.d)) > 1e-10) {
        throw Error(ErrorCode::invalid_argument, "complement basis is not orthonormal");
    }

    const CMatrix q1 = rank_one(choices.xi0, choices.eta1);
    const CMatrix delta_q1 = eval(table, q1);
    CMatrix c2 = CMatrix::Zero(n, n);
    for (Index a = 0; a < complement_basis.cols(); ++a) {
        const CVector xi = complement_basis.col(a);
        const CMatrix q = rank_one(xi, choices.eta1);
        const CMatrix q_adj = q.adjoint();
        const CMatrix p_xi = rank_one(xi, xi);
        c2 += p_xi * (-(q_adj * eval(table, q) * s.p_perp) + q_adj * delta_q1 * q1.adjoint() * q);
    }
    return c2;
}

ConstructionArtifacts build_b(const DerivationTable& table, const ConstructionChoices& choices) {
    ConstructionArtifacts out;
    out.choices = choices;
    out.b1 = build_b1(table, choices);
    out.c1 = build_c1(table, choices);
    out.b2 = out.b1 + out.c1;
    out.c2 = build_c2(table, choices);
    out.b = out.b2 + out.c2;
    return out;
}

ConstructionArtifacts decompose(const NestAlgebra& alg, const CMatrix& b, const ConstructionChoices& choices) {
    check_choices(alg, choices);
    if (b.rows() != alg.dim() || b.cols() != alg.dim()) {
        throw Error(ErrorCode::dimension_mismatch, "decompose: operator is not n x n");
    }
    const Split s = split_at(alg, choices.level);
    ConstructionArtifacts out;
    out.choices = choices;
    out.b1 = b * s.p;
    out.c1 = s.p * b * s.p_perp;
    out.b2 = out.b1 + out.c1;
    out.c2 = s.p_perp * b * s.p_perp;
    out.b = b;
    return out;
}

CMatrix two_projection_b(const DerivationTable& table, Index level) {
    const NestAlgebra& alg = table.algebra();
    const CMatrix p = alg.lattice_projection(level);
    const Index n = alg.dim();
    return (CMatrix::Identity(n, n) - 2.0 * p) * eval(table, p);
}

RuleResidual triple_rule_residual(const DerivationTable& table, const ConstructionChoices& choices) {
    require_same_algebra(table, choices);
    const Index n = table.dim();
    const Index d = table.algebra().invariant_dim(choices.level);

    const CMatrix q1 = rank_one(choices.xi0, choices.eta1);
    const CMatrix q1_adj = q1.adjoint();
    const CMatrix delta_q1 = eval(table, q1);

    RuleResidual out;
    out.residuals = Eigen::MatrixXd::Zero(n - d, d);
    for (Index a = 0; a < n - d; ++a) {
        const CVector xi_a = basis_vector(n, d + a);
        const CMatrix q_a = rank_one(xi_a, choices.eta1);
        const CMatrix q_a_adj = q_a.adjoint();
        const CMatrix delta_q_a = eval(table, q_a);
        for (Index e = 0; e < d; ++e) {
            const CMatrix q = rank_one(xi_a, basis_vector(n, e));
            const CMatrix q_qa_adj = q * q_a_adj;
            const CMatrix q2 = q_qa_adj * q1;  // xi0 (x) eta
            const CMatrix rhs = eval(table, q2) * q1_adj * q_a + q_qa_adj * delta_q_a -
                                q_qa_adj * delta_q1 * q1_adj * q_a;
            const double r = op_norm(eval(table, q) - rhs);
            out.residuals(a, e) = r;
            out.max_residual = std::max(out.max_residual, r);
        }
    }
    return out;
}

VerificationReport verify(const DerivationTable& table, const ConstructionArtifacts& art,
                          const VerifyOptions& options) {
    const NestAlgebra& alg = table.algebra();
    const Index n = alg.dim();
    check_choices(alg, art.choices);
    for (const CMatrix* m : {&art.b1, &art.c1, &art.b2, &art.c2, &art.b}) {
        if (m->rows() != n || m->cols() != n) {
            throw Error(ErrorCode::dimension_mismatch, "verify: artifacts do not match the algebra dimension");
        }
    }
    if (options.generator && (options.generator->rows() != n || options.generator->cols() != n)) {
        throw Error(ErrorCode::dimension_mismatch, "verify: generator does not match the algebra dimension");
    }

    const Split s = split_at(alg, art.choices.level);
    VerificationReport rep;
    rep.tol = options.tol;

    auto residual = [](const CMatrix& value, const CMatrix& b, const MatrixUnit& u) {
        return op_norm(value - unit_commutator(b, u.i, u.j));
    };
    for (const MatrixUnit& u : table.units()) {
        const CMatrix& value = table.value(u);
        const double with_b = residual(value, art.b, u);
        rep.residual_full = std::max(rep.residual_full, with_b);
        if (u.i < s.d && u.j < s.d) {
            rep.residual_pSp = std::max({rep.residual_pSp, with_b, residual(value, art.b2, u)});
        } else if (u.i >= s.d && u.j >= s.d) {
            rep.residual_corner = std::max(rep.residual_corner, with_b);
        }
    }
    rep.residual_pSp =
        std::max(rep.residual_pSp, op_norm(eval(table, s.p) - commutator(art.b2, s.p)));

    rep.rule = triple_rule_residual(table, art.choices);
    rep.norm_b1 = op_norm(art.b1);
    rep.norm_b2 = op_norm(art.b2);
    rep.norm_b = op_norm(art.b);
    rep.delta_norm = options.delta_norm
                         ? *options.delta_norm
                         : norm_estimate(table, options.norm_samples, options.seed, options.generator);
    if (options.generator) rep.gauge = scalar_identity_part(art.b - *options.generator);

    const double tol = options.tol;
    bool b1_ok = true;
    bool b2_ok = true;
    bool b_ok = true;
    if (rep.delta_norm.upper) {
        const double ub = *rep.delta_norm.upper;
        b1_ok = rep.norm_b1 <= ub + tol;
        b2_ok = rep.norm_b2 <= 2.0 * ub + tol;
        b_ok = rep.norm_b <= 4.0 * ub + tol;
    }
    rep.pass.thm11 = rep.residual_pSp <= tol && b1_ok && b2_ok;
    rep.pass.thm12 = rep.residual_pSp <= tol && rep.residual_corner <= tol && b_ok;
    rep.pass.thm13 = rep.rule.max_residual <= tol && rep.residual_full <= tol;
    return rep;
}

double default_tolerance(const DerivationTable& table, double base) {
    return base * (1.0 + table.max_value_norm());
}

}  // namespace nestderiv
