#pragma once

#include "nestderiv/derivation.hpp"
#include "nestderiv/linalg.hpp"

#include <cstdint>
#include <optional>

namespace nestderiv {

/// Choice data for the implementer construction at the invariant projection
/// p = lattice_projection(level): a unit vector xi0 in range(p^perp) and a unit
/// vector eta1 in range(p). Both are free; different choices yield implementers
/// that differ by a scalar.
struct ConstructionChoices {
    Index level = 0;
    CVector xi0;
    CVector eta1;
};

/// Level with d_k = ceil(n/2) when the chain has one (always true for T_n),
/// otherwise the interior level whose dimension is closest to n/2.
Index default_level(const NestAlgebra& alg);

/// xi0 = first coordinate vector of p^perp, eta1 = first coordinate vector of p.
ConstructionChoices default_choices(const NestAlgebra& alg, std::optional<Index> level = std::nullopt);

/// Choices from absolute coordinate indices: xi0 = e_{xi0_index} (must lie in
/// p^perp), eta1 = e_{eta1_index} (must lie in p).
ConstructionChoices choices_from_indices(const NestAlgebra& alg, Index level, Index xi0_index,
                                         Index eta1_index);

/// Throws ErrorCode::invalid_argument unless the level is interior, both vectors
/// have unit norm (1e-12), p xi0 = 0 and p eta1 = eta1.
void check_choices(const NestAlgebra& alg, const ConstructionChoices& choices);

/// b1 eta = delta(xi0 (x) eta) xi0 for each coordinate vector eta of p, and
/// b1 p^perp = 0. xi0 (x) eta is the canonical a in S with a xi0 = eta, and
/// (xi0 (x) eta) p0 = xi0 (x) eta for p0 = xi0 (x) xi0.
CMatrix build_b1(const DerivationTable& table, const ConstructionChoices& choices);

/// c1 = -p delta(p) p^perp.
CMatrix build_c1(const DerivationTable& table, const ConstructionChoices& choices);

/// c2 = sum over an orthonormal basis {xi_a} of p^perp of
///   p_a [ -q_a^* delta(q_a) p^perp + q_a^* delta(q1) q1^* q_a ]
/// with q_a = xi_a (x) eta1, q1 = xi0 (x) eta1, p_a = xi_a (x) xi_a.
/// The overload taking complement_basis uses its columns (n x (n - d)) as the
/// basis; they must be orthonormal and lie in p^perp.
CMatrix build_c2(const DerivationTable& table, const ConstructionChoices& choices);
CMatrix build_c2(const DerivationTable& table, const ConstructionChoices& choices,
                 const CMatrix& complement_basis);

struct ConstructionArtifacts {
    CMatrix b1;
    CMatrix c1;
    CMatrix b2;  // b1 + c1
    CMatrix c2;
    CMatrix b;   // b2 + c2
    ConstructionChoices choices;
};

ConstructionArtifacts build_b(const DerivationTable& table, const ConstructionChoices& choices);

/// Recovers the components of an implementer from b alone using their block
/// structure: b1 = b p, c1 = p b p^perp, c2 = p^perp b p^perp.
ConstructionArtifacts decompose(const NestAlgebra& alg, const CMatrix& b, const ConstructionChoices& choices);

/// (I - 2p) delta(p) for p = lattice_projection(level); its commutator with p
/// reproduces delta(p).
CMatrix two_projection_b(const DerivationTable& table, Index level);

struct RuleResidual {
    /// residuals(a, e): a indexes coordinate vectors of p^perp (xi_a = e_{d+a}),
    /// e indexes coordinate vectors of p (eta = e_e).
    Eigen::MatrixXd residuals;
    double max_residual = 0.0;
};

/// For q = xi_a (x) eta, q_a = xi_a (x) eta1, q1 = xi0 (x) eta1 measures
///   || delta(q) - [ delta(q q_a^* q1) q1^* q_a + q q_a^* delta(q_a)
///                   - q q_a^* delta(q1) q1^* q_a ] ||.
/// The rule holds for every implemented derivation, and when it holds for a
/// derivation the constructed b implements it on all of S.
RuleResidual triple_rule_residual(const DerivationTable& table, const ConstructionChoices& choices);

struct VerifyOptions {
    double tol = 1e-9;                 // absolute tolerance for all residuals
    std::optional<CMatrix> generator;  // known generator of an inner table
    int norm_samples = 32;
    std::uint64_t seed = 0;
    std::optional<NormEstimate> delta_norm;  // reused instead of re-estimating
};

struct PassFlags {
    bool thm11 = false;  // b2 implements delta on S p, with the b1/b2 norm bounds
    bool thm12 = false;  // b implements delta on S p and p^perp S p^perp, ||b|| bound
    bool thm13 = false;  // triple rule holds and b implements delta on all of S
};

struct VerificationReport {
    double residual_pSp = 0.0;
    double residual_corner = 0.0;
    double residual_full = 0.0;
    RuleResidual rule;
    double norm_b1 = 0.0;
    double norm_b2 = 0.0;
    double norm_b = 0.0;
    NormEstimate delta_norm;
    std::optional<ScalarPart> gauge;  // scalar_identity_part(b - generator)
    double tol = 0.0;
    PassFlags pass;
};

/// Implementation residuals are max over the relevant basis units u of
/// ||delta(u) - (b u - u b)||:
///   residual_pSp:    units with u = p u p, for both b2 and b, plus u = p with b2;
///   residual_corner: units with u = p^perp u p^perp, for b;
///   residual_full:   all units, for b.
/// Norm bounds use the analytic upper bound ub on ||delta|| when available:
/// ||b1|| <= ub, ||b2|| <= 2 ub, ||b|| <= 4 ub (each + tol).
VerificationReport verify(const DerivationTable& table, const ConstructionArtifacts& artifacts,
                          const VerifyOptions& options);

/// tol * (1 + largest value norm of the table).
double default_tolerance(const DerivationTable& table, double base = 1e-9);

}  // namespace nestderiv
