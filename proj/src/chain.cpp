#include "nestderiv/chain.hpp"

#include "nestderiv/error.hpp"

#include <algorithm>

namespace nestderiv {

namespace {

// lambda from the compression of m to range(p) (first d coordinates), and the
// distance of m p from lambda p.
ScalarPart compressed_scalar(const CMatrix& m, Index d) {
    const Index n = m.rows();
    const ScalarPart block = scalar_identity_part(m.topLeftCorner(d, d));
    const CMatrix p = coordinate_projection(n, 0, d);
    return {block.lambda, op_norm(m * p - block.lambda * p)};
}

}  // namespace

void refresh_scalars(ChainFamily& family) {
    auto& members = family.members;
    for (std::size_t a = 0; a < members.size(); ++a) {
        members[a].lambdas.clear();
        const Index d = family.algebra.invariant_dim(members[a].level);
        for (std::size_t b = a + 1; b < members.size(); ++b) {
            const ScalarPart s = compressed_scalar(members[a].b - members[b].b, d);
            members[a].lambdas.push_back({members[b].level, s.lambda, s.residual});
        }
    }
}

ChainFamily chain_family(const DerivationTable& table) {
    const NestAlgebra& alg = table.algebra();
    const auto interior = alg.interior_levels();
    if (interior.empty()) {
        throw Error(ErrorCode::not_applicable,
                    "irreducible model: chain has no interior projection, construction inapplicable");
    }
    ChainFamily family{alg, {}};
    for (Index level : interior) {
        ConstructionChoices choices = default_choices(alg, level);
        CMatrix b = build_b1(table, choices);
        family.members.push_back({level, std::move(b), std::move(choices), {}});
    }
    refresh_scalars(family);
    return family;
}

ChainFamily normalize_chain(const ChainFamily& family) {
    ChainFamily out = family;
    if (out.members.size() < 2) return out;
    const Index n = out.algebra.dim();
    const Index d0 = out.algebra.invariant_dim(out.members.front().level);
    for (std::size_t b = 1; b < out.members.size(); ++b) {
        ChainMember& member = out.members[b];
        const ScalarPart s = compressed_scalar(out.members.front().b - member.b, d0);
        const Index d = out.algebra.invariant_dim(member.level);
        member.b += s.lambda * coordinate_projection(n, 0, d);
    }
    refresh_scalars(out);
    return out;
}

CMatrix stabilized_b(const ChainFamily& family) {
    if (family.members.empty()) {
        throw Error(ErrorCode::not_applicable, "stabilized_b: empty chain family");
    }
    return family.members.back().b;
}

StabilizationReport compare_stabilized(const DerivationTable& table, const ChainFamily& family) {
    const NestAlgebra& alg = table.algebra();
    if (!(alg == family.algebra)) {
        throw Error(ErrorCode::dimension_mismatch, "compare_stabilized: family built for a different algebra");
    }
    StabilizationReport rep;
    rep.b = stabilized_b(family);
    rep.level = family.members.back().level;
    const Index d = alg.invariant_dim(rep.level);
    const CMatrix p_top = alg.lattice_projection(rep.level);

    for (const MatrixUnit& u : table.units()) {
        const CMatrix e = unit_matrix(alg.dim(), u.i, u.j);
        const CMatrix diff = (table.value(u) - commutator(rep.b, e)) * p_top;
        rep.implements_residual = std::max(rep.implements_residual, op_norm(diff));
    }

    const ConstructionArtifacts built = build_b(table, default_choices(alg, rep.level));
    rep.gauge_vs_construct = compressed_scalar(built.b - rep.b, d);
    return rep;
}

}  // namespace nestderiv
