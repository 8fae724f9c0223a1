#pragma once

#include "nestderiv/construct.hpp"
#include "nestderiv/derivation.hpp"

#include <vector>

namespace nestderiv {

/// lambda_ab with (b_a - b_b) p_a = lambda_ab p_a, for a member a and a later
/// member b. residual = ||(b_a - b_b) p_a - lambda_ab p_a||.
struct ConsistencyScalar {
    Index beta = 0;
    Complex value;
    double residual = 0.0;
};

struct ChainMember {
    Index level = 0;
    CMatrix b;
    ConstructionChoices choices;
    std::vector<ConsistencyScalar> lambdas;  // against every later member
};

/// One b1-style implementer b_a per interior chain level, each implementing
/// delta on p_a (delta(a) p_a = (b_a a - a b_a) p_a for a in S).
struct ChainFamily {
    NestAlgebra algebra;
    std::vector<ChainMember> members;
};

/// Recomputes every member's consistency scalars from the current operators.
void refresh_scalars(ChainFamily& family);

/// b_a = build_b1 at each interior level with xi0 = first coordinate vector of
/// p_a^perp. Throws ErrorCode::not_applicable when the chain has no interior
/// projection.
ChainFamily chain_family(const DerivationTable& table);

/// Shifts each later member by lambda p_b so that (b_a0 - b_b) p_a0 = 0 for the
/// smallest interior level a0. Adding lambda p_b keeps b_b = b_b p_b and does
/// not change the commutators (b a - a b) p_b for a in S.
ChainFamily normalize_chain(const ChainFamily& family);

/// The member at the largest interior level. A finite chain stabilizes there;
/// no limit is taken.
CMatrix stabilized_b(const ChainFamily& family);

struct StabilizationReport {
    Index level = 0;
    CMatrix b;
    /// max over basis units u of ||(delta(u) - (b u - u b)) p_top||
    double implements_residual = 0.0;
    /// (b_construct - b) p_top = lambda p_top, with b_construct from build_b at
    /// the same level with default choices.
    ScalarPart gauge_vs_construct;
};

StabilizationReport compare_stabilized(const DerivationTable& table, const ChainFamily& family);

}  // namespace nestderiv
