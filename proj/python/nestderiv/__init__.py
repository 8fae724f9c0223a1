"""Implementing operators for bounded derivations on finite-dimensional nest algebras."""

from ._nestderiv import (
    ConstructionChoices,
    DerivationTable,
    Error,
    NestAlgebra,
    build_b,
    build_b1,
    build_c1,
    build_c2,
    chain,
    default_choices,
    op_norm,
    rank_one,
    scalar_identity_part,
    triple_rule_residual,
    two_projection_b,
    verify,
)

__all__ = [
    "ConstructionChoices",
    "DerivationTable",
    "Error",
    "NestAlgebra",
    "build_b",
    "build_b1",
    "build_c1",
    "build_c2",
    "chain",
    "default_choices",
    "op_norm",
    "rank_one",
    "scalar_identity_part",
    "triple_rule_residual",
    "two_projection_b",
    "verify",
]
