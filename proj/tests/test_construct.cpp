#include "doctest.h"
#include "oracles.hpp"

#include "nestderiv/construct.hpp"
#include "nestderiv/error.hpp"
#include "nestderiv/random.hpp"

using namespace nestderiv;

namespace {

constexpr double kExact = 1e-12;

CMatrix diag12() {
    CMatrix c = CMatrix::Zero(2, 2);
    c(0, 0) = 1.0;
    c(1, 1) = 2.0;
    return c;
}

// hand instance: the table comes from the symbolic expansion, not inner_from
struct Hand {
    DerivationTable table;
    ConstructionChoices choices;
};

Hand hand(Index n, const oracle::Sparse& c, Index level) {
    const NestAlgebra alg = NestAlgebra::triangular(n);
    return {require_valid(oracle::dc_table(alg, c)), default_choices(alg, level)};
}

double gap(const CMatrix& a, const CMatrix& b) { return op_norm(a - b); }

}  // namespace

TEST_CASE("default choices") {
    const NestAlgebra t5 = NestAlgebra::triangular(5);
    CHECK(default_level(t5) == 3);
    const ConstructionChoices c = default_choices(t5);
    CHECK(c.level == 3);
    CHECK(c.xi0 == basis_vector(5, 3));
    CHECK(c.eta1 == basis_vector(5, 0));
    CHECK(default_level(NestAlgebra::triangular(2)) == 1);
    CHECK(default_level(NestAlgebra(6, {1, 5, 6})) >= 1);
    CHECK_THROWS_AS(default_choices(NestAlgebra::full(3)), Error);
}

TEST_CASE("choices are checked") {
    const NestAlgebra t3 = NestAlgebra::triangular(3);
    const DerivationTable z = DerivationTable::zero(t3);
    CHECK_THROWS_AS(choices_from_indices(t3, 1, 0, 0), Error);  // xi0 in p
    CHECK_THROWS_AS(choices_from_indices(t3, 1, 1, 2), Error);  // eta1 outside p
    CHECK_THROWS_AS(choices_from_indices(t3, 3, 1, 0), Error);  // p = I
    ConstructionChoices bad = default_choices(t3, 1);
    bad.xi0 *= 2.0;
    CHECK_THROWS_AS(build_b1(z, bad), Error);
    bad = default_choices(t3, 1);
    bad.xi0 = CVector::Zero(4);
    CHECK_THROWS_AS(build_b(z, bad), Error);
}

TEST_CASE("zero table gives zero components") {
    const NestAlgebra t4 = NestAlgebra::triangular(4);
    const DerivationTable z = DerivationTable::zero(t4);
    const ConstructionArtifacts a = build_b(z, default_choices(t4));
    CHECK(a.b1.isZero(0.0));
    CHECK(a.c1.isZero(0.0));
    CHECK(a.c2.isZero(0.0));
    CHECK(a.b.isZero(0.0));
    CHECK(two_projection_b(z, 2).isZero(0.0));
    CHECK(triple_rule_residual(z, default_choices(t4)).max_residual == 0.0);
    VerifyOptions opt;
    opt.generator = CMatrix::Zero(4, 4);
    const VerificationReport r = verify(z, a, opt);
    CHECK(r.residual_full == 0.0);
    CHECK(r.residual_pSp == 0.0);
    CHECK(r.residual_corner == 0.0);
    REQUIRE(r.gauge);
    CHECK(std::abs(r.gauge->lambda) == 0.0);
    CHECK(r.gauge->residual == 0.0);
}

TEST_CASE("hand instance: n=2, c = E10") {
    const CMatrix c = unit_matrix(2, 1, 0);
    const Hand h = hand(2, {{1, 0, 1.0}}, 1);
    CHECK(h.choices.xi0 == basis_vector(2, 1));
    const ConstructionArtifacts a = build_b(h.table, h.choices);
    CHECK(gap(a.b1, c) < kExact);
    CHECK(gap(a.c1, CMatrix::Zero(2, 2)) < kExact);
    CHECK(gap(a.c2, CMatrix::Zero(2, 2)) < kExact);
    CHECK(gap(a.b, c) < kExact);
    CHECK(triple_rule_residual(h.table, h.choices).max_residual < kExact);
    // (I - 2p) delta(p) = E10 and its commutator with p is delta(p)
    const CMatrix b = two_projection_b(h.table, 1);
    CHECK(gap(b, c) < kExact);
    const CMatrix p = h.table.algebra().lattice_projection(1);
    CHECK(gap(commutator(b, p), eval(h.table, p)) < kExact);

    VerifyOptions opt;
    opt.generator = c;
    const VerificationReport r = verify(h.table, a, opt);
    CHECK(r.residual_full < kExact);
    CHECK(std::abs(r.gauge->lambda) < kExact);
    CHECK(r.gauge->residual < kExact);
}

TEST_CASE("hand instance: n=2, c = diag(1,2)") {
    const Hand h = hand(2, {{0, 0, 1.0}, {1, 1, 2.0}}, 1);
    const ConstructionArtifacts a = build_b(h.table, h.choices);
    CHECK(gap(a.b1, -unit_matrix(2, 0, 0)) < kExact);
    CHECK(gap(a.b, -unit_matrix(2, 0, 0)) < kExact);
    VerifyOptions opt;
    opt.generator = diag12();
    const VerificationReport r = verify(h.table, a, opt);
    CHECK(std::abs(r.gauge->lambda - Complex(-2.0)) < kExact);
    CHECK(r.gauge->residual < kExact);
}

TEST_CASE("hand instance: n=2, c = E01") {
    const CMatrix c = unit_matrix(2, 0, 1);
    const Hand h = hand(2, {{0, 1, 1.0}}, 1);
    const ConstructionArtifacts a = build_b(h.table, h.choices);
    CHECK(gap(a.b1, CMatrix::Zero(2, 2)) < kExact);
    CHECK(gap(a.c1, c) < kExact);
    CHECK(gap(a.b, c) < kExact);
    const CMatrix p = h.table.algebra().lattice_projection(1);
    CHECK(gap(eval(h.table, p), -c) < kExact);
    const CMatrix b = two_projection_b(h.table, 1);
    CHECK(gap(b, c) < kExact);
    CHECK(gap(commutator(b, p), -c) < kExact);
}

TEST_CASE("hand instance: n=3, c = E21") {
    const CMatrix c = unit_matrix(3, 2, 1);
    const Hand h = hand(3, {{2, 1, 1.0}}, 1);
    CHECK(h.choices.xi0 == basis_vector(3, 1));
    CHECK(h.choices.eta1 == basis_vector(3, 0));
    const ConstructionArtifacts a = build_b(h.table, h.choices);
    CHECK(gap(a.b1, CMatrix::Zero(3, 3)) < kExact);
    CHECK(gap(a.c1, CMatrix::Zero(3, 3)) < kExact);
    CHECK(gap(a.c2, c) < kExact);
    CHECK(gap(a.b, c) < kExact);
}

TEST_CASE("rule residual under hand corruptions") {
    const Hand h = hand(2, {{1, 0, 1.0}}, 1);
    const double eps = 1e-3;
    // a corruption along E11 enters both sides equally and cancels
    const DerivationTable same = h.table.with_value({0, 1}, h.table.value(0, 1) + eps * unit_matrix(2, 1, 1));
    CHECK(triple_rule_residual(same, h.choices).max_residual < kExact);
    CHECK(oracle::naive_rule(same, 1, h.choices.xi0, h.choices.eta1) < kExact);
    // along E10 it only reaches the left side
    const DerivationTable off = h.table.with_value({0, 1}, h.table.value(0, 1) + eps * unit_matrix(2, 1, 0));
    CHECK(std::abs(triple_rule_residual(off, h.choices).max_residual - eps) < kExact);
    CHECK(std::abs(oracle::naive_rule(off, 1, h.choices.xi0, h.choices.eta1) - eps) < kExact);
}

TEST_CASE("construction matches the naive formulas") {
    Rng rng(31);
    for (int t = 0; t < 12; ++t) {
        const Index n = 2 + t % 6;
        const NestAlgebra alg = NestAlgebra::triangular(n);
        const DerivationTable table = inner_from(alg, rng.gaussian_matrix(n, n));
        for (Index level : alg.interior_levels()) {
            const Index d = alg.invariant_dim(level);
            // xi0 and eta1 anywhere in p^perp and p
            ConstructionChoices ch{level, CVector::Zero(n), CVector::Zero(n)};
            ch.xi0.tail(n - d) = rng.unit_vector(n - d);
            ch.eta1.head(d) = rng.unit_vector(d);
            const ConstructionArtifacts a = build_b(table, ch);
            const oracle::Naive ref = oracle::naive_build(table, d, ch.xi0, ch.eta1);
            CHECK(gap(a.b1, ref.b1) < 1e-12);
            CHECK(gap(a.c1, ref.c1) < 1e-12);
            CHECK(gap(a.c2, ref.c2) < 1e-12);
            CHECK(gap(a.b, ref.b) < 1e-12);
            CHECK(std::abs(triple_rule_residual(table, ch).max_residual -
                           oracle::naive_rule(table, d, ch.xi0, ch.eta1)) < 1e-11);
        }
    }
}

TEST_CASE("artifact block structure") {
    Rng rng(32);
    const NestAlgebra alg(7, {2, 3, 5, 7});
    const DerivationTable table = inner_from(alg, rng.gaussian_matrix(7, 7));
    for (Index level : alg.interior_levels()) {
        const ConstructionArtifacts a = build_b(table, default_choices(alg, level));
        const CMatrix p = alg.lattice_projection(level);
        const CMatrix pp = CMatrix::Identity(7, 7) - p;
        CHECK(op_norm(a.b1 * pp) < 1e-14);
        CHECK(op_norm(a.c1 - p * a.c1 * pp) < 1e-14);
        CHECK(op_norm(a.b2 - a.b1 - a.c1) < 1e-14);
        CHECK(op_norm(a.c2 * p) < 1e-14);
        CHECK(op_norm(p * a.c2 * pp) < 1e-14);
        CHECK(op_norm(a.b - a.b2 - a.c2) < 1e-14);

        const ConstructionArtifacts back = decompose(alg, a.b, a.choices);
        CHECK(op_norm(back.b1 - a.b1) < 1e-14);
        CHECK(op_norm(back.c1 - a.c1) < 1e-14);
        CHECK(op_norm(back.c2 - a.c2) < 1e-14);
    }
}

TEST_CASE("implementation on random inner tables, general chains") {
    Rng rng(33);
    const std::vector<NestAlgebra> algs{NestAlgebra::triangular(6), NestAlgebra(6, {3, 6}),
                                        NestAlgebra(8, {1, 4, 5, 8}), NestAlgebra(5, {2, 3, 5})};
    for (const NestAlgebra& alg : algs) {
        const Index n = alg.dim();
        const CMatrix c = rng.gaussian_matrix(n, n);
        const DerivationTable table = inner_from(alg, c);
        VerifyOptions opt;
        opt.tol = default_tolerance(table);
        opt.generator = c;
        opt.seed = 5;
        for (Index level : alg.interior_levels()) {
            const ConstructionArtifacts a = build_b(table, default_choices(alg, level));
            const VerificationReport r = verify(table, a, opt);
            CHECK(r.pass.thm11);
            CHECK(r.pass.thm12);
            CHECK(r.pass.thm13);
            CHECK(r.gauge->residual <= opt.tol);
            CHECK(r.norm_b1 <= *r.delta_norm.upper + opt.tol);
            CHECK(r.norm_b <= 4.0 * *r.delta_norm.upper + opt.tol);
            // b2 implements delta on p itself
            const CMatrix p = alg.lattice_projection(level);
            CHECK(op_norm(eval(table, p) - commutator(a.b2, p)) <= opt.tol);
            // two-projection implementer
            const CMatrix tb = two_projection_b(table, level);
            CHECK(op_norm(eval(table, p) - commutator(tb, p)) <= 1e-10);
        }
    }
}

TEST_CASE("c2 does not depend on the basis of p^perp") {
    Rng rng(34);
    for (int t = 0; t < 6; ++t) {
        const Index n = 3 + t;
        const NestAlgebra alg = NestAlgebra::triangular(n);
        const DerivationTable table = inner_from(alg, rng.gaussian_matrix(n, n));
        const ConstructionChoices ch = default_choices(alg, 1);
        const Index d = alg.invariant_dim(1);
        const CMatrix std_c2 = build_c2(table, ch);
        for (int r = 0; r < 3; ++r) {
            CMatrix basis = CMatrix::Zero(n, n - d);
            basis.bottomRows(n - d) = rng.unitary(n - d);
            CHECK(op_norm(build_c2(table, ch, basis) - std_c2) < 1e-10);
        }
        CMatrix not_orth = CMatrix::Zero(n, n - d);
        not_orth.bottomRows(n - d) = 2.0 * CMatrix::Identity(n - d, n - d);
        CHECK_THROWS_AS(build_c2(table, ch, not_orth), Error);
    }
}

TEST_CASE("different choices give implementers that differ by a scalar") {
    Rng rng(35);
    const NestAlgebra alg = NestAlgebra::triangular(6);
    const DerivationTable table = inner_from(alg, rng.gaussian_matrix(6, 6));
    const CMatrix ref = build_b(table, default_choices(alg, 3)).b;
    for (Index level : alg.interior_levels()) {
        const Index d = alg.invariant_dim(level);
        ConstructionChoices ch{level, CVector::Zero(6), CVector::Zero(6)};
        ch.xi0.tail(6 - d) = rng.unit_vector(6 - d);
        ch.eta1.head(d) = rng.unit_vector(d);
        const ScalarPart s = scalar_identity_part(build_b(table, ch).b - ref);
        CHECK(s.residual < 1e-9);
    }
}

TEST_CASE("corrupting a pSp-perp value trips the rule and the full residual together") {
    Rng rng(36);
    const NestAlgebra alg = NestAlgebra::triangular(5);
    const CMatrix c = rng.gaussian_matrix(5, 5);
    const DerivationTable table = inner_from(alg, c);
    const ConstructionChoices ch = default_choices(alg, 2);  // d = 2, xi0 = e2, eta1 = e0
    // (1, 4) is outside everything the construction reads
    const DerivationTable bad = table.with_value({1, 4}, table.value(1, 4) + 1e-3 * rng.unitary(5));
    VerifyOptions opt;
    opt.tol = default_tolerance(table);
    const VerificationReport r = verify(bad, build_b(bad, ch), opt);
    CHECK(r.rule.max_residual > 1e-4);
    CHECK(r.residual_full > 1e-4);
    CHECK(r.rule.max_residual == doctest::Approx(r.residual_full).epsilon(0.5));
    CHECK(r.residual_pSp <= opt.tol);
    CHECK(r.residual_corner <= opt.tol);
    CHECK(r.pass.thm11);
    CHECK(r.pass.thm12);
    CHECK_FALSE(r.pass.thm13);
}

TEST_CASE("rule residual layout") {
    Rng rng(37);
    const NestAlgebra alg = NestAlgebra::triangular(5);
    const DerivationTable table = inner_from(alg, rng.gaussian_matrix(5, 5));
    const RuleResidual r = triple_rule_residual(table, default_choices(alg, 2));
    CHECK(r.residuals.rows() == 3);
    CHECK(r.residuals.cols() == 2);
    CHECK(r.max_residual == r.residuals.maxCoeff());
}

TEST_CASE("verify rejects mismatched artifacts") {
    const NestAlgebra t3 = NestAlgebra::triangular(3);
    const DerivationTable z = DerivationTable::zero(t3);
    ConstructionArtifacts a = build_b(z, default_choices(t3));
    a.b = CMatrix::Zero(4, 4);
    CHECK_THROWS_AS(verify(z, a, VerifyOptions{}), Error);
    CHECK_THROWS_AS(two_projection_b(z, 0), Error);
    CHECK_THROWS_AS(two_projection_b(z, 4), Error);
}
