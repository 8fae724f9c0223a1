#include "doctest.h"
#include "oracles.hpp"

#include "nestderiv/error.hpp"
#include "nestderiv/linalg.hpp"
#include "nestderiv/random.hpp"

#include <cmath>

using namespace nestderiv;

namespace {
const Complex I1(0.0, 1.0);
}

TEST_CASE("rank_one of standard vectors is a matrix unit") {
    const CMatrix m = rank_one(basis_vector(2, 1), basis_vector(2, 0));
    CHECK(m == unit_matrix(2, 0, 1));
}

TEST_CASE("rank_one with zero xi vanishes") {
    const CMatrix m = rank_one(CVector::Zero(3), basis_vector(3, 2));
    CHECK(m.isZero(0.0));
}

TEST_CASE("rank_one applies <zeta, xi> eta") {
    CVector xi(2);
    xi << 1.0, I1;
    xi /= std::sqrt(2.0);
    const CMatrix m = rank_one(xi, basis_vector(2, 0));
    const CVector out = m * basis_vector(2, 0);
    CHECK(std::abs(out(0) - Complex(1.0 / std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(out(1)) < 1e-15);
    // <e2, xi> = conj(xi_2) = -i/sqrt2
    CHECK(std::abs(m(0, 1) - (-I1 / std::sqrt(2.0))) < 1e-15);
    CHECK(std::abs(inner(basis_vector(2, 1), xi) - std::conj(xi(1))) < 1e-15);
}

TEST_CASE("rank_one rejects mismatched sizes") {
    CHECK_THROWS_AS(rank_one(CVector::Zero(2), CVector::Zero(3)), Error);
}

TEST_CASE("op_norm examples") {
    CHECK(op_norm(unit_matrix(2, 1, 0)) == doctest::Approx(1.0).epsilon(1e-15));
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 4.0 * I1;
    CHECK(op_norm(d) == doctest::Approx(4.0).epsilon(1e-14));
    CMatrix j(2, 2);
    j << 1.0, 1.0, 0.0, 1.0;
    const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
    CHECK(std::abs(op_norm(j) - golden) < 1e-14);
    CHECK(std::abs(oracle::norm_upper2(1.0, 1.0, 1.0) - golden) < 1e-14);
}

TEST_CASE("op_norm agrees with power iteration") {
    Rng rng(11);
    for (int t = 0; t < 10; ++t) {
        const CMatrix a = rng.gaussian_matrix(5, 5);
        CHECK(std::abs(op_norm(a) - oracle::power_norm(a)) < 1e-8 * op_norm(a));
    }
}

TEST_CASE("scalar_identity_part examples") {
    ScalarPart s = scalar_identity_part(3.0 * CMatrix::Identity(4, 4));
    CHECK(std::abs(s.lambda - Complex(3.0)) < 1e-15);
    CHECK(s.residual == 0.0);
    s = scalar_identity_part(CMatrix::Zero(3, 3));
    CHECK(std::abs(s.lambda) == 0.0);
    CHECK(s.residual == 0.0);
    CMatrix d = CMatrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 2.0;
    s = scalar_identity_part(d);
    CHECK(std::abs(s.lambda - Complex(1.5)) < 1e-15);
    CHECK(s.residual == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("adjoint is an involution") {
    Rng rng(2);
    const CMatrix a = rng.gaussian_matrix(4, 4);
    const CMatrix back = a.adjoint().adjoint();
    CHECK(back == a);
}

TEST_CASE("rank_one composition rule") {
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const Index n = 2 + t % 5;
        const CVector xi1 = rng.unit_vector(n);
        const CVector xi2 = rng.unit_vector(n);
        const CVector eta = rng.unit_vector(n);
        const CMatrix lhs = rank_one(eta, xi2) * rank_one(xi1, eta);
        CHECK(op_norm(lhs - rank_one(xi1, xi2)) < 1e-12);
    }
}

TEST_CASE("adjoint of a rank-one operator swaps the factors") {
    Rng rng(4);
    for (int t = 0; t < 20; ++t) {
        const CVector xi = rng.unit_vector(4);
        const CVector eta = rng.unit_vector(4);
        CHECK(op_norm(rank_one(xi, eta).adjoint() - rank_one(eta, xi)) < 1e-14);
    }
}

TEST_CASE("op_norm is submultiplicative and unitarily invariant") {
    Rng rng(5);
    for (int t = 0; t < 20; ++t) {
        const Index n = 2 + t % 6;
        const CMatrix a = rng.gaussian_matrix(n, n);
        const CMatrix b = rng.gaussian_matrix(n, n);
        const CMatrix u = rng.unitary(n);
        const CMatrix v = rng.unitary(n);
        CHECK(op_norm(a * b) <= op_norm(a) * op_norm(b) + 1e-9);
        CHECK(std::abs(op_norm(u * a * v) - op_norm(a)) < 1e-9);
        CHECK(op_norm(u.adjoint() * u - CMatrix::Identity(n, n)) < 1e-12);
    }
}

TEST_CASE("commutator and helpers") {
    const CMatrix e01 = unit_matrix(2, 0, 1);
    const CMatrix e10 = unit_matrix(2, 1, 0);
    // [E01, E10] = E00 - E11
    CMatrix expect = CMatrix::Zero(2, 2);
    expect(0, 0) = 1.0;
    expect(1, 1) = -1.0;
    CHECK(commutator(e01, e10) == expect);
    const CMatrix p = coordinate_projection(4, 1, 3);
    CHECK(is_projection(p, 1e-12));
    CHECK_FALSE(is_projection(e01, 1e-12));
    CMatrix bad = CMatrix::Zero(2, 2);
    bad(0, 0) = std::nan("");
    CHECK_FALSE(all_finite(bad));
    CHECK(scaled_tol(1e-9, 0.5) == 1e-9);
    CHECK(scaled_tol(1e-9, 10.0) == doctest::Approx(1e-8));
}
