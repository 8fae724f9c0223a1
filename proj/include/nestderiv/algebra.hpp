#pragma once

#include "nestderiv/linalg.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace nestderiv {

/// Position (i, j) of a matrix unit E_ij, 0-based.
struct MatrixUnit {
    Index i = 0;
    Index j = 0;

    auto operator<=>(const MatrixUnit&) const = default;
};

/// Finite-dimensional nest algebra: all n x n matrices leaving invariant the
/// coordinate subspaces span(e_0, ..., e_{d_k - 1}) for each d_k in the chain.
///
/// The chain d_1 < ... < d_m = n lists the nonzero invariant dimensions, so
/// chain levels are 1-based: level k has projection onto the first d_k
/// coordinates and level m is the identity. The chain (1, 2, ..., n) gives the
/// upper-triangular algebra T_n (the maximal triangular model); the chain (n)
/// gives all of M_n.
class NestAlgebra {
public:
    NestAlgebra(Index n, std::vector<Index> chain);

    static NestAlgebra triangular(Index n);
    static NestAlgebra full(Index n);

    Index dim() const { return n_; }
    const std::vector<Index>& chain() const { return chain_; }
    Index levels() const { return static_cast<Index>(chain_.size()); }
    bool is_maximal_triangular() const;

    /// d_k for level k in 1..m.
    Index invariant_dim(Index level) const;

    /// Levels k with 0 < d_k < n.
    std::vector<Index> interior_levels() const;

    /// Index of the least chain segment containing coordinate r.
    Index block_of(Index r) const { return block_[static_cast<std::size_t>(r)]; }

    bool admissible(Index i, Index j) const { return block_of(i) <= block_of(j); }

    /// True iff every entry below the block-upper-triangular pattern has
    /// modulus at most tol.
    bool contains(const CMatrix& a, double tol) const;

    CMatrix lattice_projection(Index level) const;

    /// All admissible units, lexicographic in (i, j).
    std::vector<MatrixUnit> basis_units() const;

    bool operator==(const NestAlgebra& other) const {
        return n_ == other.n_ && chain_ == other.chain_;
    }

private:
    Index n_;
    std::vector<Index> chain_;
    std::vector<Index> block_;
};

struct StructureReport {
    long assertions = 0;
    long failures = 0;
    std::vector<std::string> messages;

    bool passed() const { return failures == 0 && assertions > 0; }
};

/// Randomized checks of the structural facts the construction relies on:
///  - p B(H) p^perp is contained in the algebra for every chain projection p;
///  - for unit xi in p^perp and each basis vector eta of p, xi (x) eta lies in
///    the algebra and maps xi to eta, so the orbit of xi covers range(p);
///  - lattice projections are self-adjoint members, nested, and
///    p^perp a p = 0 for every member a;
///  - the commutant of the algebra is the scalars.
StructureReport check_structure(const NestAlgebra& alg, int trials, std::uint64_t seed,
                                double tol = 1e-9);

}  // namespace nestderiv
