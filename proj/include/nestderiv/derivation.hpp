#pragma once

#include "nestderiv/algebra.hpp"
#include "nestderiv/linalg.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace nestderiv {

/// A linear map delta : S -> M_n given by its values on the matrix-unit basis
/// of S. delta is only defined on S; evaluating it elsewhere is an error.
class DerivationTable {
public:
    /// values[t] is delta(E_ij) for the t-th unit of alg.basis_units().
    DerivationTable(NestAlgebra alg, std::vector<CMatrix> values, double tol = 1e-9);

    /// Throws ErrorCode::missing_entry if a basis unit has no value and
    /// ErrorCode::invalid_argument for inadmissible units.
    static DerivationTable from_entries(NestAlgebra alg, const std::map<MatrixUnit, CMatrix>& entries,
                                        double tol = 1e-9);

    static DerivationTable zero(NestAlgebra alg, double tol = 1e-9);

    const NestAlgebra& algebra() const { return alg_; }
    Index dim() const { return alg_.dim(); }
    double tol() const { return tol_; }
    const std::vector<MatrixUnit>& units() const { return units_; }
    const std::vector<CMatrix>& values() const { return values_; }

    const CMatrix& value(Index i, Index j) const;
    const CMatrix& value(const MatrixUnit& u) const { return value(u.i, u.j); }

    /// Set when the table is known to obey the product rule, either because it
    /// was built as a commutator or because validate() accepted it.
    bool validated() const { return validated_; }

    /// Copy with one value replaced; the copy is not marked validated.
    DerivationTable with_value(const MatrixUnit& u, CMatrix value) const;

    /// Largest op-norm among the stored values.
    double max_value_norm() const;

private:
    friend DerivationTable inner_from(const NestAlgebra&, const CMatrix&, double);
    friend DerivationTable require_valid(DerivationTable);

    Index position(Index i, Index j) const;

    NestAlgebra alg_;
    std::vector<MatrixUnit> units_;
    std::vector<CMatrix> values_;
    std::vector<Index> lookup_;  // n*n -> position in units_, or -1
    double tol_;
    bool validated_ = false;
};

struct RuleViolation {
    MatrixUnit left;
    MatrixUnit right;
    double residual = 0.0;
};

struct ValidationReport {
    bool valid = true;
    double max_residual = 0.0;
    double tol = 0.0;  // absolute tolerance actually applied
    long pairs_checked = 0;
    std::vector<RuleViolation> failures;  // capped; see failure_count
    long failure_count = 0;
};

/// Checks the product rule on every ordered pair of basis units:
/// delta(E_ij E_kl) = delta(E_ij) E_kl + E_ij delta(E_kl), where the left side
/// is delta(E_il) when j == k and 0 otherwise. Residuals are operator norms and
/// the tolerance is the table's tol scaled by max(1, largest value norm).
ValidationReport validate(const DerivationTable& table);

/// Returns the table marked validated, or throws ErrorCode::invalid_derivation.
DerivationTable require_valid(DerivationTable table);

/// The inner derivation a -> c a - a c restricted to S.
DerivationTable inner_from(const NestAlgebra& alg, const CMatrix& c, double tol = 1e-9);

/// sum over admissible units of a(i, j) delta(E_ij). Throws
/// ErrorCode::outside_algebra when a is not in S.
CMatrix eval(const DerivationTable& table, const CMatrix& a);

struct ScalarDistance {
    Complex lambda;
    double distance = 0.0;  // ||c - lambda I||
};

/// Minimizes the convex map lambda -> ||c - lambda I|| by nested golden-section
/// searches over the real and imaginary parts, inside the square around
/// trace(c)/n that must contain the minimizer. The result is an upper estimate
/// of the true minimum.
ScalarDistance distance_to_scalars(const CMatrix& c, double tol = 1e-10);

struct NormEstimate {
    double lower = 0.0;
    std::optional<double> upper;
    std::optional<Complex> upper_lambda;
};

/// lower: best ||delta(a)|| over sampled unit-norm a in S (basis units, random
/// members, then a random-walk ascent from the best one).
/// upper: 2 dist(generator, C I) when the generator of an inner table is given.
NormEstimate norm_estimate(const DerivationTable& table, int samples, std::uint64_t seed,
                           const std::optional<CMatrix>& generator = std::nullopt);

}  // namespace nestderiv
