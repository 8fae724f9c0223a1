#include "nestderiv/derivation.hpp"

#include "nestderiv/error.hpp"
#include "nestderiv/random.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nestderiv {

namespace {

constexpr std::size_t kMaxReportedFailures = 32;

std::string unit_name(Index i, Index j) {
    return "E(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

}  // namespace

DerivationTable::DerivationTable(NestAlgebra alg, std::vector<CMatrix> values, double tol)
    : alg_(std::move(alg)), units_(alg_.basis_units()), values_(std::move(values)), tol_(tol) {
    if (values_.size() != units_.size()) {
        throw Error(ErrorCode::missing_entry,
                    "derivation table needs " + std::to_string(units_.size()) + " values, got " +
                        std::to_string(values_.size()));
    }
    if (!(tol_ > 0.0) || !std::isfinite(tol_)) {
        throw Error(ErrorCode::invalid_argument, "derivation tolerance must be positive and finite");
    }
    const Index n = alg_.dim();
    for (std::size_t t = 0; t < values_.size(); ++t) {
        if (values_[t].rows() != n || values_[t].cols() != n) {
            throw Error(ErrorCode::dimension_mismatch,
                        "value for " + unit_name(units_[t].i, units_[t].j) + " is not n x n");
        }
        if (!all_finite(values_[t])) {
            throw Error(ErrorCode::invalid_argument,
                        "value for " + unit_name(units_[t].i, units_[t].j) + " is not finite");
        }
    }
    lookup_.assign(static_cast<std::size_t>(n * n), -1);
    for (std::size_t t = 0; t < units_.size(); ++t) {
        lookup_[static_cast<std::size_t>(units_[t].i * n + units_[t].j)] = static_cast<Index>(t);
    }
}

DerivationTable DerivationTable::from_entries(NestAlgebra alg, const std::map<MatrixUnit, CMatrix>& entries,
                                              double tol) {
    const auto units = alg.basis_units();
    for (const auto& [u, value] : entries) {
        if (u.i < 0 || u.j < 0 || u.i >= alg.dim() || u.j >= alg.dim() || !alg.admissible(u.i, u.j)) {
            throw Error(ErrorCode::invalid_argument,
                        "entry " + unit_name(u.i, u.j) + " is not a basis unit of the algebra");
        }
    }
    std::vector<CMatrix> values;
    values.reserve(units.size());
    for (const MatrixUnit& u : units) {
        auto it = entries.find(u);
        if (it == entries.end()) {
            throw Error(ErrorCode::missing_entry, "missing basis entry " + unit_name(u.i, u.j));
        }
        values.push_back(it->second);
    }
    return DerivationTable(std::move(alg), std::move(values), tol);
}

DerivationTable DerivationTable::zero(NestAlgebra alg, double tol) {
    const Index n = alg.dim();
    std::vector<CMatrix> values(alg.basis_units().size(), CMatrix::Zero(n, n));
    DerivationTable table(std::move(alg), std::move(values), tol);
    table.validated_ = true;
    return table;
}

Index DerivationTable::position(Index i, Index j) const {
    const Index n = alg_.dim();
    if (i < 0 || j < 0 || i >= n || j >= n) {
        throw Error(ErrorCode::invalid_argument, "unit " + unit_name(i, j) + " out of range");
    }
    const Index pos = lookup_[static_cast<std::size_t>(i * n + j)];
    if (pos < 0) {
        throw Error(ErrorCode::outside_algebra, "unit " + unit_name(i, j) + " is not in the algebra");
    }
    return pos;
}

const CMatrix& DerivationTable::value(Index i, Index j) const {
    return values_[static_cast<std::size_t>(position(i, j))];
}

DerivationTable DerivationTable::with_value(const MatrixUnit& u, CMatrix value) const {
    std::vector<CMatrix> values = values_;
    values[static_cast<std::size_t>(position(u.i, u.j))] = std::move(value);
    return DerivationTable(alg_, std::move(values), tol_);
}

double DerivationTable::max_value_norm() const {
    double m = 0.0;
    for (const CMatrix& v : values_) m = std::max(m, op_norm(v));
    return m;
}

ValidationReport validate(const DerivationTable& table) {
    ValidationReport report;
    const Index n = table.dim();
    const auto& units = table.units();
    report.tol = scaled_tol(table.tol(), table.max_value_norm());

    CMatrix r(n, n);
    for (const MatrixUnit& u : units) {
        const CMatrix& du = table.value(u);
        for (const MatrixUnit& v : units) {
            const CMatrix& dv = table.value(v);
            // r = [j == k] delta(E_il) - delta(E_ij) E_kl - E_ij delta(E_kl)
            if (u.j == v.i) {
                r = table.value(u.i, v.j);
            } else {
                r.setZero();
            }
            r.col(v.j) -= du.col(v.i);
            r.row(u.i) -= dv.row(u.j);
            ++report.pairs_checked;

            // op_norm <= frobenius, so the SVD is only needed when the pair
            // could set a new maximum or fail.
            const double frob = r.norm();
            if (frob <= std::min(report.tol, report.max_residual)) continue;
            const double res = op_norm(r);
            report.max_residual = std::max(report.max_residual, res);
            if (res > report.tol) {
                ++report.failure_count;
                if (report.failures.size() < kMaxReportedFailures) report.failures.push_back({u, v, res});
            }
        }
    }
    report.valid = report.failure_count == 0;
    return report;
}

DerivationTable require_valid(DerivationTable table) {
    const ValidationReport report = validate(table);
    if (!report.valid) {
        throw Error(ErrorCode::invalid_derivation,
                    "table violates the product rule: max residual " + std::to_string(report.max_residual) +
                        " over " + std::to_string(report.failure_count) + " pair(s)");
    }
    table.validated_ = true;
    return table;
}

DerivationTable inner_from(const NestAlgebra& alg, const CMatrix& c, double tol) {
    const Index n = alg.dim();
    if (c.rows() != n || c.cols() != n) {
        throw Error(ErrorCode::dimension_mismatch, "inner_from: generator is not n x n");
    }
    std::vector<CMatrix> values;
    for (const MatrixUnit& u : alg.basis_units()) {
        // c E_ij - E_ij c: column i of c moved to column j, minus row j of c moved to row i.
        CMatrix v = CMatrix::Zero(n, n);
        v.col(u.j) += c.col(u.i);
        v.row(u.i) -= c.row(u.j);
        values.push_back(std::move(v));
    }
    DerivationTable table(alg, std::move(values), tol);
    table.validated_ = true;
    return table;
}

CMatrix eval(const DerivationTable& table, const CMatrix& a) {
    const NestAlgebra& alg = table.algebra();
    const Index n = alg.dim();
    if (a.rows() != n || a.cols() != n) {
        throw Error(ErrorCode::dimension_mismatch, "eval: argument is not n x n");
    }
    double scale = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) scale = std::max(scale, std::abs(a(i, j)));
    if (!alg.contains(a, scaled_tol(table.tol(), scale))) {
        throw Error(ErrorCode::outside_algebra, "derivation undefined outside S");
    }
    CMatrix out = CMatrix::Zero(n, n);
    const auto& units = table.units();
    const auto& values = table.values();
    for (std::size_t t = 0; t < units.size(); ++t) {
        const Complex coeff = a(units[t].i, units[t].j);
        if (coeff != Complex(0.0)) out += coeff * values[t];
    }
    return out;
}

namespace {

// Golden-section search for the minimum of a convex function on [lo, hi].
template <typename F>
std::pair<double, double> golden_section(F&& f, double lo, double hi, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = f(x1);
    double f2 = f(x2);
    while (hi - lo > tol) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
    }
    return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

ScalarDistance distance_to_scalars(const CMatrix& c, double tol) {
    if (c.rows() != c.cols()) {
        throw Error(ErrorCode::dimension_mismatch, "distance_to_scalars: matrix is not square");
    }
    const Index n = c.rows();
    if (n == 0) return {};
    auto f = [&](Complex lambda) {
        CMatrix shifted = c;
        shifted.diagonal().array() -= lambda;
        return op_norm(shifted);
    };

    // f(lambda) >= |lambda - center| - f(center), so every point at least as
    // good as the center lies in the square of half-width 2 f(center).
    const Complex center = c.trace() / static_cast<double>(n);
    const double start = f(center);
    if (start == 0.0) return {center, 0.0};
    const double reach = 2.0 * start;
    const double step_tol = tol * (1.0 + start);

    // Minimizing a jointly convex function over the imaginary part leaves a
    // convex function of the real part, so nested golden sections converge.
    double inner_best_y = 0.0;
    auto over_imag = [&](double x) {
        auto line = [&](double y) { return f(Complex(x, y)); };
        const auto [y, val] = golden_section(line, center.imag() - reach, center.imag() + reach, step_tol);
        inner_best_y = y;
        return val;
    };
    const auto [x, val] = golden_section(over_imag, center.real() - reach, center.real() + reach, step_tol);
    over_imag(x);
    ScalarDistance out{Complex(x, inner_best_y), val};
    if (start < out.distance) out = {center, start};
    return out;
}

namespace {

CMatrix random_member(const NestAlgebra& alg, Rng& rng) {
    CMatrix a = rng.gaussian_matrix(alg.dim(), alg.dim());
    for (Index i = 0; i < alg.dim(); ++i)
        for (Index j = 0; j < alg.dim(); ++j)
            if (!alg.admissible(i, j)) a(i, j) = 0.0;
    return a;
}

}  // namespace

NormEstimate norm_estimate(const DerivationTable& table, int samples, std::uint64_t seed,
                           const std::optional<CMatrix>& generator) {
    if (samples < 1) throw Error(ErrorCode::invalid_argument, "norm_estimate: samples must be >= 1");
    const NestAlgebra& alg = table.algebra();
    const Index n = alg.dim();
    NormEstimate est;

    // Basis units have unit operator norm.
    CMatrix best_a = CMatrix::Zero(n, n);
    double best = -1.0;
    for (const MatrixUnit& u : table.units()) {
        const double v = op_norm(table.value(u));
        if (v > best) {
            best = v;
            best_a = unit_matrix(n, u.i, u.j);
        }
    }

    Rng rng(seed);
    auto value_at = [&](const CMatrix& a) { return op_norm(eval(table, a)); };
    for (int s = 0; s < samples; ++s) {
        CMatrix a = random_member(alg, rng);
        a /= op_norm(a);
        const double v = value_at(a);
        if (v > best) {
            best = v;
            best_a = a;
        }
    }

    double step = 0.5;
    for (int it = 0; it < 4 * samples && step > 1e-6; ++it) {
        CMatrix dir = random_member(alg, rng);
        CMatrix trial = best_a + step * dir / op_norm(dir);
        const double norm = op_norm(trial);
        if (norm == 0.0) continue;
        trial /= norm;
        const double v = value_at(trial);
        if (v > best) {
            best = v;
            best_a = trial;
        } else if (it % 8 == 7) {
            step *= 0.5;
        }
    }
    est.lower = std::max(best, 0.0);

    if (generator) {
        const ScalarDistance dist = distance_to_scalars(*generator);
        est.upper = 2.0 * dist.distance;
        est.upper_lambda = dist.lambda;
    }
    return est;
}

}  // namespace nestderiv
