#include "nestderiv/json_io.hpp"

#include "nestderiv/error.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

namespace nestderiv {

namespace {

template <typename F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::format, std::string(what) + ": " + e.what());
    }
}

Complex complex_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw Error(ErrorCode::format, "complex value must be [re, im]");
    }
    const double re = j[0].get<double>();
    const double im = j[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) throw Error(ErrorCode::format, "non-finite matrix entry");
    return {re, im};
}

Json vector_to_json(const CVector& v) {
    Json arr = Json::array();
    for (Index i = 0; i < v.size(); ++i) arr.push_back(complex_to_json(v(i)));
    return arr;
}

CVector vector_from_json(const Json& j) {
    if (!j.is_array()) throw Error(ErrorCode::format, "vector must be an array of [re, im]");
    CVector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
    return v;
}

Json nullable(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json to_json(const CMatrix& m) {
    Json data = Json::array();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) data.push_back(complex_to_json(m(i, j)));
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

CMatrix matrix_from_json(const Json& j) {
    return guarded("matrix", [&] {
        const auto rows = j.at("rows").get<long long>();
        const auto cols = j.at("cols").get<long long>();
        const Json& data = j.at("data");
        if (rows < 0 || cols < 0 || !data.is_array() ||
            data.size() != static_cast<std::size_t>(rows * cols)) {
            throw Error(ErrorCode::format, "matrix: data length does not match rows * cols");
        }
        CMatrix m(rows, cols);
        std::size_t t = 0;
        for (Index r = 0; r < rows; ++r)
            for (Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(data[t++]);
        return m;
    });
}

Json to_json(const NestAlgebra& alg) { return {{"n", alg.dim()}, {"chain", alg.chain()}}; }

NestAlgebra algebra_from_json(const Json& j) {
    return guarded("algebra", [&] {
        const auto n = j.at("n").get<Index>();
        auto chain = j.at("chain").get<std::vector<Index>>();
        return NestAlgebra(n, std::move(chain));
    });
}

Json to_json(const DerivationTable& table) {
    Json entries = Json::array();
    for (std::size_t t = 0; t < table.units().size(); ++t) {
        const MatrixUnit& u = table.units()[t];
        entries.push_back({{"i", u.i}, {"j", u.j}, {"value", to_json(table.values()[t])}});
    }
    return {{"algebra", to_json(table.algebra())}, {"entries", std::move(entries)}, {"tol", table.tol()}};
}

DerivationTable table_from_json(const Json& j) {
    return guarded("derivation", [&] {
        NestAlgebra alg = algebra_from_json(j.at("algebra"));
        std::map<MatrixUnit, CMatrix> entries;
        for (const Json& e : j.at("entries")) {
            MatrixUnit u{e.at("i").get<Index>(), e.at("j").get<Index>()};
            if (!entries.emplace(u, matrix_from_json(e.at("value"))).second) {
                throw Error(ErrorCode::format,
                            "duplicate entry (" + std::to_string(u.i) + "," + std::to_string(u.j) + ")");
            }
        }
        const double tol = j.contains("tol") ? j.at("tol").get<double>() : 1e-9;
        return DerivationTable::from_entries(std::move(alg), entries, tol);
    });
}

Json to_json(const ValidationReport& report) {
    Json failures = Json::array();
    for (const RuleViolation& f : report.failures) {
        failures.push_back({{"left", {f.left.i, f.left.j}}, {"right", {f.right.i, f.right.j}},
                            {"residual", f.residual}});
    }
    return {{"valid", report.valid},
            {"max_residual", report.max_residual},
            {"tol", report.tol},
            {"pairs_checked", report.pairs_checked},
            {"failure_count", report.failure_count},
            {"failures", std::move(failures)}};
}

Json to_json(const StructureReport& report) {
    return {{"assertions", report.assertions},
            {"failures", report.failures},
            {"passed", report.passed()},
            {"messages", report.messages}};
}

Json to_json(const ConstructionChoices& choices) {
    return {{"k", choices.level}, {"xi0", vector_to_json(choices.xi0)}, {"eta1", vector_to_json(choices.eta1)}};
}

ConstructionChoices choices_from_json(const Json& j) {
    return guarded("choices", [&] {
        return ConstructionChoices{j.at("k").get<Index>(), vector_from_json(j.at("xi0")),
                                   vector_from_json(j.at("eta1"))};
    });
}

Json to_json(const ConstructionArtifacts& a) {
    return {{"choices", to_json(a.choices)}, {"b1", to_json(a.b1)}, {"c1", to_json(a.c1)},
            {"b2", to_json(a.b2)},           {"c2", to_json(a.c2)}, {"b", to_json(a.b)}};
}

ConstructionArtifacts artifacts_from_json(const Json& j) {
    return guarded("artifacts", [&] {
        ConstructionArtifacts a;
        a.choices = choices_from_json(j.at("choices"));
        a.b1 = matrix_from_json(j.at("b1"));
        a.c1 = matrix_from_json(j.at("c1"));
        a.b2 = matrix_from_json(j.at("b2"));
        a.c2 = matrix_from_json(j.at("c2"));
        a.b = matrix_from_json(j.at("b"));
        return a;
    });
}

Json to_json(const VerificationReport& r) {
    Json gauge = nullptr;
    if (r.gauge) gauge = {{"lambda", complex_to_json(r.gauge->lambda)}, {"residual", r.gauge->residual}};
    return {{"residual_pSp", r.residual_pSp},
            {"residual_corner", r.residual_corner},
            {"residual_full", r.residual_full},
            {"rule_max", r.rule.max_residual},
            {"norms",
             {{"b1", r.norm_b1},
              {"b2", r.norm_b2},
              {"b", r.norm_b},
              {"delta_lower", r.delta_norm.lower},
              {"delta_upper", nullable(r.delta_norm.upper)}}},
            {"gauge", std::move(gauge)},
            {"pass", {{"thm11", r.pass.thm11}, {"thm12", r.pass.thm12}, {"thm13", r.pass.thm13}}}};
}

Json to_json(const ChainFamily& family) {
    Json out = Json::array();
    for (const ChainMember& m : family.members) {
        Json lambdas = Json::array();
        for (const ConsistencyScalar& s : m.lambdas) {
            lambdas.push_back({{"beta", s.beta}, {"value", complex_to_json(s.value)}, {"residual", s.residual}});
        }
        out.push_back({{"k", m.level}, {"b", to_json(m.b)}, {"lambdas", std::move(lambdas)}});
    }
    return out;
}

Json to_json(const StabilizationReport& r) {
    return {{"k", r.level},
            {"b", to_json(r.b)},
            {"implements_residual", r.implements_residual},
            {"gauge_vs_construct",
             {{"lambda", complex_to_json(r.gauge_vs_construct.lambda)},
              {"residual", r.gauge_vs_construct.residual}}}};
}

Json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::format, path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw Error(ErrorCode::io, "cannot write " + tmp.string());
        out << j.dump(2) << '\n';
        if (!out) throw Error(ErrorCode::io, "write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error(ErrorCode::io, "cannot move output into place at " + path.string());
    }
}

}  // namespace nestderiv
