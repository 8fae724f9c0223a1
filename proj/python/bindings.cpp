#include "nestderiv/algebra.hpp"
#include "nestderiv/chain.hpp"
#include "nestderiv/construct.hpp"
#include "nestderiv/derivation.hpp"
#include "nestderiv/error.hpp"
#include "nestderiv/json_io.hpp"
#include "nestderiv/linalg.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace nestderiv;

namespace {

// Reports cross the boundary as JSON strings decoded with Python's json module,
// so Python sees the same schema the CLI writes.
py::object json_to_py(const Json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_nestderiv, m) {
    m.doc() = "Implementing operators for derivations on finite-dimensional nest algebras";

    py::register_exception<Error>(m, "Error", PyExc_ValueError);

    m.def("rank_one", &rank_one, py::arg("xi"), py::arg("eta"),
          "Matrix of xi (x) eta: zeta -> <zeta, xi> eta, i.e. eta xi^H");
    m.def("op_norm", &op_norm, py::arg("a"));
    m.def(
        "scalar_identity_part",
        [](const CMatrix& a) {
            const ScalarPart s = scalar_identity_part(a);
            return py::make_tuple(s.lambda, s.residual);
        },
        py::arg("a"));

    py::class_<NestAlgebra>(m, "NestAlgebra")
        .def(py::init<Index, std::vector<Index>>(), py::arg("n"), py::arg("chain"))
        .def_static("triangular", &NestAlgebra::triangular, py::arg("n"))
        .def_static("full", &NestAlgebra::full, py::arg("n"))
        .def_property_readonly("n", &NestAlgebra::dim)
        .def_property_readonly("chain", &NestAlgebra::chain)
        .def_property_readonly("is_maximal_triangular", &NestAlgebra::is_maximal_triangular)
        .def("contains", &NestAlgebra::contains, py::arg("a"), py::arg("tol") = 1e-9)
        .def("lattice_projection", &NestAlgebra::lattice_projection, py::arg("k"))
        .def("basis_units",
             [](const NestAlgebra& alg) {
                 std::vector<std::pair<Index, Index>> out;
                 for (const MatrixUnit& u : alg.basis_units()) out.emplace_back(u.i, u.j);
                 return out;
             })
        .def(
            "check_structure",
            [](const NestAlgebra& alg, int trials, std::uint64_t seed) {
                return json_to_py(to_json(check_structure(alg, trials, seed)));
            },
            py::arg("trials") = 10, py::arg("seed") = 0);

    py::class_<DerivationTable>(m, "DerivationTable")
        .def_static("inner", &inner_from, py::arg("algebra"), py::arg("c"), py::arg("tol") = 1e-9)
        .def_static("zero", &DerivationTable::zero, py::arg("algebra"), py::arg("tol") = 1e-9)
        .def_static("from_json",
                    [](const std::string& text) { return table_from_json(Json::parse(text)); })
        .def("to_json", [](const DerivationTable& t) { return to_json(t).dump(); })
        .def_property_readonly("algebra", &DerivationTable::algebra)
        .def_property_readonly("tol", &DerivationTable::tol)
        .def("value", [](const DerivationTable& t, Index i, Index j) { return t.value(i, j); })
        .def("with_value",
             [](const DerivationTable& t, Index i, Index j, const CMatrix& v) {
                 return t.with_value({i, j}, v);
             })
        .def("validate", [](const DerivationTable& t) { return json_to_py(to_json(validate(t))); })
        .def("eval", [](const DerivationTable& t, const CMatrix& a) { return eval(t, a); })
        .def(
            "norm_estimate",
            [](const DerivationTable& t, int samples, std::uint64_t seed, std::optional<CMatrix> generator) {
                const NormEstimate e = norm_estimate(t, samples, seed, generator);
                return py::make_tuple(e.lower, e.upper);
            },
            py::arg("samples") = 32, py::arg("seed") = 0, py::arg("generator") = py::none());

    py::class_<ConstructionChoices>(m, "ConstructionChoices")
        .def(py::init([](Index k, const CVector& xi0, const CVector& eta1) {
                 return ConstructionChoices{k, xi0, eta1};
             }),
             py::arg("k"), py::arg("xi0"), py::arg("eta1"))
        .def_readonly("k", &ConstructionChoices::level)
        .def_readonly("xi0", &ConstructionChoices::xi0)
        .def_readonly("eta1", &ConstructionChoices::eta1);

    m.def("default_choices", &default_choices, py::arg("algebra"), py::arg("k") = py::none());
    m.def("build_b1", &build_b1, py::arg("table"), py::arg("choices"));
    m.def("build_c1", &build_c1, py::arg("table"), py::arg("choices"));
    m.def("build_c2", py::overload_cast<const DerivationTable&, const ConstructionChoices&>(&build_c2),
          py::arg("table"), py::arg("choices"));
    m.def("build_c2",
          py::overload_cast<const DerivationTable&, const ConstructionChoices&, const CMatrix&>(&build_c2),
          py::arg("table"), py::arg("choices"), py::arg("complement_basis"));
    m.def(
        "build_b",
        [](const DerivationTable& t, const ConstructionChoices& c) {
            const ConstructionArtifacts a = build_b(t, c);
            py::dict out;
            out["b1"] = a.b1;
            out["c1"] = a.c1;
            out["b2"] = a.b2;
            out["c2"] = a.c2;
            out["b"] = a.b;
            return out;
        },
        py::arg("table"), py::arg("choices"));
    m.def("two_projection_b", &two_projection_b, py::arg("table"), py::arg("k"));
    m.def(
        "triple_rule_residual",
        [](const DerivationTable& t, const ConstructionChoices& c) {
            const RuleResidual r = triple_rule_residual(t, c);
            return py::make_tuple(r.max_residual, r.residuals);
        },
        py::arg("table"), py::arg("choices"));
    m.def(
        "verify",
        [](const DerivationTable& t, const ConstructionChoices& c, std::optional<double> tol,
           std::optional<CMatrix> generator, std::uint64_t seed) {
            VerifyOptions options;
            options.tol = tol ? *tol : default_tolerance(t);
            options.generator = std::move(generator);
            options.seed = seed;
            return json_to_py(to_json(verify(t, build_b(t, c), options)));
        },
        py::arg("table"), py::arg("choices"), py::arg("tol") = py::none(), py::arg("generator") = py::none(),
        py::arg("seed") = 0,
        "Builds the implementer for the given choices and returns the verification report as a dict");
    m.def(
        "chain",
        [](const DerivationTable& t) {
            const ChainFamily family = chain_family(t);
            const ChainFamily normalized = normalize_chain(family);
            py::dict out;
            out["family"] = json_to_py(to_json(family));
            out["normalized"] = json_to_py(to_json(normalized));
            out["stabilized"] = json_to_py(to_json(compare_stabilized(t, normalized)));
            return out;
        },
        py::arg("table"));
}
