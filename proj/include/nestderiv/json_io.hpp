#pragma once

#include "nestderiv/algebra.hpp"
#include "nestderiv/chain.hpp"
#include "nestderiv/construct.hpp"
#include "nestderiv/derivation.hpp"

#include "json.hpp"

#include <filesystem>

namespace nestderiv {

using Json = nlohmann::json;

// Schemas:
//   matrix      {"rows": n, "cols": n, "data": [[re, im], ...]}   row-major
//   algebra     {"n": int, "chain": [int, ...]}
//   derivation  {"algebra": {...}, "entries": [{"i", "j", "value": matrix}], "tol": real}
//   report      {"residual_pSp", "residual_corner", "residual_full", "rule_max",
//                "norms": {"b1", "b2", "b", "delta_lower", "delta_upper"|null},
//                "gauge": {"lambda": [re, im], "residual"}|null,
//                "pass": {"thm11", "thm12", "thm13"}}
//   family      [{"k": int, "b": matrix, "lambdas": [{"beta", "value": [re, im], "residual"}]}]
// Readers throw ErrorCode::format on schema violations.

Json to_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& j);

Json to_json(const NestAlgebra& alg);
NestAlgebra algebra_from_json(const Json& j);

Json to_json(const DerivationTable& table);
DerivationTable table_from_json(const Json& j);

Json to_json(const ValidationReport& report);
Json to_json(const StructureReport& report);
Json to_json(const ConstructionChoices& choices);
ConstructionChoices choices_from_json(const Json& j);
Json to_json(const ConstructionArtifacts& artifacts);
ConstructionArtifacts artifacts_from_json(const Json& j);
Json to_json(const VerificationReport& report);
Json to_json(const ChainFamily& family);
Json to_json(const StabilizationReport& report);

Json complex_to_json(Complex z);

/// Throws ErrorCode::io when the file cannot be read and ErrorCode::format when
/// it is not valid JSON.
Json read_json_file(const std::filesystem::path& path);

/// Writes pretty-printed JSON to a temporary sibling and renames it into place.
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace nestderiv
