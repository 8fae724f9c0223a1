#include "cli.hpp"

#include "nestderiv/chain.hpp"
#include "nestderiv/construct.hpp"
#include "nestderiv/derivation.hpp"
#include "nestderiv/error.hpp"
#include "nestderiv/json_io.hpp"
#include "nestderiv/random.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace nestderiv::cli {

namespace {

struct RunConfig {
    Index n = 0;
    std::vector<Index> chain;
    std::optional<Index> level;
    std::optional<Index> xi0_index;
    std::optional<Index> eta1_index;
    std::uint64_t seed = 0;
    double tol = 1e-9;
    bool zero = false;
    bool gate_thm13 = false;
    std::string input;
    std::string generator;
    std::string b_path;
    std::string artifacts_path;
    std::string out;
    std::string generator_out;
};

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::missing_entry:
        case ErrorCode::invalid_derivation:
        case ErrorCode::outside_algebra:
            return kValidationFailure;
        case ErrorCode::format:
        case ErrorCode::io:
            return kIoError;
        default:
            return kConfigError;
    }
}

ConstructionChoices choices_for(const NestAlgebra& alg, const RunConfig& cfg) {
    const Index level = cfg.level ? *cfg.level : default_level(alg);
    if (level < 1 || level >= alg.levels()) {
        throw Error(ErrorCode::invalid_argument,
                    "--k must be an interior chain level in 1.." + std::to_string(alg.levels() - 1));
    }
    const Index d = alg.invariant_dim(level);
    return choices_from_indices(alg, level, cfg.xi0_index.value_or(d), cfg.eta1_index.value_or(0));
}

std::optional<CMatrix> load_generator(const RunConfig& cfg, Index n) {
    if (cfg.generator.empty()) return std::nullopt;
    CMatrix c = matrix_from_json(read_json_file(cfg.generator));
    if (c.rows() != n || c.cols() != n) {
        throw Error(ErrorCode::dimension_mismatch, "generator does not match the table dimension");
    }
    return c;
}

// Loads the table and checks the product rule. Returns nullopt (after writing
// the validation report) when the table is not a derivation.
std::optional<DerivationTable> load_valid_table(const RunConfig& cfg, std::ostream& out) {
    DerivationTable table = table_from_json(read_json_file(cfg.input));
    const ValidationReport validation = validate(table);
    if (!validation.valid) {
        const Json j = {{"validation", to_json(validation)}};
        if (!cfg.out.empty()) write_json_file(cfg.out, j);
        out << j.dump(2) << '\n';
        return std::nullopt;
    }
    return require_valid(std::move(table));
}

int cmd_generate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.out.empty()) throw Error(ErrorCode::invalid_argument, "--out is required");
    CMatrix c;
    std::optional<NestAlgebra> alg;
    if (!cfg.generator.empty()) {
        c = matrix_from_json(read_json_file(cfg.generator));
        if (c.rows() != c.cols()) throw Error(ErrorCode::dimension_mismatch, "generator must be square");
        const Index n = c.rows();
        if (cfg.n != 0 && cfg.n != n) throw Error(ErrorCode::invalid_argument, "--n disagrees with the generator");
        alg = cfg.chain.empty() ? NestAlgebra::triangular(n) : NestAlgebra(n, cfg.chain);
    } else {
        if (cfg.n < 2) throw Error(ErrorCode::invalid_argument, "--n must be at least 2");
        alg = cfg.chain.empty() ? NestAlgebra::triangular(cfg.n) : NestAlgebra(cfg.n, cfg.chain);
        Rng rng(cfg.seed);
        c = cfg.zero ? CMatrix::Zero(cfg.n, cfg.n) : rng.gaussian_matrix(cfg.n, cfg.n);
    }
    if (alg->dim() < 2) throw Error(ErrorCode::invalid_argument, "dimension must be at least 2");

    const DerivationTable table = inner_from(*alg, c, cfg.tol);
    const ValidationReport validation = validate(table);
    write_json_file(cfg.out, to_json(table));

    std::string gen_path = cfg.generator_out;
    if (gen_path.empty()) gen_path = cfg.generator.empty() ? cfg.out + ".generator.json" : cfg.generator;
    if (gen_path != cfg.generator) write_json_file(gen_path, to_json(c));

    out << "table: " << cfg.out << '\n'
        << "generator: " << gen_path << '\n'
        << "validation max residual: " << validation.max_residual << '\n';
    return validation.valid ? kSuccess : kValidationFailure;
}

bool passes(const VerificationReport& rep, bool gate_thm13) {
    return rep.pass.thm11 && rep.pass.thm12 && (!gate_thm13 || rep.pass.thm13);
}

int emit_report(const RunConfig& cfg, const DerivationTable& table, const ConstructionArtifacts& art,
                std::ostream& out) {
    VerifyOptions options;
    options.tol = default_tolerance(table, cfg.tol);
    options.generator = load_generator(cfg, table.dim());
    options.seed = cfg.seed;
    const VerificationReport rep = verify(table, art, options);

    Json j = {{"report", to_json(rep)}, {"artifacts", to_json(art)}, {"tol", options.tol}};
    if (!cfg.out.empty()) write_json_file(cfg.out, j);
    out << to_json(rep).dump(2) << '\n';
    return passes(rep, cfg.gate_thm13) ? kSuccess : kValidationFailure;
}

int cmd_construct(const RunConfig& cfg, std::ostream& out) {
    const auto table = load_valid_table(cfg, out);
    if (!table) return kValidationFailure;
    const ConstructionArtifacts art = build_b(*table, choices_for(table->algebra(), cfg));
    return emit_report(cfg, *table, art, out);
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const auto table = load_valid_table(cfg, out);
    if (!table) return kValidationFailure;
    ConstructionArtifacts art;
    if (!cfg.artifacts_path.empty()) {
        const Json j = read_json_file(cfg.artifacts_path);
        art = artifacts_from_json(j.contains("artifacts") ? j.at("artifacts") : j);
    } else if (!cfg.b_path.empty()) {
        const CMatrix b = matrix_from_json(read_json_file(cfg.b_path));
        art = decompose(table->algebra(), b, choices_for(table->algebra(), cfg));
    } else {
        throw Error(ErrorCode::invalid_argument, "verify needs --b or --artifacts");
    }
    return emit_report(cfg, *table, art, out);
}

int cmd_chain(const RunConfig& cfg, std::ostream& out) {
    const auto table = load_valid_table(cfg, out);
    if (!table) return kValidationFailure;
    const double tol = default_tolerance(*table, cfg.tol);
    const ChainFamily family = chain_family(*table);
    const ChainFamily normalized = normalize_chain(family);
    const StabilizationReport stab = compare_stabilized(*table, normalized);

    double worst = 0.0;
    for (const ChainMember& m : normalized.members)
        for (const ConsistencyScalar& s : m.lambdas) worst = std::max(worst, std::abs(s.value) + s.residual);

    Json j = {{"family", to_json(normalized)},
              {"pre_normalization", to_json(family)},
              {"stabilized", to_json(stab)},
              {"max_normalized_scalar", worst},
              {"tol", tol}};
    if (family.members.size() < 2) j["note"] = "single-member family: no consistency pairs";
    if (!cfg.out.empty()) write_json_file(cfg.out, j);
    if (family.members.size() < 2) out << "single-member family: no consistency pairs\n";
    out << "levels: " << family.members.size() << ", max normalized scalar: " << worst
        << ", stabilized implements residual: " << stab.implements_residual << '\n';
    return worst <= tol && stab.implements_residual <= tol ? kSuccess : kValidationFailure;
}

void add_choice_flags(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--k", cfg.level, "interior chain level of p (1-based)");
    cmd->add_option("--xi0-index", cfg.xi0_index, "coordinate of xi0, must lie in p^perp");
    cmd->add_option("--eta1-index", cfg.eta1_index, "coordinate of eta1, must lie in p");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Construct and verify implementing operators for derivations on nest algebras"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto* generate = app.add_subcommand("generate", "write an inner derivation table from a seeded generator");
    generate->add_option("--n", cfg.n, "dimension (>= 2)");
    generate->add_option("--chain", cfg.chain, "invariant dimensions d_1 < ... < d_m = n")->delimiter(',');
    generate->add_option("--seed", cfg.seed, "generator seed");
    generate->add_option("--tol", cfg.tol, "table tolerance");
    generate->add_flag("--zero", cfg.zero, "use the zero generator");
    generate->add_option("--generator", cfg.generator, "read the generator matrix instead of drawing one");
    generate->add_option("--generator-out", cfg.generator_out, "where to write the generator matrix");
    generate->add_option("--out", cfg.out, "output table path")->required();

    auto* construct = app.add_subcommand("construct", "build b1, c1, c2, b and verify them");
    auto* verify_cmd = app.add_subcommand("verify", "verify a provided implementer against a table");
    auto* chain = app.add_subcommand("chain", "per-level implementers, consistency scalars, normalization");
    for (auto* cmd : {construct, verify_cmd, chain}) {
        cmd->add_option("--input", cfg.input, "derivation table JSON")->required();
        cmd->add_option("--tol", cfg.tol, "base tolerance, scaled by 1 + max table value norm");
        cmd->add_option("--seed", cfg.seed, "seed for the sampled norm lower bound");
        cmd->add_option("--out", cfg.out, "output JSON path");
    }
    for (auto* cmd : {construct, verify_cmd}) {
        add_choice_flags(cmd, cfg);
        cmd->add_option("--generator", cfg.generator, "generator matrix JSON, enables gauge and norm bounds");
        cmd->add_flag("--gate-thm13", cfg.gate_thm13, "also require the triple rule and full implementation");
    }
    verify_cmd->add_option("--b", cfg.b_path, "implementer matrix JSON");
    verify_cmd->add_option("--artifacts", cfg.artifacts_path, "artifacts JSON written by construct");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kConfigError;
    }

    try {
        if (!(cfg.tol > 0.0)) throw Error(ErrorCode::invalid_argument, "--tol must be positive");
        if (*generate) return cmd_generate(cfg, out);
        if (*construct) return cmd_construct(cfg, out);
        if (*verify_cmd) return cmd_verify(cfg, out);
        if (*chain) return cmd_chain(cfg, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kIoError;
    }
    return kConfigError;
}

}  // namespace nestderiv::cli
