#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fma/interp.hpp"
#include "fma/json_io.hpp"
#include "fma/metamodel.hpp"
#include "fma/syntax.hpp"
#include "fma/testkit.hpp"
#include "fma/typecheck.hpp"
#include "fma/typesys.hpp"
#include "fma/validate.hpp"

namespace {

// Exit codes: 0 ok, 1 trapped run-time error, 2 program type error,
// 3 invalid/non-conformant model, 4 parse error, 5 invalid metamodel,
// 64 usage.
constexpr int kOk = 0;
constexpr int kTrapped = 1;
constexpr int kTypeError = 2;
constexpr int kBadModel = 3;
constexpr int kParseError = 4;
constexpr int kBadMetamodel = 5;
constexpr int kUsage = 64;

struct CliError {
    int code;
    std::string message;
};

fmadsl::ModelType loadMM(const std::string& path) {
    try {
        return fmadsl::loadMetamodelFile(path);
    } catch (const fmadsl::MetamodelError& e) {
        throw CliError{kBadMetamodel, std::string("invalid metamodel: ") + e.what()};
    } catch (const fmadsl::IoError& e) {
        throw CliError{kBadMetamodel, e.what()};
    }
}

fmadsl::StructuredModel loadModel(const std::string& path) {
    try {
        return fmadsl::loadModelFile(path);
    } catch (const fmadsl::IoError& e) {
        throw CliError{kBadModel, std::string("invalid model: ") + e.what()};
    } catch (const fmadsl::ModelError& e) {
        throw CliError{kBadModel, std::string("invalid model: ") + e.what()};
    }
}

fmadsl::StmtPtr loadProgram(const std::string& path) {
    try {
        return fmadsl::parse(fmadsl::readTextFile(path));
    } catch (const fmadsl::ParseError& e) {
        throw CliError{kParseError, e.what()};
    } catch (const fmadsl::IoError& e) {
        throw CliError{kParseError, e.what()};
    }
}

std::map<std::string, fmadsl::Env::Bound> loadBindings(const std::string& path) {
    try {
        return fmadsl::loadBindingsFile(path);
    } catch (const fmadsl::IoError& e) {
        throw CliError{kUsage, std::string("bad bindings file: ") + e.what()};
    }
}

/// Variable typing environment matching a bindings map: identifiers take the
/// class of the object they name, scalars their base type.
fmadsl::TypeEnvVars gammaOf(const std::map<std::string, fmadsl::Env::Bound>& vars,
                         const fmadsl::StructuredModel& model) {
    fmadsl::TypeEnvVars gamma;
    for (const auto& [name, bound] : vars) {
        if (const auto* v = std::get_if<fmadsl::Value>(&bound)) {
            gamma[name] = fmadsl::ScalarType::baseType(v->type());
        } else {
            const auto& oid = std::get<fmadsl::Oid>(bound);
            auto it = model.typing.find(oid);
            if (it != model.typing.end())
                gamma[name] = fmadsl::ScalarType::refTo(fmadsl::ClassRef::named(it->second));
        }
    }
    return gamma;
}

fmadsl::TraceSink stderrTrace() {
    return [](const fmadsl::TraceEvent& e) {
        std::cerr << "[" << e.depth << "] " << e.rule << " xi=" << e.xiBefore << "->"
                  << e.xiAfter;
        if (!e.loc.empty()) std::cerr << " @ " << e.loc;
        std::cerr << "\n";
    };
}

int cmdRun(const std::string& mmPath, const std::string& modelPath,
           const std::string& programPath, const std::string& bindingsPath,
           const std::string& outPath, bool check, bool trace) {
    fmadsl::ModelType mm = loadMM(mmPath);
    fmadsl::StructuredModel model = loadModel(modelPath);
    fmadsl::StmtPtr program = loadProgram(programPath);
    std::map<std::string, fmadsl::Env::Bound> vars;
    if (!bindingsPath.empty()) vars = loadBindings(bindingsPath);

    if (check) {
        fmadsl::TypeEnvOids pi(model.typing.begin(), model.typing.end());
        fmadsl::TypeVerdict verdict =
            fmadsl::typecheckProgram(mm, pi, program, gammaOf(vars, model));
        if (!verdict.ok) {
            std::cerr << fmadsl::writeVerdict(verdict);
            return kTypeError;
        }
    }

    fmadsl::RunResult result =
        fmadsl::runProgram(model, mm, program, vars, trace ? stderrTrace() : fmadsl::TraceSink{});
    if (const auto* trap = std::get_if<fmadsl::TrappedError>(&result)) {
        std::cerr << trap->rule << " (" << fmadsl::trapKindName(trap->kind)
                  << "): " << trap->context << "\n";
        return kTrapped;
    }
    if (const auto* fault = std::get_if<fmadsl::ProgramFault>(&result)) {
        std::cerr << fault->message << "\n";
        return fault->kind == fmadsl::ProgramFault::Kind::IllTyped ? kTypeError : kBadModel;
    }
    std::string out = fmadsl::writeModel(std::get<fmadsl::StructuredModel>(result));
    if (outPath.empty()) std::cout << out;
    else fmadsl::writeTextFile(outPath, out);
    return kOk;
}

int cmdCheckMm(const std::string& mmPath) {
    fmadsl::ModelType mm = loadMM(mmPath);
    std::cout << "ok: metamodel '" << mm.name() << "' with " << mm.classOrder().size()
              << " classes, root '" << mm.root() << "'\n";
    return kOk;
}

int cmdCheckModel(const std::string& mmPath, const std::string& modelPath) {
    fmadsl::ModelType mm = loadMM(mmPath);
    fmadsl::StructuredModel model = loadModel(modelPath);
    try {
        fmadsl::ValidityReport report = fmadsl::checkValid(model, mm);
        if (!report.ok) {
            std::cout << fmadsl::writeValidityReport(report);
            return kBadModel;
        }
    } catch (const fmadsl::MetamodelError& e) {
        std::cerr << e.what() << "\n";
        return kBadModel;
    }
    fmadsl::ConformanceResult conf = fmadsl::conformsDiag(mm, model);
    if (!conf.ok) {
        std::cerr << "not conformant";
        if (conf.error)
            std::cerr << " (" << conf.error->rule << " at '" << conf.error->path
                      << "': " << conf.error->message << ")";
        std::cerr << "\n";
        return kBadModel;
    }
    std::cout << "ok: model is valid and conforms\n";
    return kOk;
}

int cmdCheckTypes(const std::string& mmPath, const std::string& modelPath,
                  const std::string& programPath, const std::string& bindingsPath) {
    fmadsl::ModelType mm = loadMM(mmPath);
    fmadsl::StructuredModel model = loadModel(modelPath);
    fmadsl::StmtPtr program = loadProgram(programPath);
    std::map<std::string, fmadsl::Env::Bound> vars;
    if (!bindingsPath.empty()) vars = loadBindings(bindingsPath);
    fmadsl::TypeEnvOids pi(model.typing.begin(), model.typing.end());
    fmadsl::TypeVerdict verdict = fmadsl::typecheckProgram(mm, pi, program, gammaOf(vars, model));
    std::cout << fmadsl::writeVerdict(verdict);
    return verdict.ok ? kOk : kTypeError;
}

int cmdCheckSubtype(const std::string& mm1Path, const std::string& mm2Path) {
    fmadsl::ModelType mm1 = loadMM(mm1Path);
    fmadsl::ModelType mm2 = loadMM(mm2Path);
    std::cout << (fmadsl::modelSubtype(mm1, mm2) ? "true" : "false") << "\n";
    return kOk;
}

int cmdInfer(const std::string& mmPath, const std::string& modelPath) {
    fmadsl::ModelType mm = loadMM(mmPath);
    fmadsl::StructuredModel model = loadModel(modelPath);
    fmadsl::TypeEnvOids pi(model.typing.begin(), model.typing.end());
    fmadsl::InferResult r = fmadsl::inferType(mm, {}, pi, fmadsl::Term{model.roots});
    if (const auto* err = std::get_if<fmadsl::TypeError>(&r)) {
        std::cerr << err->rule << " at '" << err->path << "': " << err->message << "\n";
        return kBadModel;
    }
    std::cout << fmadsl::inferredTypeStr(std::get<fmadsl::InferredType>(r)) << "\n";
    return kOk;
}

int cmdFmt(const std::string& programPath) {
    fmadsl::StmtPtr program = loadProgram(programPath);
    std::cout << fmadsl::format(program) << "\n";
    return kOk;
}

int cmdFuzz(const std::string& mmPath, std::uint64_t seeds, std::uint64_t startSeed,
            bool adversarial, std::size_t maxObjects, std::size_t maxStmts) {
    fmadsl::ModelType mm = loadMM(mmPath);
    std::uint64_t trapped = 0, ran = 0, failures = 0;
    for (std::uint64_t seed = startSeed; seed < startSeed + seeds; ++seed) {
        fmadsl::testkit::GenSpec spec;
        spec.seed = seed;
        spec.maxObjects = maxObjects;
        spec.maxStmts = maxStmts;
        try {
            fmadsl::StructuredModel model = fmadsl::testkit::genModel(mm, spec);
            if (!fmadsl::conforms(mm, model) || !fmadsl::testkit::oracleValidate(model, mm).ok) {
                std::cerr << "seed " << seed << ": generated model is inconsistent\n";
                ++failures;
                continue;
            }
            fmadsl::StmtPtr program =
                adversarial ? fmadsl::testkit::genAdversarialProgram(mm, model, spec)
                            : fmadsl::testkit::genProgram(mm, model, spec);
            fmadsl::RunResult result = fmadsl::runProgram(model, mm, program);
            ++ran;
            if (std::holds_alternative<fmadsl::TrappedError>(result)) {
                ++trapped;
            } else if (std::holds_alternative<fmadsl::ProgramFault>(result)) {
                std::cerr << "seed " << seed << ": fault: "
                          << std::get<fmadsl::ProgramFault>(result).message << "\n";
                ++failures;
            } else {
                const auto& out = std::get<fmadsl::StructuredModel>(result);
                if (!fmadsl::checkValid(out, mm).ok || !fmadsl::conforms(mm, out)) {
                    std::cerr << "seed " << seed << ": output is inconsistent\n";
                    ++failures;
                }
            }
        } catch (const std::exception& e) {
            std::cerr << "seed " << seed << ": exception: " << e.what() << "\n";
            ++failures;
        }
    }
    std::cout << "ran " << ran << " seeds, " << trapped << " trapped, " << failures
              << " failures\n";
    return failures == 0 ? kOk : kTrapped;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"FMA model transformations: run, type-check and analyze"};
    app.require_subcommand(1);

    std::string mmPath, modelPath, programPath, bindingsPath, outPath, mm2Path;
    bool check = false, trace = false, adversarial = false;
    std::uint64_t seeds = 100, startSeed = 1;
    std::size_t maxObjects = 12, maxStmts = 8;

    auto* run = app.add_subcommand("run", "run a program on a model");
    run->add_option("metamodel", mmPath)->required();
    run->add_option("model", modelPath)->required();
    run->add_option("program", programPath)->required();
    run->add_option("--bindings", bindingsPath, "initial variable bindings (JSON)");
    run->add_option("-o,--out", outPath, "output model path (default: stdout)");
    run->add_flag("--check", check, "refuse to run ill-typed programs");
    run->add_flag("--trace", trace, "print one line per evaluation rule");

    auto* chk = app.add_subcommand("check", "static checks");
    chk->require_subcommand(1);
    auto* chkMm = chk->add_subcommand("mm", "validate a metamodel");
    chkMm->add_option("metamodel", mmPath)->required();
    auto* chkModel = chk->add_subcommand("model", "validate + conformance-check a model");
    chkModel->add_option("metamodel", mmPath)->required();
    chkModel->add_option("model", modelPath)->required();
    auto* chkTypes = chk->add_subcommand("types", "type-check a program");
    chkTypes->add_option("metamodel", mmPath)->required();
    chkTypes->add_option("model", modelPath)->required();
    chkTypes->add_option("program", programPath)->required();
    chkTypes->add_option("--bindings", bindingsPath);
    auto* chkSub = chk->add_subcommand("subtype", "decide model subtyping");
    chkSub->add_option("metamodel1", mmPath)->required();
    chkSub->add_option("metamodel2", mm2Path)->required();

    auto* infer = app.add_subcommand("infer", "print the inferred root type of a model");
    infer->add_option("metamodel", mmPath)->required();
    infer->add_option("model", modelPath)->required();

    auto* fmt = app.add_subcommand("fmt", "reprint a program canonically");
    fmt->add_option("program", programPath)->required();

    auto* fuzz = app.add_subcommand("fuzz", "generate and run random programs");
    fuzz->add_option("metamodel", mmPath)->required();
    fuzz->add_option("--seeds", seeds, "number of seeds");
    fuzz->add_option("--start-seed", startSeed);
    fuzz->add_option("--objects", maxObjects, "object budget per model");
    fuzz->add_option("--stmts", maxStmts, "statement budget per program");
    fuzz->add_flag("--adversarial", adversarial, "inject trap-provoking operands");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kUsage;
    }

    try {
        if (run->parsed())
            return cmdRun(mmPath, modelPath, programPath, bindingsPath, outPath, check,
                          trace);
        if (chkMm->parsed()) return cmdCheckMm(mmPath);
        if (chkModel->parsed()) return cmdCheckModel(mmPath, modelPath);
        if (chkTypes->parsed())
            return cmdCheckTypes(mmPath, modelPath, programPath, bindingsPath);
        if (chkSub->parsed()) return cmdCheckSubtype(mmPath, mm2Path);
        if (infer->parsed()) return cmdInfer(mmPath, modelPath);
        if (fmt->parsed()) return cmdFmt(programPath);
        if (fuzz->parsed())
            return cmdFuzz(mmPath, seeds, startSeed, adversarial, maxObjects, maxStmts);
    } catch (const CliError& e) {
        std::cerr << e.message << "\n";
        return e.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
