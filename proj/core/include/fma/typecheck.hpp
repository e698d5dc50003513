#pragma once

#include <string>
#include <variant>
#include <vector>

#include "fma/metamodel.hpp"
#include "fma/syntax.hpp"
#include "fma/typesys.hpp"

namespace fmadsl {

/// One rejected premise: the rule that failed, where in the program, and the
/// expected/found types.
struct VerdictEntry {
    std::string rule;
    std::string path;
    std::string expected;
    std::string found;
};

struct TypeVerdict {
    bool ok = true;
    std::vector<VerdictEntry> errors;
};

using ExprTypeResult = std::variant<ScalarType, VerdictEntry>;

/// Types an expression: literals by their base type, variables through the
/// environment, identifier literals through the object typing map.
ExprTypeResult typecheckExpr(const ModelType& mm, const TypeEnvVars& gamma,
                             const TypeEnvOids& pi, const Expr& e);

/// Checks a second-level statement against the class of the object under
/// focus. Every action's operand must be compatible with the projected field
/// of the focus class.
TypeVerdict typecheckAct(const ModelType& mm, const std::string& focusClass,
                         const TypeEnvVars& gamma, const TypeEnvOids& pi, const ActPtr& s2);

/// Checks a program: closedness under the initial environment, then the
/// typing rules for first-level statements. A program accepted here is
/// well-behaved: run on a consistent model it produces a consistent model or
/// stops with a trapped error.
TypeVerdict typecheckProgram(const ModelType& mm, const TypeEnvOids& pi, const StmtPtr& s,
                             const TypeEnvVars& initialGamma = {});

} // namespace fmadsl
