#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

#include "fma/interp.hpp"
#include "fma/metamodel.hpp"
#include "fma/model.hpp"
#include "fma/syntax.hpp"
#include "fma/validate.hpp"

namespace fmadsl::testkit {

struct GenSpec {
    std::uint64_t seed = 1;
    std::size_t maxObjects = 12;
    std::size_t maxDepth = 4;
    std::size_t maxStmts = 8;
};

struct GenError : std::runtime_error {
    explicit GenError(const std::string& message) : std::runtime_error(message) {}
};

/// A deliberately naive re-implementation of the validity conditions: an
/// exhaustive scan of every reference against every object and of every
/// opposite pair in both directions. Shares no code with checkValid.
ValidityReport oracleValidate(const StructuredModel& model, const ModelType& mm);

/// Generates a conformant, valid model: containment trees drawn from the
/// declared-subclass cone of the root, attributes randomized, references
/// wired in compatible pairs with opposites kept consistent. Deterministic
/// per seed.
StructuredModel genModel(const ModelType& mm, const GenSpec& spec);

/// Generates a closed, type-correct program for the model: actions are drawn
/// only from the fields of the focused class with compatible operands, and
/// every statement is validated by running it on a scratch copy, so the
/// program evaluates without trapped errors. Deterministic per seed.
StmtPtr genProgram(const ModelType& mm, const StructuredModel& model, const GenSpec& spec);

/// Generates a program with deliberately broken operands (dangling targets,
/// non-members, hoists, non-isolated deletions). Used to exercise the
/// trapped-error catalog; runs must end in a cataloged trap or unit.
StmtPtr genAdversarialProgram(const ModelType& mm, const StructuredModel& model,
                              const GenSpec& spec);

enum class Mutation {
    RetargetRefToMissing, // invalidates: dangling reference
    DropOppositeSide,     // invalidates: inconsistent opposite
    RetypeAttribute,      // keeps validity, breaks conformance
};

/// Applies one mutation somewhere in the model, when an applicable site
/// exists. Deterministic per seed.
std::optional<StructuredModel> mutateModel(const StructuredModel& model, const ModelType& mm,
                                           Mutation mutation, std::uint64_t seed);

} // namespace fmadsl::testkit
