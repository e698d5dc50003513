#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fma/metamodel.hpp"
#include "fma/model.hpp"
#include "fma/syntax.hpp"

namespace fmadsl {

/// The interpreter environment: variable bindings, the location of every
/// live object, and the per-class fresh-identifier counters.
struct Env {
    using Bound = std::variant<Value, Oid>;

    std::map<std::string, Bound> vars;
    std::map<Oid, Location> locs;
    std::map<std::string, std::uint64_t> fresh;
};

/// An opposite-maintenance action queued during a snapshot and applied when
/// the snapshot finishes: add or remove `value` in `target`'s reference
/// property `prop`.
struct DeferredAction {
    enum class Kind { Set, Unset };

    Kind kind;
    Oid target;
    std::string prop;
    Oid value;

    friend bool operator==(const DeferredAction&, const DeferredAction&) = default;
};

enum class TrapKind {
    DanglingReference,
    OppositeToContainment,
    NotIsolated,
    ReferenceNotFound,
    HoistViolation,
    NotARoot,
};

const char* trapKindName(TrapKind k);

/// A trapped run-time error: the rule that detected it and what it was
/// looking at. Trapped errors abort the run before the model can become
/// invalid.
struct TrappedError {
    TrapKind kind;
    std::string rule;
    std::string context;
};

/// A fault outside the trapped-error catalog: either the program performs an
/// operation no evaluation rule covers (an ill-typed program run unchecked),
/// or a precondition of the run was violated.
struct ProgramFault {
    enum class Kind { IllTyped, Precondition };

    Kind kind;
    std::string message;
};

/// One big-step rule application, for the evaluation trace. `depth` nests
/// premises under their conclusion; `xiBefore` is the measure of the
/// statement the rule evaluates and `xiAfter` the measure of its result.
struct TraceEvent {
    int depth;
    std::string rule;
    std::uint64_t xiBefore;
    std::uint64_t xiAfter;
    std::string loc;
};

using TraceSink = std::function<void(const TraceEvent&)>;

using EvalResult = std::variant<Value, Oid, ProgramFault>;

/// Expression evaluation: literals are themselves, variables look up, and an
/// object-identifier literal yields its identifier.
EvalResult evalExpr(const Env& env, const Expr& e);

/// First-level interpreter state.
struct Config {
    Env env;
    ObjectSet model;
    std::map<Oid, std::string> typing;
};

/// Second-level interpreter state: the focused object is held extracted, as
/// its location plus its property set, next to the remaining model and the
/// queue of deferred actions.
struct ActConfig {
    Env env;
    ObjectSet model;
    Location focus;
    std::vector<PropertyBinding> props;
    std::vector<DeferredAction> deferred;
    std::map<Oid, std::string> typing;
};

using ActOutcome = std::variant<ActConfig, TrappedError, ProgramFault>;
using FirstOutcome = std::variant<Config, TrappedError, ProgramFault>;
using RunResult = std::variant<StructuredModel, TrappedError, ProgramFault>;

/// Big-step evaluation of a second-level statement.
ActOutcome runAct(ActConfig q, const ActPtr& s2, const ModelType& mm,
                  const TraceSink& trace = {});

/// Big-step evaluation of a first-level statement.
FirstOutcome runFirst(Config k, const StmtPtr& s, const ModelType& mm,
                      const TraceSink& trace = {});

/// Applies queued deferred actions in order against an assembled model set.
/// Targets must still be present; a vanished target is an interpreter bug.
ObjectSet applyDeferred(const std::vector<DeferredAction>& actions, const Env& env,
                        ObjectSet set, const ModelType& mm,
                        const std::map<Oid, std::string>& typing);

/// Runs a program on a valid model: seeds the environment with the given
/// variable bindings, the location map and the fresh counters, evaluates the
/// program and returns the final model with its typing map extended for
/// created objects and pruned for deleted ones.
RunResult runProgram(const StructuredModel& model, const ModelType& mm,
                     const StmtPtr& program,
                     const std::map<std::string, Env::Bound>& initialVars = {},
                     const TraceSink& trace = {});

} // namespace fmadsl
