#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "fma/metamodel.hpp"
#include "fma/model.hpp"

namespace fmadsl {

/// Typing environment for variables.
using TypeEnvVars = std::map<std::string, ScalarType>;
/// Typing environment for object identifiers (oid -> class name).
using TypeEnvOids = std::map<Oid, std::string>;

/// Decides object subtyping s1 <: s2 against one model type. Recursion
/// through class references is cut off by a memo of class-name pairs already
/// under comparison, so cyclic class graphs terminate. Unknown class names
/// reached through fields make the check fail.
bool subtypeOf(const ModelType& mm, const ObjectType& s1, const ObjectType& s2);

/// Object subtyping where each side's class names resolve in its own model
/// type; memo keys are cross-metamodel pairs.
bool subtypeOfCross(const ModelType& mm1, const ModelType& mm2, const ObjectType& s1,
                    const ObjectType& s2);

/// Model subtyping: mm1 <: mm2 iff the root class type of mm1 subsumes under
/// the root class type of mm2, resolving each field in its own metamodel.
bool modelSubtype(const ModelType& mm1, const ModelType& mm2);

/// The refinement check between an inferred object type and a declared one:
/// the inferred type restricted to the declared names must equal itself (no
/// extra fields) and it must be a structural subtype of the declared type.
bool refines(const ModelType& mm, const ObjectType& inferred, const ObjectType& declared);

/// A term of the model syntax, for type inference: a base value, a reference
/// collection, a single object, an ordered set of objects, or a property set.
struct RefCollection {
    std::vector<Oid> ids;
};
struct PropertySetTerm {
    std::vector<PropertyBinding> props;
};
using Term = std::variant<Value, RefCollection, ObjectNode, ObjectSet, PropertySetTerm>;

/// Inference result: scalar types for values and reference collections, a
/// class name for objects and object sets, an object type for property sets.
using InferredType = std::variant<ScalarType, ClassRef, ObjectType>;

struct TypeError {
    std::string rule;
    std::string path;
    std::string message;
};

using InferResult = std::variant<InferredType, TypeError>;

/// Syntax-directed type inference for model terms. Returns at most one type;
/// collection rules are tried in a fixed order whose overlap is harmless
/// because the class table is injective.
InferResult inferType(const ModelType& mm, const TypeEnvVars& gamma,
                      const TypeEnvOids& pi, const Term& term);

/// Metamodel conformance: the roots' inferred class subsumes under the root
/// class of the metamodel. Failures carry the inference diagnostic.
struct ConformanceResult {
    bool ok = false;
    std::optional<TypeError> error;
};

ConformanceResult conformsDiag(const ModelType& mm, const StructuredModel& model);
bool conforms(const ModelType& mm, const StructuredModel& model);

std::string inferredTypeStr(const InferredType& t);

} // namespace fmadsl
