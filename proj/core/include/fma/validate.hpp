#pragma once

#include <string>
#include <vector>

#include "fma/metamodel.hpp"
#include "fma/model.hpp"

namespace fmadsl {

enum class ViolationKind { DanglingReference, InconsistentOpposite };

const char* violationKindName(ViolationKind k);

struct Violation {
    ViolationKind kind;
    /// For a dangling reference: the missing identifier. For an inconsistent
    /// opposite: the object whose property lacks the back reference.
    Oid oid;
    std::string prop;

    friend auto operator<=>(const Violation&, const Violation&) = default;
};

struct ValidityReport {
    bool ok = true;
    std::vector<Violation> violations; // sorted by (kind, oid, prop)
};

/// Checks the two validity conditions of a structured model against its
/// metamodel: every referenced identifier names an object in the model, and
/// for every pair of declared opposite ends, a reference in one direction is
/// mirrored in the other (including containment opposites). Throws
/// MetamodelError{UnknownClass} when the typing map names a class the
/// metamodel does not declare.
ValidityReport checkValid(const StructuredModel& model, const ModelType& mm);

} // namespace fmadsl
