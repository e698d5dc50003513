#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "fma/model.hpp"
#include "fma/value.hpp"

namespace fmadsl {

/// A class-name position in a type. Besides concrete names there are two
/// markers produced by inference only: Any, the name of the least informative
/// type (class table entry: the empty object type), and Bottom, the name of
/// the bottom type inferred for empty collections.
struct ClassRef {
    enum class Kind { Named, Any, Bottom };

    Kind kind = Kind::Any;
    std::string name;

    static ClassRef named(std::string n) { return {Kind::Named, std::move(n)}; }
    static ClassRef any() { return {Kind::Any, {}}; }
    static ClassRef bottom() { return {Kind::Bottom, {}}; }

    bool isNamed() const { return kind == Kind::Named; }
    bool isAny() const { return kind == Kind::Any; }
    bool isBottom() const { return kind == Kind::Bottom; }

    std::string str() const;

    friend auto operator<=>(const ClassRef&, const ClassRef&) = default;
};

/// The type of one structural feature: attribute, reference or containment.
struct FieldType {
    enum class Kind { Attr, Ref, Cmt };

    Kind kind = Kind::Attr;
    BaseType base = BaseType::String; // Attr only
    ClassRef cls;                     // Ref/Cmt only

    static FieldType attr(BaseType b) { return {Kind::Attr, b, {}}; }
    static FieldType ref(ClassRef c) { return {Kind::Ref, BaseType::String, std::move(c)}; }
    static FieldType cmt(ClassRef c) { return {Kind::Cmt, BaseType::String, std::move(c)}; }

    std::string str() const;

    friend auto operator<=>(const FieldType&, const FieldType&) = default;
};

/// An object type: a set of named fields, the empty type, or bottom.
struct ObjectType {
    enum class Kind { Fields, Empty, Bottom };

    struct Field {
        std::string name;
        FieldType type;
        friend auto operator<=>(const Field&, const Field&) = default;
    };

    Kind kind = Kind::Empty;
    std::vector<Field> fields; // declaration order; names unique

    static ObjectType empty() { return {Kind::Empty, {}}; }
    static ObjectType bottom() { return {Kind::Bottom, {}}; }
    /// A fieldless type canonicalizes to the empty type.
    static ObjectType withFields(std::vector<Field> fs) {
        if (fs.empty()) return empty();
        return {Kind::Fields, std::move(fs)};
    }

    bool isEmpty() const { return kind == Kind::Empty; }
    bool isBottom() const { return kind == Kind::Bottom; }

    const FieldType* find(const std::string& name) const;

    std::string str() const;

    friend auto operator<=>(const ObjectType&, const ObjectType&) = default;
};

/// Scalar types classify expressions: base values, references, and the two
/// unit types of the statement levels.
struct ScalarType {
    enum class Kind { Base, Ref, Unit, ActUnit };

    Kind kind = Kind::Unit;
    BaseType base = BaseType::String;
    ClassRef cls;

    static ScalarType baseType(BaseType b) { return {Kind::Base, b, {}}; }
    static ScalarType refTo(ClassRef c) { return {Kind::Ref, BaseType::String, std::move(c)}; }
    static ScalarType unit() { return {Kind::Unit, BaseType::String, {}}; }
    static ScalarType actUnit() { return {Kind::ActUnit, BaseType::String, {}}; }

    std::string str() const;

    friend auto operator<=>(const ScalarType&, const ScalarType&) = default;
};

/// One end of a bidirectional association: a plain reference end (bRE) or a
/// containment end (bCE), identified by owning class and property name.
struct ReferenceEnd {
    enum class Kind { Ref, Cmt };

    Kind kind = Kind::Ref;
    std::string owner;
    std::string prop;

    static ReferenceEnd refEnd(std::string c, std::string p) {
        return {Kind::Ref, std::move(c), std::move(p)};
    }
    static ReferenceEnd cmtEnd(std::string c, std::string p) {
        return {Kind::Cmt, std::move(c), std::move(p)};
    }

    std::string str() const;

    friend auto operator<=>(const ReferenceEnd&, const ReferenceEnd&) = default;
};

struct MetamodelError : std::runtime_error {
    enum class Code {
        CmtOppositeCmt,
        NonInvolutiveOpposite,
        DuplicateClass,
        NonInjectiveCl,
        UnknownRoot,
        CyclicInheritance,
        UnknownClass,
        UnknownProperty,
        BadDocument,
    };

    MetamodelError(Code code, std::string message)
        : std::runtime_error(std::move(message)), code(code) {}

    Code code;
};

/// A metamodel document before validation, as read from a metamodel file.
struct MetamodelDoc {
    struct Property {
        std::string name;
        FieldType type;               // declared types never carry Any/Bottom
        std::optional<std::string> opposite;
    };
    struct Class {
        std::string name;
        bool abstract_ = false;
        std::vector<std::string> supertypes;
        std::vector<Property> properties;
    };

    std::string name;
    std::string root;
    std::vector<Class> classes;
};

/// A validated model type: class table (flattened), defaults, opposite ends,
/// reflexive-transitive subclass closure and root class. Immutable once built.
class ModelType {
public:
    static constexpr const char* kRootMarker = "$root";

    const std::string& name() const { return name_; }
    const std::string& root() const { return root_; }
    const std::vector<std::string>& classOrder() const { return classOrder_; }

    bool hasClass(const std::string& c) const { return cl_.count(c) != 0; }
    bool isAbstract(const std::string& c) const { return abstract_.count(c) != 0; }

    /// cl(c); Any resolves to the empty object type, Bottom to the bottom
    /// object type. Throws MetamodelError{UnknownClass} for unknown names.
    const ObjectType& classType(const ClassRef& c) const;
    const ObjectType& classType(const std::string& name) const;

    /// The declared field `prop` of class `c`, searched in the flattened
    /// class table. Null when absent.
    const FieldType* fieldOf(const std::string& c, const std::string& prop) const;

    /// df(c): one binding per field of cl(c), attributes at their zero value,
    /// collections empty. When `container` names the creating containment's
    /// declared opposite (a plain reference), that field starts out pointing
    /// at the container object.
    std::vector<PropertyBinding> defaultProps(
        const std::string& c,
        const std::optional<std::pair<Oid, std::string>>& container = std::nullopt) const;

    /// oe(end), resolving inherited ends through the subclass closure.
    /// Absent means the end is unidirectional.
    std::optional<ReferenceEnd> opposite(const ReferenceEnd& end) const;

    /// True when (sub, super) is in the subclass closure (reflexive).
    bool isSubclass(const std::string& sub, const std::string& super) const;

    /// Subclasses of `c` per the closure, including `c` itself.
    std::vector<std::string> subclassesOf(const std::string& c) const;

    /// The meet of two class names: the least informative declared common
    /// supertype. Any when one argument is Any or no common supertype exists;
    /// meet with Bottom yields the other argument.
    ClassRef meet(const ClassRef& a, const ClassRef& b) const;

    const std::map<ReferenceEnd, ReferenceEnd>& oppositeTable() const { return oe_; }
    const std::set<std::pair<std::string, std::string>>& subclassPairs() const {
        return sr_;
    }

    friend ModelType buildMetamodel(const MetamodelDoc& doc);

private:
    std::string name_;
    std::string root_;
    std::vector<std::string> classOrder_;
    std::map<std::string, ObjectType> cl_;
    std::set<std::string> abstract_;
    std::map<ReferenceEnd, ReferenceEnd> oe_;
    std::set<std::pair<std::string, std::string>> sr_;
    ObjectType emptyType_ = ObjectType::empty();
    ObjectType bottomType_ = ObjectType::bottom();
};

/// Validates a metamodel document and builds the model type: inherited fields
/// are flattened into each class entry, the subclass relation is closed
/// reflexively and transitively, and every structural invariant is checked
/// (opposite involution, no containment-to-containment opposites, injective
/// class table, known root, acyclic inheritance).
ModelType buildMetamodel(const MetamodelDoc& doc);

} // namespace fmadsl
