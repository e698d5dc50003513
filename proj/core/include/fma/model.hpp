#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fma/value.hpp"

namespace fmadsl {

struct ObjectNode;

/// An ordered, duplicate-free set of object identifiers (a reference collection).
struct RefSet {
    std::vector<Oid> ids;

    bool contains(const Oid& o) const;
    /// Appends at the end when absent; no-op when present.
    void add(const Oid& o);
    /// Removes the identifier; returns false when it was absent.
    bool remove(const Oid& o);

    friend bool operator==(const RefSet& a, const RefSet& b) { return a.ids == b.ids; }
};

/// An ordered, duplicate-free set of contained objects (a containment collection).
struct CmtSet {
    std::vector<ObjectNode> children;

    bool contains(const Oid& o) const;
    const ObjectNode* find(const Oid& o) const;

    friend bool operator==(const CmtSet& a, const CmtSet& b);
};

using Payload = std::variant<Value, RefSet, CmtSet>;

struct PropertyBinding {
    std::string name;
    Payload payload;

    bool isAttr() const { return std::holds_alternative<Value>(payload); }
    bool isRefs() const { return std::holds_alternative<RefSet>(payload); }
    bool isCmts() const { return std::holds_alternative<CmtSet>(payload); }

    friend bool operator==(const PropertyBinding& a, const PropertyBinding& b) {
        return a.name == b.name && a.payload == b.payload;
    }
};

/// A structured object: identifier plus property bindings. Containments nest
/// whole objects, so a node is the root of its own subtree.
///
/// `slot` is bookkeeping for stable collection order: collections are kept
/// sorted by ascending slot, new members get a slot past the current maximum,
/// and an extracted node keeps its slot so reinsertion restores its position.
/// It does not participate in equality and is not serialized.
struct ObjectNode {
    Oid oid;
    std::vector<PropertyBinding> props;
    std::uint64_t slot = 0;

    const PropertyBinding* findProp(const std::string& name) const;
    PropertyBinding* findProp(const std::string& name);

    friend bool operator==(const ObjectNode& a, const ObjectNode& b) {
        return a.oid == b.oid && a.props == b.props;
    }
};

using ObjectSet = std::vector<ObjectNode>;

/// A structured model: ordered set of root objects plus the typing map
/// from every object identifier occurring in the roots to its class name.
struct StructuredModel {
    ObjectSet roots;
    std::map<Oid, std::string> typing;

    friend bool operator==(const StructuredModel& a, const StructuredModel& b) {
        return a.roots == b.roots && a.typing == b.typing;
    }
};

/// A containment path from a root down to an object. A root location has no
/// steps; each step names the containing object and the containment property
/// traversed. `target` is the object the location points at.
struct Location {
    struct Step {
        Oid owner;
        std::string prop;
        friend auto operator<=>(const Step&, const Step&) = default;
    };

    std::vector<Step> steps;
    Oid target;

    bool isRoot() const { return steps.empty(); }
    /// The identifier of the object the location points at.
    const Oid& last() const { return target; }
    /// The direct container's identifier, or nullopt for a root location.
    std::optional<Oid> container() const;

    /// The location of an object placed under `this` via containment `prop`.
    Location child(const std::string& prop, Oid oid) const;

    std::string str() const;

    friend auto operator<=>(const Location&, const Location&) = default;
};

/// True when `outer` equals `inner` or lies on the containment path above it.
bool isAncestorOrSelf(const Location& outer, const Location& inner);

struct ModelError : std::runtime_error {
    enum class Code {
        LocationNotFound,
        LocationNotInsertable,
        OidMismatch,
        DuplicateOid,
    };

    ModelError(Code code, std::string message)
        : std::runtime_error(std::move(message)), code(code) {}

    Code code;
};

/// Removes the object at `loc` from `set`, returning the remaining set and
/// the removed node (with its whole subtree). Everything else, including
/// collection order, is untouched. Throws ModelError{LocationNotFound} when
/// the location does not resolve.
std::pair<ObjectSet, ObjectNode> extract(const ObjectSet& set, const Location& loc);

/// Puts `object` into `set` at `loc`. New members join at the end of the
/// parent collection; a node that was extracted earlier returns to its
/// previous position (its slot is retained). When the slot is already
/// occupied by an object with the same identifier, the set is returned
/// unchanged. Throws ModelError{OidMismatch} when loc.target differs from
/// object.oid and ModelError{LocationNotInsertable} when the parent path or
/// containment property is missing.
ObjectSet insert(const ObjectSet& set, ObjectNode object, const Location& loc);

/// True when the location resolves to an object inside `set`.
bool resolves(const ObjectSet& set, const Location& loc);

/// The location map of every object in the set. Throws
/// ModelError{DuplicateOid} when two objects share an identifier.
std::map<Oid, Location> locations(const ObjectSet& set);

/// Every object identifier occurring in the node's subtree, including its own.
std::set<Oid> subtreeOids(const ObjectNode& node);

/// All object identifiers occurring in the set.
std::set<Oid> allOids(const ObjectSet& set);

/// True when no reference collection outside `object`'s own subtree mentions
/// any identifier of that subtree. `object` is matched inside `set` by oid.
bool isolated(const ObjectNode& object, const ObjectSet& set);

/// Gives `node` a slot one past the collection's current maximum, so it
/// orders after every existing member.
void assignSlotAtEnd(ObjectNode& node, const std::vector<ObjectNode>& collection);

/// Inserts `node` into `collection` by its slot (stable: after equal slots).
void insertBySlot(std::vector<ObjectNode>& collection, ObjectNode node);

} // namespace fmadsl
