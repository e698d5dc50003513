#include "fma/model.hpp"

#include <algorithm>

namespace fmadsl {

bool RefSet::contains(const Oid& o) const {
    return std::find(ids.begin(), ids.end(), o) != ids.end();
}

void RefSet::add(const Oid& o) {
    if (!contains(o)) ids.push_back(o);
}

bool RefSet::remove(const Oid& o) {
    auto it = std::find(ids.begin(), ids.end(), o);
    if (it == ids.end()) return false;
    ids.erase(it);
    return true;
}

bool CmtSet::contains(const Oid& o) const { return find(o) != nullptr; }

const ObjectNode* CmtSet::find(const Oid& o) const {
    for (const auto& c : children)
        if (c.oid == o) return &c;
    return nullptr;
}

bool operator==(const CmtSet& a, const CmtSet& b) { return a.children == b.children; }

const PropertyBinding* ObjectNode::findProp(const std::string& name) const {
    for (const auto& p : props)
        if (p.name == name) return &p;
    return nullptr;
}

PropertyBinding* ObjectNode::findProp(const std::string& name) {
    for (auto& p : props)
        if (p.name == name) return &p;
    return nullptr;
}

std::optional<Oid> Location::container() const {
    if (steps.empty()) return std::nullopt;
    return steps.back().owner;
}

Location Location::child(const std::string& prop, Oid oid) const {
    Location l;
    l.steps = steps;
    l.steps.push_back(Step{target, prop});
    l.target = std::move(oid);
    return l;
}

std::string Location::str() const {
    std::string out;
    for (const auto& s : steps) {
        out += s.owner;
        out += '.';
        out += s.prop;
        out += '.';
    }
    out += target;
    return out;
}

bool isAncestorOrSelf(const Location& outer, const Location& inner) {
    if (outer == inner) return true;
    if (inner.steps.size() <= outer.steps.size()) return false;
    for (std::size_t i = 0; i < outer.steps.size(); ++i)
        if (inner.steps[i] != outer.steps[i]) return false;
    return inner.steps[outer.steps.size()].owner == outer.target;
}

namespace {

std::vector<ObjectNode>* walkToCollection(ObjectSet& set, const Location& loc,
                                          bool forInsert) {
    std::vector<ObjectNode>* coll = &set;
    for (const auto& step : loc.steps) {
        ObjectNode* owner = nullptr;
        for (auto& n : *coll)
            if (n.oid == step.owner) {
                owner = &n;
                break;
            }
        if (!owner) return nullptr;
        auto* prop = owner->findProp(step.prop);
        if (!prop || !prop->isCmts()) return nullptr;
        coll = &std::get<CmtSet>(prop->payload).children;
    }
    (void)forInsert;
    return coll;
}

void collectOids(const ObjectNode& node, std::set<Oid>& out) {
    out.insert(node.oid);
    for (const auto& p : node.props)
        if (p.isCmts())
            for (const auto& c : std::get<CmtSet>(p.payload).children) collectOids(c, out);
}

void walkLocations(const ObjectNode& node, const Location& loc,
                   std::map<Oid, Location>& out) {
    if (!out.emplace(node.oid, loc).second)
        throw ModelError(ModelError::Code::DuplicateOid,
                         "duplicate object identifier '" + node.oid + "'");
    for (const auto& p : node.props)
        if (p.isCmts())
            for (const auto& c : std::get<CmtSet>(p.payload).children)
                walkLocations(c, loc.child(p.name, c.oid), out);
}

/// Scans reference collections of `node`'s subtree, skipping the subtree
/// rooted at `skip` (by identifier); true when some reference hits `targets`.
bool referencesInto(const ObjectNode& node, const Oid& skip,
                    const std::set<Oid>& targets) {
    if (node.oid == skip) return false;
    for (const auto& p : node.props) {
        if (p.isRefs()) {
            for (const auto& id : std::get<RefSet>(p.payload).ids)
                if (targets.count(id)) return true;
        } else if (p.isCmts()) {
            for (const auto& c : std::get<CmtSet>(p.payload).children)
                if (referencesInto(c, skip, targets)) return true;
        }
    }
    return false;
}

} // namespace

std::pair<ObjectSet, ObjectNode> extract(const ObjectSet& set, const Location& loc) {
    ObjectSet copy = set;
    auto* coll = walkToCollection(copy, loc, false);
    if (!coll)
        throw ModelError(ModelError::Code::LocationNotFound,
                         "location '" + loc.str() + "' does not resolve");
    for (auto it = coll->begin(); it != coll->end(); ++it) {
        if (it->oid == loc.target) {
            ObjectNode node = std::move(*it);
            coll->erase(it);
            return {std::move(copy), std::move(node)};
        }
    }
    throw ModelError(ModelError::Code::LocationNotFound,
                     "no object '" + loc.target + "' at location '" + loc.str() + "'");
}

ObjectSet insert(const ObjectSet& set, ObjectNode object, const Location& loc) {
    if (object.oid != loc.target)
        throw ModelError(ModelError::Code::OidMismatch,
                         "object '" + object.oid + "' does not match location target '" +
                             loc.target + "'");
    ObjectSet copy = set;
    auto* coll = walkToCollection(copy, loc, true);
    if (!coll)
        throw ModelError(ModelError::Code::LocationNotInsertable,
                         "no containment at '" + loc.str() + "'");
    for (const auto& n : *coll)
        if (n.oid == object.oid) return copy;
    insertBySlot(*coll, std::move(object));
    return copy;
}

bool resolves(const ObjectSet& set, const Location& loc) {
    ObjectSet copy = set;
    auto* coll = walkToCollection(copy, loc, false);
    if (!coll) return false;
    for (const auto& n : *coll)
        if (n.oid == loc.target) return true;
    return false;
}

std::map<Oid, Location> locations(const ObjectSet& set) {
    std::map<Oid, Location> out;
    for (const auto& root : set) {
        Location l;
        l.target = root.oid;
        walkLocations(root, l, out);
    }
    return out;
}

std::set<Oid> subtreeOids(const ObjectNode& node) {
    std::set<Oid> out;
    collectOids(node, out);
    return out;
}

std::set<Oid> allOids(const ObjectSet& set) {
    std::set<Oid> out;
    for (const auto& n : set) collectOids(n, out);
    return out;
}

bool isolated(const ObjectNode& object, const ObjectSet& set) {
    std::set<Oid> targets = subtreeOids(object);
    for (const auto& root : set)
        if (referencesInto(root, object.oid, targets)) return false;
    return true;
}

void assignSlotAtEnd(ObjectNode& node, const std::vector<ObjectNode>& collection) {
    std::uint64_t maxSlot = 0;
    for (const auto& n : collection) maxSlot = std::max(maxSlot, n.slot + 1);
    node.slot = maxSlot;
}

void insertBySlot(std::vector<ObjectNode>& collection, ObjectNode node) {
    auto it = std::find_if(collection.begin(), collection.end(),
                           [&](const ObjectNode& n) { return n.slot > node.slot; });
    collection.insert(it, std::move(node));
}

} // namespace fmadsl
