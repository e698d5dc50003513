#include "fma/metamodel.hpp"

#include <algorithm>

#include "fma/typesys.hpp"

namespace fmadsl {

std::string ClassRef::str() const {
    switch (kind) {
        case Kind::Named: return name;
        case Kind::Any: return "Any";
        case Kind::Bottom: return "Bottom";
    }
    return "?";
}

std::string FieldType::str() const {
    switch (kind) {
        case Kind::Attr: return baseTypeName(base);
        case Kind::Ref: return "ref " + cls.str();
        case Kind::Cmt: return cls.str();
    }
    return "?";
}

const FieldType* ObjectType::find(const std::string& name) const {
    for (const auto& f : fields)
        if (f.name == name) return &f.type;
    return nullptr;
}

std::string ObjectType::str() const {
    if (kind == Kind::Empty) return "{}";
    if (kind == Kind::Bottom) return "Bottom";
    std::string out = "{";
    bool first = true;
    for (const auto& f : fields) {
        if (!first) out += ", ";
        first = false;
        out += f.name + ": " + f.type.str();
    }
    out += "}";
    return out;
}

std::string ScalarType::str() const {
    switch (kind) {
        case Kind::Base: return baseTypeName(base);
        case Kind::Ref: return "ref " + cls.str();
        case Kind::Unit: return "()";
        case Kind::ActUnit: return ".";
    }
    return "?";
}

std::string ReferenceEnd::str() const {
    return std::string(kind == Kind::Ref ? "bRE" : "bCE") + "(" + owner + ", " + prop + ")";
}

const ObjectType& ModelType::classType(const ClassRef& c) const {
    switch (c.kind) {
        case ClassRef::Kind::Any: return emptyType_;
        case ClassRef::Kind::Bottom: return bottomType_;
        case ClassRef::Kind::Named: return classType(c.name);
    }
    return emptyType_;
}

const ObjectType& ModelType::classType(const std::string& name) const {
    if (name == "Any") return emptyType_;
    auto it = cl_.find(name);
    if (it == cl_.end())
        throw MetamodelError(MetamodelError::Code::UnknownClass,
                             "unknown class '" + name + "'");
    return it->second;
}

const FieldType* ModelType::fieldOf(const std::string& c, const std::string& prop) const {
    auto it = cl_.find(c);
    if (it == cl_.end()) return nullptr;
    return it->second.find(prop);
}

std::vector<PropertyBinding> ModelType::defaultProps(
    const std::string& c,
    const std::optional<std::pair<Oid, std::string>>& container) const {
    const ObjectType& type = classType(c);
    std::vector<PropertyBinding> out;
    out.reserve(type.fields.size());
    for (const auto& f : type.fields) {
        PropertyBinding b;
        b.name = f.name;
        switch (f.type.kind) {
            case FieldType::Kind::Attr:
                b.payload = Value::defaultOf(f.type.base);
                break;
            case FieldType::Kind::Ref: {
                RefSet rs;
                if (container && container->second == f.name) rs.ids.push_back(container->first);
                b.payload = std::move(rs);
                break;
            }
            case FieldType::Kind::Cmt:
                b.payload = CmtSet{};
                break;
        }
        out.push_back(std::move(b));
    }
    return out;
}

std::optional<ReferenceEnd> ModelType::opposite(const ReferenceEnd& end) const {
    auto direct = oe_.find(end);
    if (direct != oe_.end()) return direct->second;
    // The end may be inherited: resolve through the subclass closure to the
    // superclass that declares it.
    for (const auto& [e, opp] : oe_) {
        if (e.kind == end.kind && e.prop == end.prop && e.owner != end.owner &&
            isSubclass(end.owner, e.owner))
            return opp;
    }
    return std::nullopt;
}

bool ModelType::isSubclass(const std::string& sub, const std::string& super) const {
    return sr_.count({sub, super}) != 0;
}

std::vector<std::string> ModelType::subclassesOf(const std::string& c) const {
    std::vector<std::string> out;
    for (const auto& name : classOrder_)
        if (isSubclass(name, c)) out.push_back(name);
    return out;
}

ClassRef ModelType::meet(const ClassRef& a, const ClassRef& b) const {
    if (a.isAny() || b.isAny()) return ClassRef::any();
    if (a.isBottom()) return b;
    if (b.isBottom()) return a;
    if (a == b) return a;

    std::vector<std::string> common;
    for (const auto& c : classOrder_)
        if (isSubclass(a.name, c) && isSubclass(b.name, c)) common.push_back(c);
    if (common.empty()) return ClassRef::any();

    // Minimal common supertypes: keep those with no other candidate strictly
    // below them, then prefer the most informative (most fields), breaking
    // ties by class name.
    std::vector<std::string> minimal;
    for (const auto& c : common) {
        bool hasLower = false;
        for (const auto& other : common)
            if (other != c && isSubclass(other, c)) {
                hasLower = true;
                break;
            }
        if (!hasLower) minimal.push_back(c);
    }
    const std::string* best = nullptr;
    std::size_t bestFields = 0;
    for (const auto& c : minimal) {
        std::size_t n = classType(c).fields.size();
        if (!best || n > bestFields || (n == bestFields && c < *best)) {
            best = &c;
            bestFields = n;
        }
    }
    return ClassRef::named(*best);
}

namespace {

const MetamodelDoc::Class* findClass(const MetamodelDoc& doc, const std::string& name) {
    for (const auto& c : doc.classes)
        if (c.name == name) return &c;
    return nullptr;
}

void flatten(const MetamodelDoc& doc, const std::string& name,
             std::map<std::string, ObjectType>& done, std::set<std::string>& visiting) {
    if (done.count(name)) return;
    if (!visiting.insert(name).second)
        throw MetamodelError(MetamodelError::Code::CyclicInheritance,
                             "cyclic inheritance through '" + name + "'");
    const auto* cls = findClass(doc, name);
    if (!cls)
        throw MetamodelError(MetamodelError::Code::UnknownClass,
                             "unknown supertype '" + name + "'");

    std::vector<ObjectType::Field> fields;
    auto place = [&](const std::string& fname, const FieldType& ftype) {
        for (auto& f : fields) {
            if (f.name != fname) continue;
            if (f.type == ftype) return;
            // A redeclaration must refine: same kind, and for references or
            // containments a class declared lower in the hierarchy.
            bool ok = f.type.kind == ftype.kind && f.type.kind != FieldType::Kind::Attr;
            if (ok) f.type = ftype;
            else
                throw MetamodelError(MetamodelError::Code::BadDocument,
                                     "conflicting declarations of field '" + fname +
                                         "' reaching class '" + name + "'");
            return;
        }
        fields.push_back({fname, ftype});
    };

    for (const auto& super : cls->supertypes) {
        flatten(doc, super, done, visiting);
        for (const auto& f : done.at(super).fields) place(f.name, f.type);
    }
    for (const auto& p : cls->properties) place(p.name, p.type);

    visiting.erase(name);
    done.emplace(name, ObjectType::withFields(std::move(fields)));
}

} // namespace

ModelType buildMetamodel(const MetamodelDoc& doc) {
    ModelType mm;
    mm.name_ = doc.name;
    mm.root_ = doc.root;

    std::set<std::string> seen;
    for (const auto& c : doc.classes) {
        if (!seen.insert(c.name).second)
            throw MetamodelError(MetamodelError::Code::DuplicateClass,
                                 "class '" + c.name + "' declared twice");
        mm.classOrder_.push_back(c.name);
        if (c.abstract_) mm.abstract_.insert(c.name);
    }
    if (!seen.count(doc.root))
        throw MetamodelError(MetamodelError::Code::UnknownRoot,
                             "root class '" + doc.root + "' is not declared");

    // Field target classes must exist.
    for (const auto& c : doc.classes)
        for (const auto& p : c.properties)
            if (p.type.kind != FieldType::Kind::Attr) {
                if (!p.type.cls.isNamed() || !seen.count(p.type.cls.name))
                    throw MetamodelError(MetamodelError::Code::UnknownClass,
                                         "field '" + c.name + "." + p.name +
                                             "' points to an unknown class");
            }

    // Flatten inherited fields so subtyping is purely structural afterwards.
    std::map<std::string, ObjectType> flat;
    std::set<std::string> visiting;
    for (const auto& c : doc.classes) flatten(doc, c.name, flat, visiting);
    mm.cl_ = std::move(flat);

    // cl must be injective: Lemma-style unique typing relies on it.
    std::map<ObjectType, std::string> inverse;
    for (const auto& [c, t] : mm.cl_) {
        auto [it, fresh] = inverse.emplace(t, c);
        if (!fresh)
            throw MetamodelError(MetamodelError::Code::NonInjectiveCl,
                                 "classes '" + it->second + "' and '" + c +
                                     "' have identical object types");
    }

    // Reflexive-transitive subclass closure over the declared pairs.
    for (const auto& c : doc.classes) {
        mm.sr_.insert({c.name, c.name});
        for (const auto& s : c.supertypes) mm.sr_.insert({c.name, s});
    }
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<std::pair<std::string, std::string>> add;
        for (const auto& [a, b] : mm.sr_)
            for (const auto& [c, d] : mm.sr_)
                if (b == c && !mm.sr_.count({a, d})) add.push_back({a, d});
        for (auto& p : add) {
            mm.sr_.insert(std::move(p));
            changed = true;
        }
    }

    // Opposite ends. Each declared opposite is resolved against the target
    // class, normalized to the class that declares the property.
    auto declaringClass = [&](const std::string& start,
                              const std::string& prop) -> const MetamodelDoc::Class* {
        const auto* cls = findClass(doc, start);
        std::vector<const MetamodelDoc::Class*> queue{cls};
        while (!queue.empty()) {
            const auto* cur = queue.back();
            queue.pop_back();
            for (const auto& p : cur->properties)
                if (p.name == prop) return cur;
            for (auto it = cur->supertypes.rbegin(); it != cur->supertypes.rend(); ++it)
                queue.push_back(findClass(doc, *it));
        }
        return nullptr;
    };
    auto endOf = [&](const std::string& cls, const MetamodelDoc::Property& p) {
        return p.type.kind == FieldType::Kind::Cmt ? ReferenceEnd::cmtEnd(cls, p.name)
                                                   : ReferenceEnd::refEnd(cls, p.name);
    };

    for (const auto& c : doc.classes) {
        for (const auto& p : c.properties) {
            if (!p.opposite) continue;
            if (p.type.kind == FieldType::Kind::Attr)
                throw MetamodelError(MetamodelError::Code::BadDocument,
                                     "attribute '" + c.name + "." + p.name +
                                         "' cannot declare an opposite");
            const std::string& target = p.type.cls.name;
            const auto* decl = declaringClass(target, *p.opposite);
            if (!decl)
                throw MetamodelError(MetamodelError::Code::NonInvolutiveOpposite,
                                     "opposite '" + target + "." + *p.opposite +
                                         "' of '" + c.name + "." + p.name +
                                         "' is not declared");
            const MetamodelDoc::Property* oppProp = nullptr;
            for (const auto& q : decl->properties)
                if (q.name == *p.opposite) oppProp = &q;
            ReferenceEnd e1 = endOf(c.name, p);
            ReferenceEnd e2 = endOf(decl->name, *oppProp);
            if (e1.kind == ReferenceEnd::Kind::Cmt && e2.kind == ReferenceEnd::Kind::Cmt)
                throw MetamodelError(MetamodelError::Code::CmtOppositeCmt,
                                     "containment ends " + e1.str() + " and " + e2.str() +
                                         " cannot be opposites");
            if (e1 == e2)
                throw MetamodelError(MetamodelError::Code::NonInvolutiveOpposite,
                                     "end " + e1.str() + " cannot be its own opposite");
            auto [it, fresh] = mm.oe_.emplace(e1, e2);
            if (!fresh && it->second != e2)
                throw MetamodelError(MetamodelError::Code::NonInvolutiveOpposite,
                                     "end " + e1.str() + " has two opposites");
        }
    }
    for (const auto& [e1, e2] : mm.oe_) {
        auto back = mm.oe_.find(e2);
        if (back == mm.oe_.end() || back->second != e1)
            throw MetamodelError(MetamodelError::Code::NonInvolutiveOpposite,
                                 "opposite of " + e1.str() + " is not involutive");
    }

    // Flattening guarantee: every declared subclass pair is also a
    // structural subtype pair.
    for (const auto& [sub, super] : mm.sr_)
        if (!subtypeOf(mm, mm.classType(sub), mm.classType(super)))
            throw MetamodelError(MetamodelError::Code::BadDocument,
                                 "declared subclass '" + sub +
                                     "' is not a structural subtype of '" + super + "'");

    return mm;
}

} // namespace fmadsl
