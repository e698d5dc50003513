#include "fma/typesys.hpp"

#include <algorithm>

namespace fmadsl {

namespace {

// Memo entries pair a class of the left metamodel with a class of the right
// one, so they are side-tagged by position.
using SubtypeMemo = std::set<std::pair<std::string, std::string>>;

/// Fields of an object type sorted by name, so the two sides can be walked
/// head to head.
std::vector<const ObjectType::Field*> sortedFields(const ObjectType& t) {
    std::vector<const ObjectType::Field*> out;
    out.reserve(t.fields.size());
    for (const auto& f : t.fields) out.push_back(&f);
    std::sort(out.begin(), out.end(),
              [](const ObjectType::Field* a, const ObjectType::Field* b) {
                  return a->name < b->name;
              });
    return out;
}

bool classKnown(const ModelType& mm, const ClassRef& c) {
    return !c.isNamed() || mm.hasClass(c.name);
}

bool subtypeOfRec(const ModelType& mm1, const ModelType& mm2, const ObjectType& s1,
                  const ObjectType& s2, SubtypeMemo& memo);

/// Decides one (class-valued) field pair, growing the memo for the
/// recursive class comparison.
bool fieldClassOk(const ModelType& mm1, const ModelType& mm2, const ClassRef& c1,
                  const ClassRef& c2, SubtypeMemo& memo) {
    if (c1.isAny() || c1.isBottom() || c2.isAny()) return true;
    if (c2.isBottom()) return false;
    if (!classKnown(mm1, c1) || !classKnown(mm2, c2)) return false;
    if (memo.count({c1.name, c2.name})) return true;
    memo.insert({c1.name, c2.name});
    return subtypeOfRec(mm1, mm2, mm1.classType(c1), mm2.classType(c2), memo);
}

bool subtypeOfRec(const ModelType& mm1, const ModelType& mm2, const ObjectType& s1,
                  const ObjectType& s2, SubtypeMemo& memo) {
    if (s2.isEmpty()) return true;
    if (s1.isEmpty()) return false;
    if (s1.isBottom()) return true;
    if (s2.isBottom()) return false;

    auto left = sortedFields(s1);
    auto right = sortedFields(s2);
    std::size_t i = 0, j = 0;
    while (j < right.size()) {
        if (i >= left.size()) return false;
        const auto& f1 = *left[i];
        const auto& f2 = *right[j];
        if (f1.name != f2.name || f1.type.kind != f2.type.kind) {
            // A field of s1 that s2 does not require is skipped; a required
            // field s1 cannot supply fails.
            if (f1.name > f2.name) return false;
            ++i;
            continue;
        }
        switch (f1.type.kind) {
            case FieldType::Kind::Attr:
                if (f1.type.base != f2.type.base) return false;
                break;
            case FieldType::Kind::Ref:
            case FieldType::Kind::Cmt:
                if (!fieldClassOk(mm1, mm2, f1.type.cls, f2.type.cls, memo)) return false;
                break;
        }
        ++i;
        ++j;
    }
    return true;
}

} // namespace

bool subtypeOf(const ModelType& mm, const ObjectType& s1, const ObjectType& s2) {
    SubtypeMemo memo;
    return subtypeOfRec(mm, mm, s1, s2, memo);
}

bool subtypeOfCross(const ModelType& mm1, const ModelType& mm2, const ObjectType& s1,
                    const ObjectType& s2) {
    SubtypeMemo memo;
    return subtypeOfRec(mm1, mm2, s1, s2, memo);
}

bool modelSubtype(const ModelType& mm1, const ModelType& mm2) {
    return subtypeOfCross(mm1, mm2, mm1.classType(mm1.root()), mm2.classType(mm2.root()));
}

bool refines(const ModelType& mm, const ObjectType& inferred, const ObjectType& declared) {
    if (inferred.kind == ObjectType::Kind::Fields) {
        for (const auto& f : inferred.fields)
            if (!declared.find(f.name)) return false;
    }
    return subtypeOf(mm, inferred, declared);
}

namespace {

struct Inferrer {
    const ModelType& mm;
    const TypeEnvOids& pi;

    std::optional<TypeError> error;

    void fail(std::string rule, std::string path, std::string message) {
        if (!error) error = TypeError{std::move(rule), std::move(path), std::move(message)};
    }

    std::optional<std::string> classOf(const Oid& o, const std::string& path) {
        auto it = pi.find(o);
        if (it == pi.end()) {
            fail("T-Ref", path, "object '" + o + "' has no typing entry");
            return std::nullopt;
        }
        if (!mm.hasClass(it->second)) {
            fail("T-Ref", path, "object '" + o + "' is typed by unknown class '" +
                                    it->second + "'");
            return std::nullopt;
        }
        return it->second;
    }

    /// Collection typing: combines an element class with the class of the
    /// rest of the collection, trying the three rules in order.
    ClassRef combine(const ClassRef& c, const ClassRef& rest) {
        const ObjectType& t1 = mm.classType(c);
        const ObjectType& t2 = mm.classType(rest);
        if (subtypeOf(mm, t1, t2)) return rest; // T-Ref1 / T-Obj1
        if (subtypeOf(mm, t2, t1)) return c;    // T-Ref2 / T-Obj2
        return mm.meet(c, rest);                // T-Ref3 / T-Obj3
    }

    std::optional<ClassRef> refCollection(const std::vector<Oid>& ids,
                                          const std::string& path) {
        ClassRef acc = ClassRef::bottom(); // T-RefAny: ref(empty) : ref Bottom
        for (auto it = ids.rbegin(); it != ids.rend(); ++it) {
            auto c = classOf(*it, path);
            if (!c) return std::nullopt;
            acc = combine(ClassRef::named(*c), acc);
        }
        return acc;
    }

    std::optional<ClassRef> objectSet(const ObjectSet& os, const std::string& path) {
        ClassRef acc = ClassRef::bottom(); // T-ObjectAny: empty set : Bottom
        for (auto it = os.rbegin(); it != os.rend(); ++it) {
            auto c = object(*it, path);
            if (!c) return std::nullopt;
            acc = combine(*c, acc);
        }
        return acc;
    }

    std::optional<ClassRef> object(const ObjectNode& node, const std::string& path) {
        std::string here = path.empty() ? node.oid : path + "." + node.oid;
        auto c = classOf(node.oid, here);
        if (!c) return std::nullopt;
        auto inferred = propertySet(node.props, here);
        if (!inferred) return std::nullopt;
        const ObjectType& declared = mm.classType(*c);
        if (!refines(mm, *inferred, declared)) {
            fail("T-Obj", here,
                 "inferred type " + inferred->str() + " does not refine " +
                     declared.str() + " of class '" + *c + "'");
            return std::nullopt;
        }
        return ClassRef::named(*c);
    }

    std::optional<ObjectType> propertySet(const std::vector<PropertyBinding>& props,
                                          const std::string& path) {
        if (props.empty()) return ObjectType::empty(); // T-PropEmpty
        std::vector<ObjectType::Field> fields;
        for (const auto& p : props) {
            std::string here = path + "." + p.name;
            for (const auto& f : fields)
                if (f.name == p.name) {
                    fail("T-Prop", here, "duplicate property '" + p.name + "'");
                    return std::nullopt;
                }
            if (p.isAttr()) {
                fields.push_back(
                    {p.name, FieldType::attr(std::get<Value>(p.payload).type())});
            } else if (p.isRefs()) {
                auto c = refCollection(std::get<RefSet>(p.payload).ids, here);
                if (!c) return std::nullopt;
                fields.push_back({p.name, FieldType::ref(*c)});
            } else {
                auto c = objectSet(std::get<CmtSet>(p.payload).children, here);
                if (!c) return std::nullopt;
                fields.push_back({p.name, FieldType::cmt(*c)});
            }
        }
        return ObjectType::withFields(std::move(fields));
    }
};

} // namespace

InferResult inferType(const ModelType& mm, const TypeEnvVars& gamma,
                      const TypeEnvOids& pi, const Term& term) {
    (void)gamma; // model terms contain no variables
    Inferrer inf{mm, pi, std::nullopt};

    if (const auto* v = std::get_if<Value>(&term))
        return InferredType{ScalarType::baseType(v->type())}; // T-Base

    if (const auto* r = std::get_if<RefCollection>(&term)) {
        auto c = inf.refCollection(r->ids, "");
        if (!c) return *inf.error;
        return InferredType{ScalarType::refTo(*c)};
    }
    if (const auto* n = std::get_if<ObjectNode>(&term)) {
        auto c = inf.object(*n, "");
        if (!c) return *inf.error;
        return InferredType{*c};
    }
    if (const auto* os = std::get_if<ObjectSet>(&term)) {
        auto c = inf.objectSet(*os, "");
        if (!c) return *inf.error;
        return InferredType{*c};
    }
    const auto& ps = std::get<PropertySetTerm>(term);
    auto t = inf.propertySet(ps.props, "");
    if (!t) return *inf.error;
    return InferredType{*t};
}

ConformanceResult conformsDiag(const ModelType& mm, const StructuredModel& model) {
    TypeEnvOids pi(model.typing.begin(), model.typing.end());
    InferResult r = inferType(mm, {}, pi, Term{model.roots});
    if (const auto* err = std::get_if<TypeError>(&r)) return {false, *err};
    const auto& c = std::get<ClassRef>(std::get<InferredType>(r));
    if (!subtypeOf(mm, mm.classType(c), mm.classType(mm.root())))
        return {false,
                TypeError{"T-Obj", "",
                          "root type '" + c.str() + "' does not subsume under root class '" +
                              mm.root() + "'"}};
    return {true, std::nullopt};
}

bool conforms(const ModelType& mm, const StructuredModel& model) {
    return conformsDiag(mm, model).ok;
}

std::string inferredTypeStr(const InferredType& t) {
    if (const auto* s = std::get_if<ScalarType>(&t)) return s->str();
    if (const auto* c = std::get_if<ClassRef>(&t)) return c->str();
    return std::get<ObjectType>(t).str();
}

} // namespace fmadsl
