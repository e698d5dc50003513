#include "fma/testkit.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "fma/typecheck.hpp"
#include "fma/typesys.hpp"

namespace fmadsl::testkit {

namespace {

struct FlatObject {
    Oid oid;
    std::string cls;
    const ObjectNode* node;
};

void flattenInto(const ObjectNode& node, const std::map<Oid, std::string>& typing,
                 std::vector<FlatObject>& out) {
    auto it = typing.find(node.oid);
    out.push_back({node.oid, it == typing.end() ? std::string{} : it->second, &node});
    for (const auto& p : node.props)
        if (p.isCmts())
            for (const auto& c : std::get<CmtSet>(p.payload).children)
                flattenInto(c, typing, out);
}

/// End resolution done from the raw opposite table and subclass pairs, kept
/// separate from the metamodel's own lookup.
std::optional<ReferenceEnd> rawOpposite(const ModelType& mm, ReferenceEnd::Kind kind,
                                        const std::string& cls, const std::string& prop) {
    for (const auto& [e, opp] : mm.oppositeTable()) {
        if (e.kind != kind || e.prop != prop) continue;
        if (mm.subclassPairs().count({cls, e.owner})) return opp;
    }
    return std::nullopt;
}

} // namespace

ValidityReport oracleValidate(const StructuredModel& model, const ModelType& mm) {
    std::vector<FlatObject> objects;
    for (const auto& r : model.roots) flattenInto(r, model.typing, objects);

    for (const auto& o : objects) {
        if (o.cls.empty() || !mm.hasClass(o.cls))
            throw MetamodelError(MetamodelError::Code::UnknownClass,
                                 "object '" + o.oid + "' has no known class");
    }

    auto findObject = [&](const Oid& id) -> const FlatObject* {
        for (const auto& o : objects)
            if (o.oid == id) return &o;
        return nullptr;
    };

    std::set<Violation> found;
    for (const auto& o : objects) {
        for (const auto& p : o.node->props) {
            if (p.isRefs()) {
                for (const auto& id : std::get<RefSet>(p.payload).ids) {
                    const FlatObject* target = findObject(id);
                    if (!target) {
                        found.insert({ViolationKind::DanglingReference, id, p.name});
                        continue;
                    }
                    auto opp = rawOpposite(mm, ReferenceEnd::Kind::Ref, o.cls, p.name);
                    if (!opp) continue;
                    bool back = false;
                    for (const auto& tp : target->node->props) {
                        if (tp.name != opp->prop) continue;
                        if (opp->kind == ReferenceEnd::Kind::Ref && tp.isRefs()) {
                            for (const auto& bid : std::get<RefSet>(tp.payload).ids)
                                if (bid == o.oid) back = true;
                        } else if (opp->kind == ReferenceEnd::Kind::Cmt && tp.isCmts()) {
                            for (const auto& ch : std::get<CmtSet>(tp.payload).children)
                                if (ch.oid == o.oid) back = true;
                        }
                    }
                    if (!back)
                        found.insert({ViolationKind::InconsistentOpposite, id, opp->prop});
                }
            } else if (p.isCmts()) {
                auto opp = rawOpposite(mm, ReferenceEnd::Kind::Cmt, o.cls, p.name);
                if (!opp) continue;
                for (const auto& ch : std::get<CmtSet>(p.payload).children) {
                    bool back = false;
                    for (const auto& tp : ch.props) {
                        if (tp.name != opp->prop || !tp.isRefs()) continue;
                        for (const auto& bid : std::get<RefSet>(tp.payload).ids)
                            if (bid == o.oid) back = true;
                    }
                    if (!back)
                        found.insert(
                            {ViolationKind::InconsistentOpposite, ch.oid, opp->prop});
                }
            }
        }
    }

    ValidityReport report;
    report.violations.assign(found.begin(), found.end());
    report.ok = report.violations.empty();
    return report;
}

// ---------------------------------------------------------------------------
// Generation

namespace {

struct Rng {
    std::mt19937_64 engine;

    explicit Rng(std::uint64_t seed) : engine(seed) {}

    std::uint64_t below(std::uint64_t n) { return n == 0 ? 0 : engine() % n; }

    template <typename T>
    const T& pick(const std::vector<T>& xs) {
        return xs[static_cast<std::size_t>(below(xs.size()))];
    }

    bool chance(unsigned percent) { return below(100) < percent; }
};

Value randomValueOf(BaseType b, Rng& rng) {
    switch (b) {
        case BaseType::String: {
            static const char* words[] = {"alpha", "beta", "gamma", "delta", "epsilon",
                                          "zeta",  "eta",  "theta", "iota",  "kappa"};
            return Value(std::string(words[rng.below(10)]));
        }
        case BaseType::Integer: return Value(static_cast<std::int64_t>(rng.below(100)));
        case BaseType::Boolean: return Value(rng.below(2) == 1);
    }
    return Value(std::string{});
}

/// Concrete classes in the declared-subclass cone of `cls`.
std::vector<std::string> concreteSubclasses(const ModelType& mm, const std::string& cls) {
    std::vector<std::string> out;
    for (const auto& c : mm.subclassesOf(cls))
        if (!mm.isAbstract(c)) out.push_back(c);
    return out;
}

struct ModelBuilder {
    const ModelType& mm;
    const GenSpec& spec;
    Rng rng;
    StructuredModel model;
    std::size_t objects = 0;
    std::uint64_t nextId = 0;

    ModelBuilder(const ModelType& mm, const GenSpec& spec)
        : mm(mm), spec(spec), rng(spec.seed) {}

    Oid freshOid() { return "o" + std::to_string(nextId++); }

    ObjectNode makeObject(const std::string& cls, std::size_t depth,
                          const std::optional<std::pair<Oid, std::string>>& container) {
        ObjectNode node;
        node.oid = freshOid();
        model.typing[node.oid] = cls;
        ++objects;
        for (const auto& f : mm.classType(cls).fields) {
            PropertyBinding b;
            b.name = f.name;
            switch (f.type.kind) {
                case FieldType::Kind::Attr:
                    b.payload = randomValueOf(f.type.base, rng);
                    break;
                case FieldType::Kind::Ref: {
                    RefSet rs;
                    if (container && container->second == f.name)
                        rs.ids.push_back(container->first);
                    b.payload = std::move(rs);
                    break;
                }
                case FieldType::Kind::Cmt: {
                    CmtSet cs;
                    if (depth < spec.maxDepth) {
                        auto targets = concreteSubclasses(mm, f.type.cls.name);
                        std::uint64_t n = rng.below(3);
                        for (std::uint64_t i = 0; i < n && objects < spec.maxObjects; ++i) {
                            if (targets.empty()) break;
                            const std::string& childCls = rng.pick(targets);
                            // A bidirectional containment initializes the
                            // child's container pointer.
                            auto opp = mm.opposite(ReferenceEnd::cmtEnd(cls, f.name));
                            std::optional<std::pair<Oid, std::string>> childContainer;
                            if (opp) childContainer = {node.oid, opp->prop};
                            ObjectNode child =
                                makeObject(childCls, depth + 1, childContainer);
                            child.slot = i;
                            cs.children.push_back(std::move(child));
                        }
                    }
                    b.payload = std::move(cs);
                    break;
                }
            }
            node.props.push_back(std::move(b));
        }
        return node;
    }

    /// Wires non-container reference fields to compatible targets, keeping
    /// declared opposites consistent in the same step.
    void wireReferences() {
        std::vector<FlatObject> flat;
        for (const auto& r : model.roots) flattenInto(r, model.typing, flat);

        struct Link {
            Oid from;
            std::string prop;
            Oid to;
            std::optional<ReferenceEnd> opp;
        };
        std::vector<Link> links;
        for (const auto& o : flat) {
            for (const auto& f : mm.classType(o.cls).fields) {
                if (f.type.kind != FieldType::Kind::Ref) continue;
                auto opp = mm.opposite(ReferenceEnd::refEnd(o.cls, f.name));
                if (opp && opp->kind == ReferenceEnd::Kind::Cmt)
                    continue; // container pointers are containment-managed
                std::vector<Oid> candidates;
                for (const auto& t : flat)
                    if (mm.isSubclass(t.cls, f.type.cls.name)) candidates.push_back(t.oid);
                if (candidates.empty()) continue;
                std::uint64_t n = rng.below(3);
                for (std::uint64_t i = 0; i < n; ++i)
                    links.push_back(
                        {o.oid, f.name, candidates[rng.below(candidates.size())], opp});
            }
        }
        for (const auto& link : links) {
            ObjectNode* from = findMutable(link.from);
            auto* b = from->findProp(link.prop);
            std::get<RefSet>(b->payload).add(link.to);
            if (link.opp) {
                ObjectNode* to = findMutable(link.to);
                auto* back = to->findProp(link.opp->prop);
                if (back && back->isRefs()) std::get<RefSet>(back->payload).add(link.from);
            }
        }
    }

    ObjectNode* findMutable(const Oid& oid) {
        for (auto& r : model.roots)
            if (auto* hit = findIn(r, oid)) return hit;
        return nullptr;
    }

    static ObjectNode* findIn(ObjectNode& node, const Oid& oid) {
        if (node.oid == oid) return &node;
        for (auto& p : node.props)
            if (p.isCmts())
                for (auto& c : std::get<CmtSet>(p.payload).children)
                    if (auto* hit = findIn(c, oid)) return hit;
        return nullptr;
    }
};

} // namespace

StructuredModel genModel(const ModelType& mm, const GenSpec& spec) {
    if (spec.maxObjects < 1 || spec.maxDepth < 1)
        throw GenError("bounds too tight to place a root");
    ModelBuilder builder(mm, spec);
    auto rootClasses = concreteSubclasses(mm, mm.root());
    if (rootClasses.empty()) throw GenError("no concrete root class available");

    std::uint64_t nRoots = 1 + builder.rng.below(2);
    for (std::uint64_t i = 0; i < nRoots && builder.objects < spec.maxObjects; ++i) {
        ObjectNode root =
            builder.makeObject(builder.rng.pick(rootClasses), 1, std::nullopt);
        root.slot = i;
        builder.model.roots.push_back(std::move(root));
    }
    builder.wireReferences();
    return std::move(builder.model);
}

// ---------------------------------------------------------------------------
// Program generation

namespace {

struct ProgramBuilder {
    const ModelType& mm;
    Rng rng;
    Config state; // evolves as accepted statements run
    std::uint64_t nextVar = 0;

    ProgramBuilder(const ModelType& mm, const StructuredModel& model, std::uint64_t seed)
        : mm(mm), rng(seed) {
        state.env.locs = locations(model.roots);
        state.model = model.roots;
        state.typing = model.typing;
    }

    std::string freshVar() { return "v" + std::to_string(nextVar++); }

    std::vector<Oid> liveOids() const {
        std::vector<Oid> out;
        for (const auto& [oid, loc] : state.env.locs) out.push_back(oid);
        return out;
    }

    /// Live objects whose class sits in the declared cone of `cls`.
    std::vector<Oid> liveOidsOf(const std::string& cls) const {
        std::vector<Oid> out;
        for (const auto& [oid, c] : state.typing)
            if (mm.isSubclass(c, cls)) out.push_back(oid);
        return out;
    }

    /// One action for the object under focus, drawn from its class fields.
    ActPtr makeAction(const Oid& focus, const std::string& focusClass) {
        const ObjectType& type = mm.classType(focusClass);
        std::vector<const ObjectType::Field*> attrs, refs, cmts;
        for (const auto& f : type.fields) {
            switch (f.type.kind) {
                case FieldType::Kind::Attr: attrs.push_back(&f); break;
                case FieldType::Kind::Ref: {
                    auto opp = mm.opposite(ReferenceEnd::refEnd(focusClass, f.name));
                    if (!opp || opp->kind != ReferenceEnd::Kind::Cmt) refs.push_back(&f);
                    break;
                }
                case FieldType::Kind::Cmt: cmts.push_back(&f); break;
            }
        }

        for (int attempt = 0; attempt < 8; ++attempt) {
            switch (rng.below(6)) {
                case 0: // set attribute
                    if (!attrs.empty()) {
                        const auto* f = rng.pick(attrs);
                        return actSet(f->name, Expr::lit(randomValueOf(f->type.base, rng)));
                    }
                    break;
                case 1: // unset attribute
                    if (!attrs.empty()) return actUnsetAttr(rng.pick(attrs)->name);
                    break;
                case 2: // set reference
                    if (!refs.empty()) {
                        const auto* f = rng.pick(refs);
                        auto targets = liveOidsOf(f->type.cls.name);
                        if (!targets.empty())
                            return actSet(f->name, Expr::oid(rng.pick(targets)));
                    }
                    break;
                case 3: // unset a present reference
                    if (!refs.empty()) {
                        const auto* f = rng.pick(refs);
                        if (auto present = presentRef(focus, f->name)) {
                            std::string y = freshVar();
                            return actLet(y, Expr::oid(*present),
                                          actUnset(f->name, y));
                        }
                    }
                    break;
                case 4: // create a child
                    if (!cmts.empty()) {
                        const auto* f = rng.pick(cmts);
                        auto classes = concreteSubclasses(mm, f->type.cls.name);
                        if (!classes.empty()) {
                            if (rng.chance(40)) {
                                std::string y = freshVar();
                                return actLetCreate(y, f->name, rng.pick(classes),
                                                    actUnit());
                            }
                            return actCreate(f->name, rng.pick(classes));
                        }
                    }
                    break;
                case 5: // move an unrelated object under the focus
                    if (!cmts.empty()) {
                        const auto* f = rng.pick(cmts);
                        auto targets = liveOidsOf(f->type.cls.name);
                        std::vector<Oid> movable;
                        const Location& focusLoc = state.env.locs.at(focus);
                        for (const auto& t : targets) {
                            const Location& tl = state.env.locs.at(t);
                            if (!isAncestorOrSelf(tl, focusLoc) &&
                                !isAncestorOrSelf(focusLoc, tl))
                                movable.push_back(t);
                        }
                        if (!movable.empty()) {
                            std::string y = freshVar();
                            return actLet(y, Expr::oid(rng.pick(movable)),
                                          actSetCmt(f->name, y));
                        }
                    }
                    break;
            }
        }
        return actUnit();
    }

    std::optional<Oid> presentRef(const Oid& focus, const std::string& prop) {
        const ObjectNode* node = nullptr;
        for (auto& r : state.model)
            if (auto* hit = ModelBuilder::findIn(const_cast<ObjectNode&>(r), focus)) {
                node = hit;
                break;
            }
        if (!node) return std::nullopt;
        const auto* b = node->findProp(prop);
        if (!b || !b->isRefs()) return std::nullopt;
        const auto& ids = std::get<RefSet>(b->payload).ids;
        if (ids.empty()) return std::nullopt;
        return ids[rng.below(ids.size())];
    }

    ActPtr makeActs(const Oid& focus, const std::string& focusClass) {
        std::uint64_t n = 1 + rng.below(3);
        ActPtr acts = makeAction(focus, focusClass);
        for (std::uint64_t i = 1; i < n; ++i)
            acts = actSeq(std::move(acts), makeAction(focus, focusClass));
        return acts;
    }

    StmtPtr makeStatement() {
        auto rootClasses = concreteSubclasses(mm, mm.root());
        switch (rng.below(5)) {
            case 0: // create a root
                if (!rootClasses.empty()) return stmtCreateRoot(rng.pick(rootClasses));
                return stmtUnit();
            case 1: { // create a root and edit it
                if (rootClasses.empty()) return stmtUnit();
                const std::string& cls = rng.pick(rootClasses);
                std::string x = freshVar();
                // The fresh identifier the interpreter will choose is not
                // known here, so edit through the bound variable only.
                return stmtLetCreate(x, cls, stmtSnapshot(x, actUnit()));
            }
            default: { // snapshot over a live object
                auto live = liveOids();
                if (live.empty()) return stmtUnit();
                const Oid& focus = rng.pick(live);
                const std::string& cls = state.typing.at(focus);
                std::string x = freshVar();
                return stmtLet(x, Expr::oid(focus), stmtSnapshot(x, makeActs(focus, cls)));
            }
        }
    }
};

StmtPtr foldProgram(std::vector<StmtPtr> stmts) {
    if (stmts.empty()) return stmtUnit();
    StmtPtr out = stmts.back();
    for (auto it = stmts.rbegin() + 1; it != stmts.rend(); ++it)
        out = stmtSeq(*it, out);
    return out;
}

} // namespace

StmtPtr genProgram(const ModelType& mm, const StructuredModel& model, const GenSpec& spec) {
    ProgramBuilder builder(mm, model, spec.seed);
    std::vector<StmtPtr> accepted;
    std::size_t want = 1 + builder.rng.below(spec.maxStmts);
    for (std::size_t i = 0; i < want; ++i) {
        for (int attempt = 0; attempt < 8; ++attempt) {
            StmtPtr candidate = builder.makeStatement();
            TypeEnvOids pi(builder.state.typing.begin(), builder.state.typing.end());
            if (!typecheckProgram(mm, pi, candidate).ok) continue;
            FirstOutcome out = runFirst(builder.state, candidate, mm);
            if (auto* next = std::get_if<Config>(&out)) {
                builder.state = std::move(*next);
                accepted.push_back(std::move(candidate));
                break;
            }
        }
    }
    return foldProgram(std::move(accepted));
}

StmtPtr genAdversarialProgram(const ModelType& mm, const StructuredModel& model,
                              const GenSpec& spec) {
    Rng rng(spec.seed * 7919 + 17);
    std::vector<Oid> live;
    for (const auto& [oid, cls] : model.typing) live.push_back(oid);
    if (live.empty()) return stmtUnit();

    auto anyOid = [&]() -> const Oid& { return live[rng.below(live.size())]; };
    Oid missing = "missing$" + std::to_string(rng.below(1000));

    std::vector<StmtPtr> stmts;
    std::size_t want = 1 + rng.below(spec.maxStmts);
    for (std::size_t i = 0; i < want; ++i) {
        const Oid& focus = anyOid();
        const std::string& cls = model.typing.at(focus);
        const ObjectType& type = mm.classType(cls);
        std::vector<const ObjectType::Field*> refs, cmts, attrs;
        for (const auto& f : type.fields) {
            if (f.type.kind == FieldType::Kind::Ref) refs.push_back(&f);
            if (f.type.kind == FieldType::Kind::Cmt) cmts.push_back(&f);
            if (f.type.kind == FieldType::Kind::Attr) attrs.push_back(&f);
        }
        std::string x = "a" + std::to_string(i);
        ActPtr act;
        switch (rng.below(6)) {
            case 0:
                act = refs.empty() ? actUnit()
                                   : actSet(rng.pick(refs)->name, Expr::oid(missing));
                break;
            case 1:
                act = refs.empty() ? actUnit()
                                   : actLet("y", Expr::oid(anyOid()),
                                            actUnset(rng.pick(refs)->name, "y"));
                break;
            case 2:
                act = cmts.empty() ? actUnit()
                                   : actLet("y", Expr::oid(anyOid()),
                                            actSetCmt(rng.pick(cmts)->name, "y"));
                break;
            case 3:
                act = cmts.empty() ? actUnit()
                                   : actLet("y", Expr::oid(anyOid()),
                                            actUnset(rng.pick(cmts)->name, "y"));
                break;
            case 4:
                act = attrs.empty() ? actUnit()
                                    : actSet(rng.pick(attrs)->name,
                                             Expr::lit(Value(static_cast<std::int64_t>(
                                                 rng.below(100)))));
                break;
            default:
                act = actLet("y", Expr::oid(missing), actSetCmt(
                                 cmts.empty() ? "nothing" : rng.pick(cmts)->name, "y"));
                break;
        }
        StmtPtr stmt;
        if (rng.chance(20)) {
            stmt = stmtLet(x, Expr::oid(anyOid()), stmtDeleteRoot(x));
        } else if (rng.chance(10)) {
            stmt = stmtLet(x, Expr::oid(missing), stmtSnapshot(x, actUnit()));
        } else {
            stmt = stmtLet(x, Expr::oid(focus), stmtSnapshot(x, std::move(act)));
        }
        stmts.push_back(std::move(stmt));
    }
    return foldProgram(std::move(stmts));
}

// ---------------------------------------------------------------------------
// Mutations

namespace {

struct RefSite {
    ObjectNode* node;
    PropertyBinding* binding;
};

void collectRefSites(ObjectNode& node, std::vector<RefSite>& out, bool nonEmptyOnly) {
    for (auto& p : node.props) {
        if (p.isRefs()) {
            if (!nonEmptyOnly || !std::get<RefSet>(p.payload).ids.empty())
                out.push_back({&node, &p});
        } else if (p.isCmts()) {
            for (auto& c : std::get<CmtSet>(p.payload).children)
                collectRefSites(c, out, nonEmptyOnly);
        }
    }
}

void collectAttrSites(ObjectNode& node, std::vector<RefSite>& out) {
    for (auto& p : node.props) {
        if (p.isAttr()) out.push_back({&node, &p});
        else if (p.isCmts())
            for (auto& c : std::get<CmtSet>(p.payload).children) collectAttrSites(c, out);
    }
}

} // namespace

std::optional<StructuredModel> mutateModel(const StructuredModel& model, const ModelType& mm,
                                           Mutation mutation, std::uint64_t seed) {
    StructuredModel copy = model;
    Rng rng(seed * 31337 + 11);

    switch (mutation) {
        case Mutation::RetargetRefToMissing: {
            std::vector<RefSite> sites;
            for (auto& r : copy.roots) collectRefSites(r, sites, true);
            if (sites.empty()) return std::nullopt;
            auto& site = sites[rng.below(sites.size())];
            auto& ids = std::get<RefSet>(site.binding->payload).ids;
            ids[rng.below(ids.size())] = "missing$" + std::to_string(rng.below(1000));
            return copy;
        }
        case Mutation::DropOppositeSide: {
            std::vector<RefSite> sites;
            for (auto& r : copy.roots) collectRefSites(r, sites, true);
            // Only sites whose end is bidirectional qualify.
            std::vector<RefSite> bidi;
            for (auto& s : sites) {
                auto cls = copy.typing.find(s.node->oid);
                if (cls == copy.typing.end()) continue;
                auto opp = mm.opposite(ReferenceEnd::refEnd(cls->second, s.binding->name));
                if (opp) bidi.push_back(s);
            }
            if (bidi.empty()) return std::nullopt;
            auto& site = bidi[rng.below(bidi.size())];
            auto& ids = std::get<RefSet>(site.binding->payload).ids;
            ids.erase(ids.begin() + static_cast<std::ptrdiff_t>(rng.below(ids.size())));
            return copy;
        }
        case Mutation::RetypeAttribute: {
            std::vector<RefSite> sites;
            for (auto& r : copy.roots) collectAttrSites(r, sites);
            if (sites.empty()) return std::nullopt;
            auto& site = sites[rng.below(sites.size())];
            auto& v = std::get<Value>(site.binding->payload);
            v = v.isInteger() ? Value(std::string("mutated")) : Value(std::int64_t{7});
            return copy;
        }
    }
    return std::nullopt;
}

} // namespace fmadsl::testkit
