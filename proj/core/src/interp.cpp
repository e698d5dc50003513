#include "fma/interp.hpp"

#include <algorithm>
#include <stdexcept>

#include "fma/validate.hpp"

namespace fmadsl {

const char* trapKindName(TrapKind k) {
    switch (k) {
        case TrapKind::DanglingReference: return "DanglingReference";
        case TrapKind::OppositeToContainment: return "OppositeToContainment";
        case TrapKind::NotIsolated: return "NotIsolated";
        case TrapKind::ReferenceNotFound: return "ReferenceNotFound";
        case TrapKind::HoistViolation: return "HoistViolation";
        case TrapKind::NotARoot: return "NotARoot";
    }
    return "?";
}

EvalResult evalExpr(const Env& env, const Expr& e) {
    if (const auto* l = std::get_if<Expr::Lit>(&e.node)) return l->value;
    if (const auto* o = std::get_if<Expr::OidLit>(&e.node)) return o->oid;
    const auto& v = std::get<Expr::Var>(e.node);
    auto it = env.vars.find(v.name);
    if (it == env.vars.end())
        return ProgramFault{ProgramFault::Kind::IllTyped,
                            "unbound variable '" + v.name + "'"};
    if (const auto* val = std::get_if<Value>(&it->second)) return *val;
    return std::get<Oid>(it->second);
}

namespace {

using Fault = std::variant<TrappedError, ProgramFault>;
using MaybeFault = std::optional<Fault>;

MaybeFault trap(TrapKind kind, std::string rule, std::string context) {
    return Fault{TrappedError{kind, std::move(rule), std::move(context)}};
}

MaybeFault illTyped(std::string message) {
    return Fault{ProgramFault{ProgramFault::Kind::IllTyped, std::move(message)}};
}

ObjectNode* findNode(ObjectSet& set, const Oid& o) {
    for (auto& n : set) {
        if (n.oid == o) return &n;
        for (auto& p : n.props)
            if (p.isCmts())
                if (auto* hit = findNode(std::get<CmtSet>(p.payload).children, o)) return hit;
    }
    return nullptr;
}

/// The recursive evaluator. Trace events record statement-level rule
/// applications only, in pre-order: a conclusion precedes its premises and
/// the measure strictly shrinks from each conclusion to them.
struct Interp {
    const ModelType& mm;
    const TraceSink& trace;
    int depth = 0;

    void emit(const char* rule, std::uint64_t xiBefore, const std::string& loc) {
        if (trace) trace(TraceEvent{depth, rule, xiBefore, 1, loc});
    }

    // ---- shared machinery -------------------------------------------------

    Oid freshOid(Env& env, const std::map<Oid, std::string>& typing,
                 const std::string& cls) {
        std::uint64_t n = env.fresh.count(cls) ? env.fresh.at(cls) : 0;
        Oid cand;
        while (true) {
            cand = cls + "$" + std::to_string(n);
            if (!env.locs.count(cand) && !typing.count(cand)) break;
            ++n;
        }
        env.fresh[cls] = n + 1;
        return cand;
    }

    MaybeFault evalToOid(const Env& env, const Expr& e, Oid& out, const char* what) {
        EvalResult r = evalExpr(env, e);
        if (const auto* f = std::get_if<ProgramFault>(&r)) return Fault{*f};
        if (const auto* o = std::get_if<Oid>(&r)) {
            out = *o;
            return std::nullopt;
        }
        return illTyped(std::string(what) + " requires an object reference operand");
    }

    /// Finds binding `p` on the focused property set; when absent but
    /// declared for `cls`, the binding is materialized at its default value.
    PropertyBinding* binding(std::vector<PropertyBinding>& props, const std::string& cls,
                             const std::string& p) {
        for (auto& b : props)
            if (b.name == p) return &b;
        const FieldType* decl = mm.hasClass(cls) ? mm.fieldOf(cls, p) : nullptr;
        if (!decl) return nullptr;
        PropertyBinding fresh;
        fresh.name = p;
        switch (decl->kind) {
            case FieldType::Kind::Attr: fresh.payload = Value::defaultOf(decl->base); break;
            case FieldType::Kind::Ref: fresh.payload = RefSet{}; break;
            case FieldType::Kind::Cmt: fresh.payload = CmtSet{}; break;
        }
        props.push_back(std::move(fresh));
        return &props.back();
    }

    /// Rewrites the location prefix of everything at or below `from`.
    static void relocate(Env& env, const Location& from, const Location& to) {
        for (auto& [oid, loc] : env.locs) {
            if (!isAncestorOrSelf(from, loc)) continue;
            Location moved = to;
            moved.steps.insert(moved.steps.end(), loc.steps.begin() + from.steps.size(),
                               loc.steps.end());
            moved.target = (loc == from) ? to.target : loc.target;
            loc = std::move(moved);
        }
    }

    static void purge(Env& env, std::map<Oid, std::string>& typing,
                      std::vector<DeferredAction>& deferred, const std::set<Oid>& oids) {
        for (const auto& o : oids) {
            env.locs.erase(o);
            typing.erase(o);
        }
        // Opposite maintenance for deleted objects has nothing left to fix.
        std::erase_if(deferred,
                      [&](const DeferredAction& a) { return oids.count(a.target) != 0; });
    }

    // ---- second level ------------------------------------------------------

    /// Object creation shared by create(p, c) and its let form. On success
    /// `created` holds the fresh identifier.
    MaybeFault createInProp(ActConfig& q, const std::string& p, const std::string& cls,
                            Oid& created) {
        const std::string focusClass =
            q.typing.count(q.focus.target) ? q.typing.at(q.focus.target) : std::string{};
        if (!mm.hasClass(cls)) return illTyped("create of unknown class '" + cls + "'");
        if (mm.isAbstract(cls)) return illTyped("create of abstract class '" + cls + "'");
        auto* b = binding(q.props, focusClass, p);
        if (!b || !b->isCmts())
            return illTyped("create targets '" + p + "', which is not a containment");

        auto opp = mm.opposite(ReferenceEnd::cmtEnd(focusClass, p));
        Oid o = freshOid(q.env, q.typing, cls);
        std::optional<std::pair<Oid, std::string>> container;
        if (opp) container = {q.focus.target, opp->prop};

        ObjectNode node;
        node.oid = o;
        node.props = mm.defaultProps(cls, container);
        auto& children = std::get<CmtSet>(b->payload).children;
        assignSlotAtEnd(node, children);
        children.push_back(std::move(node));

        q.env.locs[o] = q.focus.child(p, o);
        q.typing[o] = cls;
        if (opp)
            q.deferred.push_back(
                DeferredAction{DeferredAction::Kind::Set, o, opp->prop, q.focus.target});
        emit(opp ? "E-CreateBi" : "E-Create", 1, q.focus.str());
        created = o;
        return std::nullopt;
    }

    MaybeFault refSet(ActConfig& q, const std::string& focusClass, const std::string& p,
                      const Oid& o, std::uint64_t xi) {
        if (!q.env.locs.count(o))
            return trap(TrapKind::DanglingReference, "E-RefSetError",
                        "'" + o + "' is not mapped to a location");
        auto opp = mm.opposite(ReferenceEnd::refEnd(focusClass, p));
        if (opp && opp->kind == ReferenceEnd::Kind::Cmt)
            return trap(TrapKind::OppositeToContainment, "E-RefSetErrorCmt",
                        "cannot update opposite containment " + opp->str());
        auto* b = binding(q.props, focusClass, p);
        if (!b || !b->isRefs())
            return illTyped("set targets '" + p + "', which is not a reference");
        auto& rs = std::get<RefSet>(b->payload);
        if (!rs.contains(o)) {
            rs.ids.push_back(o);
            if (opp)
                q.deferred.push_back(
                    DeferredAction{DeferredAction::Kind::Set, o, opp->prop, q.focus.target});
        }
        emit(opp ? "E-RefBiSet" : "E-RefUniSet", xi, q.focus.str());
        return std::nullopt;
    }

    MaybeFault cmtSet(ActConfig& q, const std::string& focusClass, const std::string& p,
                      const Oid& o, std::uint64_t xi) {
        auto* b = binding(q.props, focusClass, p);
        if (!b || !b->isCmts())
            return illTyped("setCmt targets '" + p + "', which is not a containment");
        auto opp = mm.opposite(ReferenceEnd::cmtEnd(focusClass, p));
        auto& cs = std::get<CmtSet>(b->payload);
        auto& children = cs.children;
        const char* rule = opp ? "E-CmtBiSet" : "E-CmtUniSet";

        if (cs.contains(o)) {
            emit(rule, xi, q.focus.str()); // already contained: no change
            return std::nullopt;
        }
        auto locIt = q.env.locs.find(o);
        if (locIt == q.env.locs.end())
            return trap(TrapKind::DanglingReference, "E-CmtSetError",
                        "'" + o + "' is not mapped to a location");
        Location oldLoc = locIt->second;
        if (isAncestorOrSelf(oldLoc, q.focus) || isAncestorOrSelf(q.focus, oldLoc))
            return trap(TrapKind::HoistViolation, "E-CmtSetErrorHoist",
                        "cannot move '" + o + "' across the object under focus");
        if (!resolves(q.model, oldLoc))
            return trap(TrapKind::DanglingReference, "E-CmtSetError",
                        "location of '" + o + "' is not reachable from here");

        auto [rest, node] = extract(q.model, oldLoc);
        q.model = std::move(rest);
        std::optional<Oid> oldContainer = oldLoc.container();

        Location newLoc = q.focus.child(p, o);
        relocate(q.env, oldLoc, newLoc);
        // Reacquire: the extraction copied the model, the binding pointer is
        // stale only if it aliased the model, which it cannot (it lives in
        // q.props), but the children reference is still the same vector.
        assignSlotAtEnd(node, children);
        children.push_back(std::move(node));

        if (opp) {
            q.deferred.push_back(
                DeferredAction{DeferredAction::Kind::Set, o, opp->prop, q.focus.target});
            if (oldContainer)
                q.deferred.push_back(DeferredAction{DeferredAction::Kind::Unset, o,
                                                    opp->prop, *oldContainer});
        }
        emit(rule, xi, q.focus.str());
        return std::nullopt;
    }

    MaybeFault refUnset(ActConfig& q, const std::string& focusClass, const std::string& p,
                        const Oid& o) {
        if (!q.env.locs.count(o))
            return trap(TrapKind::DanglingReference, "E-RefUnsetError1",
                        "'" + o + "' is not mapped to a location");
        auto opp = mm.opposite(ReferenceEnd::refEnd(focusClass, p));
        if (opp && opp->kind == ReferenceEnd::Kind::Cmt)
            return trap(TrapKind::OppositeToContainment, "E-RefUnsetErrorCmt",
                        "cannot update opposite containment " + opp->str());
        auto* b = binding(q.props, focusClass, p);
        if (!b || !b->isRefs())
            return illTyped("unset targets '" + p + "', which is not a reference");
        auto& rs = std::get<RefSet>(b->payload);
        if (!rs.remove(o))
            return trap(TrapKind::ReferenceNotFound, "E-RefUnsetError2",
                        "'" + o + "' is not in '" + p + "' of the object under focus");
        if (opp)
            q.deferred.push_back(
                DeferredAction{DeferredAction::Kind::Unset, o, opp->prop, q.focus.target});
        emit(opp ? "E-RefBiUnset" : "E-RefUniUnset", 1, q.focus.str());
        return std::nullopt;
    }

    MaybeFault cmtUnset(ActConfig& q, const std::string& focusClass, const std::string& p,
                        const Oid& o) {
        if (!q.env.locs.count(o))
            return trap(TrapKind::DanglingReference, "E-CmtUnsetErrorRef1",
                        "'" + o + "' is not mapped to a location");
        auto* b = binding(q.props, focusClass, p);
        if (!b || !b->isCmts())
            return illTyped("unset targets '" + p + "', which is not a containment");
        auto& children = std::get<CmtSet>(b->payload).children;
        auto it = std::find_if(children.begin(), children.end(),
                               [&](const ObjectNode& n) { return n.oid == o; });
        if (it == children.end())
            return trap(TrapKind::ReferenceNotFound, "E-CmtUnsetErrorRef2",
                        "'" + o + "' is not contained in '" + p +
                            "' of the object under focus");

        // Isolation is judged against the whole model: the remainder plus the
        // focused object rebuilt from its current property set.
        ObjectSet whole = q.model;
        ObjectNode focusNode;
        focusNode.oid = q.focus.target;
        focusNode.props = q.props;
        whole.push_back(std::move(focusNode));
        if (!isolated(*it, whole))
            return trap(TrapKind::NotIsolated, "E-CmtUnsetErrorIso",
                        "'" + o + "' or its contents are referenced elsewhere");

        std::set<Oid> removed = subtreeOids(*it);
        children.erase(it);
        purge(q.env, q.typing, q.deferred, removed);
        emit("E-CmtUnset", 1, q.focus.str());
        return std::nullopt;
    }

    MaybeFault runAct(ActConfig& q, const ActPtr& s) {
        const std::string focusClass =
            q.typing.count(q.focus.target) ? q.typing.at(q.focus.target) : std::string{};
        const std::uint64_t xi = measure(s);

        return std::visit(
            [&](const auto& x) -> MaybeFault {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, ActStmt::Unit>) {
                    return std::nullopt; // terminal configuration
                } else if constexpr (std::is_same_v<T, ActStmt::Create>) {
                    Oid ignored;
                    return createInProp(q, x.prop, x.cls, ignored);
                } else if constexpr (std::is_same_v<T, ActStmt::Set>) {
                    EvalResult r = evalExpr(q.env, x.expr);
                    if (const auto* f = std::get_if<ProgramFault>(&r)) return Fault{*f};
                    const FieldType* decl =
                        mm.hasClass(focusClass) ? mm.fieldOf(focusClass, x.prop) : nullptr;
                    const PropertyBinding* existing = nullptr;
                    for (const auto& pb : q.props)
                        if (pb.name == x.prop) existing = &pb;

                    if (const auto* v = std::get_if<Value>(&r)) {
                        bool attrLike = decl ? decl->kind == FieldType::Kind::Attr
                                             : existing && existing->isAttr();
                        if (!attrLike)
                            return illTyped("set of a value into non-attribute '" +
                                            x.prop + "'");
                        auto* b = binding(q.props, focusClass, x.prop);
                        b->payload = *v;
                        emit("E-AttSet", xi, q.focus.str());
                        return std::nullopt;
                    }
                    const Oid& o = std::get<Oid>(r);
                    bool refLike = decl ? decl->kind == FieldType::Kind::Ref
                                        : existing && existing->isRefs();
                    bool cmtLike = decl ? decl->kind == FieldType::Kind::Cmt
                                        : existing && existing->isCmts();
                    if (refLike) return refSet(q, focusClass, x.prop, o, xi);
                    if (cmtLike) return cmtSet(q, focusClass, x.prop, o, xi);
                    return illTyped("set of a reference into attribute '" + x.prop + "'");
                } else if constexpr (std::is_same_v<T, ActStmt::SetCmt>) {
                    Oid o;
                    if (auto f = evalToOid(q.env, Expr::var(x.var), o, "setCmt")) return f;
                    return cmtSet(q, focusClass, x.prop, o, xi);
                } else if constexpr (std::is_same_v<T, ActStmt::UnsetAttr>) {
                    auto* b = binding(q.props, focusClass, x.prop);
                    if (!b || !b->isAttr())
                        return illTyped("unset targets '" + x.prop +
                                        "', which is not an attribute");
                    auto& v = std::get<Value>(b->payload);
                    v = Value::defaultOf(v.type());
                    emit("E-AttUnset", 1, q.focus.str());
                    return std::nullopt;
                } else if constexpr (std::is_same_v<T, ActStmt::UnsetRefOrCmt>) {
                    Oid o;
                    if (auto f = evalToOid(q.env, Expr::var(x.var), o, "unset")) return f;
                    const FieldType* decl =
                        mm.hasClass(focusClass) ? mm.fieldOf(focusClass, x.prop) : nullptr;
                    const PropertyBinding* existing = nullptr;
                    for (const auto& pb : q.props)
                        if (pb.name == x.prop) existing = &pb;
                    bool cmtLike = decl ? decl->kind == FieldType::Kind::Cmt
                                        : existing && existing->isCmts();
                    if (cmtLike) return cmtUnset(q, focusClass, x.prop, o);
                    return refUnset(q, focusClass, x.prop, o);
                } else if constexpr (std::is_same_v<T, ActStmt::Let>) {
                    EvalResult r = evalExpr(q.env, x.expr);
                    if (const auto* f = std::get_if<ProgramFault>(&r)) return Fault{*f};
                    emit("E-ActLet", xi, q.focus.str());
                    auto outerVars = q.env.vars;
                    if (const auto* v = std::get_if<Value>(&r))
                        q.env.vars[x.var] = *v;
                    else
                        q.env.vars[x.var] = std::get<Oid>(r);
                    ++depth;
                    auto f = runAct(q, x.body);
                    --depth;
                    q.env.vars = std::move(outerVars); // locals are forgotten
                    return f;
                } else if constexpr (std::is_same_v<T, ActStmt::LetCreate>) {
                    emit("E-ActLetCreate", xi, q.focus.str());
                    Oid o;
                    ++depth;
                    auto cf = createInProp(q, x.prop, x.cls, o);
                    --depth;
                    if (cf) return cf;
                    auto outerVars = q.env.vars;
                    q.env.vars[x.var] = o;
                    ++depth;
                    auto f = runAct(q, x.body);
                    --depth;
                    q.env.vars = std::move(outerVars);
                    return f;
                } else if constexpr (std::is_same_v<T, ActStmt::Snapshot2>) {
                    Oid o;
                    if (auto f = evalToOid(q.env, Expr::var(x.var), o, "snapshot2"))
                        return f;
                    auto locIt = q.env.locs.find(o);
                    if (locIt == q.env.locs.end())
                        return trap(TrapKind::DanglingReference, "E-ActSnapshotErrorRef",
                                    "'" + o + "' is not mapped to a location");
                    Location inner = locIt->second;
                    if (!isAncestorOrSelf(q.focus, inner) || inner == q.focus)
                        return trap(TrapKind::DanglingReference, "E-ActSnapshotErrorRef",
                                    "'" + o + "' is not inside the object under focus");

                    // Refocus on an object inside the current focus.
                    Location rel;
                    rel.steps.assign(inner.steps.begin() +
                                         static_cast<std::ptrdiff_t>(q.focus.steps.size()),
                                     inner.steps.end());
                    rel.target = inner.target;
                    ObjectNode focusNode;
                    focusNode.oid = q.focus.target;
                    focusNode.props = std::move(q.props);
                    ObjectSet holder;
                    holder.push_back(std::move(focusNode));
                    auto [rest, target] = extract(holder, rel);

                    emit("E-ActSnapshot", xi, inner.str());
                    Location outerFocus = q.focus;
                    std::uint64_t targetSlot = target.slot;
                    Oid targetOid = target.oid;
                    q.focus = inner;
                    q.props = std::move(target.props);
                    ++depth;
                    auto f = runAct(q, x.body);
                    --depth;
                    if (f) return f;

                    ObjectNode modified;
                    modified.oid = targetOid;
                    modified.slot = targetSlot;
                    modified.props = std::move(q.props);
                    ObjectSet reassembled = insert(rest, std::move(modified), rel);
                    q.focus = std::move(outerFocus);
                    q.props = std::move(reassembled.front().props);
                    return std::nullopt;
                } else if constexpr (std::is_same_v<T, ActStmt::Seq>) {
                    bool firstIsUnit = std::holds_alternative<ActStmt::Unit>(x.first->node);
                    emit(firstIsUnit ? "E-ActNext" : "E-ActSeq", xi, q.focus.str());
                    if (!firstIsUnit) {
                        ++depth;
                        auto f = runAct(q, x.first);
                        --depth;
                        if (f) return f;
                    }
                    ++depth;
                    auto f = runAct(q, x.second);
                    --depth;
                    return f;
                } else {
                    return illTyped("unhandled action");
                }
            },
            s->node);
    }

    // ---- first level --------------------------------------------------------

    MaybeFault createRoot(Config& k, const std::string& cls, Oid& created) {
        if (!mm.hasClass(cls)) return illTyped("create of unknown class '" + cls + "'");
        if (mm.isAbstract(cls)) return illTyped("create of abstract class '" + cls + "'");
        Oid o = freshOid(k.env, k.typing, cls);
        ObjectNode node;
        node.oid = o;
        node.props = mm.defaultProps(cls);
        assignSlotAtEnd(node, k.model);
        k.model.push_back(std::move(node));
        Location root;
        root.target = o;
        k.env.locs[o] = std::move(root);
        k.typing[o] = cls;
        emit("E-FmaCreateRoot", 1, o);
        created = o;
        return std::nullopt;
    }

    MaybeFault runFirst(Config& k, const StmtPtr& s) {
        const std::uint64_t xi = measure(s);
        return std::visit(
            [&](const auto& x) -> MaybeFault {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Stmt::Unit>) {
                    return std::nullopt; // terminal configuration
                } else if constexpr (std::is_same_v<T, Stmt::CreateRoot>) {
                    Oid ignored;
                    return createRoot(k, x.cls, ignored);
                } else if constexpr (std::is_same_v<T, Stmt::DeleteRoot>) {
                    Oid o;
                    if (auto f = evalToOid(k.env, Expr::var(x.var), o, "delete")) return f;
                    auto locIt = k.env.locs.find(o);
                    if (locIt == k.env.locs.end() || !locIt->second.isRoot())
                        return trap(TrapKind::NotARoot, "E-FmaDeleteRootErrorRef",
                                    "'" + o + "' is not mapped to a root location");
                    auto it = std::find_if(k.model.begin(), k.model.end(),
                                           [&](const ObjectNode& n) { return n.oid == o; });
                    if (it == k.model.end())
                        throw std::logic_error("location map out of sync with model");
                    if (!isolated(*it, k.model))
                        return trap(TrapKind::NotIsolated, "E-FmaDeleteRootErrorIso",
                                    "'" + o + "' or its contents are referenced elsewhere");
                    std::set<Oid> removed = subtreeOids(*it);
                    k.model.erase(it);
                    std::vector<DeferredAction> none;
                    purge(k.env, k.typing, none, removed);
                    emit("E-FmaDeleteRoot", 1, o);
                    return std::nullopt;
                } else if constexpr (std::is_same_v<T, Stmt::Let>) {
                    EvalResult r = evalExpr(k.env, x.expr);
                    if (const auto* f = std::get_if<ProgramFault>(&r)) return Fault{*f};
                    emit("E-FmaLet", xi, "");
                    auto outerVars = k.env.vars;
                    if (const auto* v = std::get_if<Value>(&r))
                        k.env.vars[x.var] = *v;
                    else
                        k.env.vars[x.var] = std::get<Oid>(r);
                    ++depth;
                    auto f = runFirst(k, x.body);
                    --depth;
                    k.env.vars = std::move(outerVars);
                    return f;
                } else if constexpr (std::is_same_v<T, Stmt::LetCreate>) {
                    emit("E-FmaLetCreate", xi, "");
                    Oid o;
                    ++depth;
                    auto cf = createRoot(k, x.cls, o);
                    --depth;
                    if (cf) return cf;
                    auto outerVars = k.env.vars;
                    k.env.vars[x.var] = o;
                    ++depth;
                    auto f = runFirst(k, x.body);
                    --depth;
                    k.env.vars = std::move(outerVars);
                    return f;
                } else if constexpr (std::is_same_v<T, Stmt::Snapshot>) {
                    Oid o;
                    if (auto f = evalToOid(k.env, Expr::var(x.var), o, "snapshot"))
                        return f;
                    auto locIt = k.env.locs.find(o);
                    if (locIt == k.env.locs.end())
                        return trap(TrapKind::DanglingReference, "E-FmaSnapshotErrorRef",
                                    "'" + o + "' is not mapped to a location");
                    Location focus = locIt->second;
                    if (!resolves(k.model, focus))
                        throw std::logic_error("location map out of sync with model");
                    auto [rest, node] = extract(k.model, focus);

                    emit("E-FmaSnapshot", xi, focus.str());
                    ActConfig q;
                    q.env = std::move(k.env);
                    q.model = std::move(rest);
                    q.focus = focus;
                    q.props = std::move(node.props);
                    q.typing = std::move(k.typing);
                    ++depth;
                    auto f = runAct(q, x.body);
                    --depth;
                    k.env = std::move(q.env);
                    k.typing = std::move(q.typing);
                    if (f) return f; // propagation keeps the inner error unchanged
                    ObjectNode modified;
                    modified.oid = node.oid;
                    modified.slot = node.slot;
                    modified.props = std::move(q.props);
                    ObjectSet assembled = insert(q.model, std::move(modified), focus);
                    k.model = applyDeferred(q.deferred, k.env, std::move(assembled), mm,
                                            k.typing);
                    return std::nullopt;
                } else if constexpr (std::is_same_v<T, Stmt::Seq>) {
                    bool firstIsUnit = std::holds_alternative<Stmt::Unit>(x.first->node);
                    emit(firstIsUnit ? "E-FmaNext" : "E-FmaSeq", xi, "");
                    if (!firstIsUnit) {
                        ++depth;
                        auto f = runFirst(k, x.first);
                        --depth;
                        if (f) return f;
                    }
                    ++depth;
                    auto f = runFirst(k, x.second);
                    --depth;
                    return f;
                } else {
                    return illTyped("unhandled statement");
                }
            },
            s->node);
    }
};

} // namespace

ObjectSet applyDeferred(const std::vector<DeferredAction>& actions, const Env& env,
                        ObjectSet set, const ModelType& mm,
                        const std::map<Oid, std::string>& typing) {
    (void)env;
    for (const auto& a : actions) {
        ObjectNode* target = findNode(set, a.target);
        if (!target)
            throw std::logic_error("deferred action targets vanished object '" + a.target +
                                   "'");
        PropertyBinding* b = target->findProp(a.prop);
        if (!b) {
            auto typeIt = typing.find(a.target);
            const FieldType* decl = typeIt != typing.end() && mm.hasClass(typeIt->second)
                                        ? mm.fieldOf(typeIt->second, a.prop)
                                        : nullptr;
            if (!decl || decl->kind != FieldType::Kind::Ref)
                throw std::logic_error("deferred action targets unknown reference '" +
                                       a.prop + "'");
            target->props.push_back(PropertyBinding{a.prop, RefSet{}});
            b = &target->props.back();
        }
        if (!b->isRefs())
            throw std::logic_error("deferred action targets non-reference '" + a.prop +
                                   "'");
        auto& rs = std::get<RefSet>(b->payload);
        if (a.kind == DeferredAction::Kind::Set) rs.add(a.value);
        else rs.remove(a.value);
    }
    return set;
}

ActOutcome runAct(ActConfig q, const ActPtr& s2, const ModelType& mm,
                  const TraceSink& trace) {
    Interp interp{mm, trace};
    auto f = interp.runAct(q, s2);
    if (!f) return q;
    if (auto* t = std::get_if<TrappedError>(&*f)) return *t;
    return std::get<ProgramFault>(*f);
}

FirstOutcome runFirst(Config k, const StmtPtr& s, const ModelType& mm,
                      const TraceSink& trace) {
    Interp interp{mm, trace};
    auto f = interp.runFirst(k, s);
    if (!f) return k;
    if (auto* t = std::get_if<TrappedError>(&*f)) return *t;
    return std::get<ProgramFault>(*f);
}

RunResult runProgram(const StructuredModel& model, const ModelType& mm,
                     const StmtPtr& program,
                     const std::map<std::string, Env::Bound>& initialVars,
                     const TraceSink& trace) {
    auto fv = freeVars(program);
    for (const auto& v : fv)
        if (!initialVars.count(v))
            return ProgramFault{ProgramFault::Kind::Precondition,
                                "program is not closed: unbound variable '" + v + "'"};
    ValidityReport validity = checkValid(model, mm);
    if (!validity.ok)
        return ProgramFault{ProgramFault::Kind::Precondition,
                            "input model is not valid (" +
                                std::to_string(validity.violations.size()) +
                                " violations)"};

    Config k;
    k.env.vars = initialVars;
    k.env.locs = locations(model.roots);
    k.model = model.roots;
    k.typing = model.typing;

    FirstOutcome out = runFirst(std::move(k), program, mm, trace);
    if (auto* t = std::get_if<TrappedError>(&out)) return *t;
    if (auto* f = std::get_if<ProgramFault>(&out)) return *f;
    auto& done = std::get<Config>(out);
    StructuredModel result;
    result.roots = std::move(done.model);
    result.typing = std::move(done.typing);
    return result;
}

} // namespace fmadsl
