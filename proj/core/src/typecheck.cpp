#include "fma/typecheck.hpp"

namespace fmadsl {

ExprTypeResult typecheckExpr(const ModelType& mm, const TypeEnvVars& gamma,
                             const TypeEnvOids& pi, const Expr& e) {
    (void)mm;
    if (const auto* l = std::get_if<Expr::Lit>(&e.node))
        return ScalarType::baseType(l->value.type()); // T-Base
    if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
        auto it = gamma.find(v->name);
        if (it == gamma.end())
            return VerdictEntry{"T-Var", "", "a bound variable",
                                "unbound variable '" + v->name + "'"};
        return it->second; // T-Var
    }
    const auto& o = std::get<Expr::OidLit>(e.node);
    auto it = pi.find(o.oid);
    if (it == pi.end())
        return VerdictEntry{"T-Ref", "", "a known object identifier",
                            "unknown identifier '" + o.oid + "'"};
    return ScalarType::refTo(ClassRef::named(it->second)); // T-Ref
}

namespace {

struct Checker {
    const ModelType& mm;
    const TypeEnvOids& pi;
    std::vector<VerdictEntry> errors;

    void fail(std::string rule, const std::string& path, std::string expected,
              std::string found) {
        errors.push_back(
            {std::move(rule), path, std::move(expected), std::move(found)});
    }

    std::optional<ScalarType> expr(const TypeEnvVars& gamma, const Expr& e,
                                   const std::string& path) {
        ExprTypeResult r = typecheckExpr(mm, gamma, pi, e);
        if (auto* entry = std::get_if<VerdictEntry>(&r)) {
            entry->path = path;
            errors.push_back(*entry);
            return std::nullopt;
        }
        return std::get<ScalarType>(r);
    }

    /// The operand of a reference-taking action: must type as ref c.
    std::optional<ClassRef> refOperand(const TypeEnvVars& gamma, const Expr& e,
                                       const std::string& rule, const std::string& path) {
        auto t = expr(gamma, e, path);
        if (!t) return std::nullopt;
        if (t->kind != ScalarType::Kind::Ref) {
            fail(rule, path, "an object reference", t->str());
            return std::nullopt;
        }
        return t->cls;
    }

    /// Reference compatibility with a declared class: the empty markers are
    /// compatible with anything, a named class must structurally subsume.
    bool compatible(const ClassRef& found, const ClassRef& declared) {
        if (found.isBottom() || found.isAny()) return true;
        return subtypeOf(mm, mm.classType(found), mm.classType(declared));
    }

    /// Premises shared by create(c) at first level and T-Create/T-ActLetCreate
    /// targets: the class must exist, be concrete, and fit `declared`.
    bool creatable(const std::string& cls, const ObjectType& declared,
                   const std::string& rule, const std::string& path,
                   const std::string& expectedWhat) {
        if (!mm.hasClass(cls)) {
            fail(rule, path, expectedWhat, "unknown class '" + cls + "'");
            return false;
        }
        if (mm.isAbstract(cls)) {
            fail(rule, path, expectedWhat, "abstract class '" + cls + "'");
            return false;
        }
        if (!subtypeOf(mm, mm.classType(cls), declared)) {
            fail(rule, path, expectedWhat, "'" + cls + "' : " + mm.classType(cls).str());
            return false;
        }
        return true;
    }

    void act(const std::string& focusClass, TypeEnvVars gamma, const ActPtr& s,
             const std::string& path) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                const ObjectType& focusType = mm.classType(focusClass);
                if constexpr (std::is_same_v<T, ActStmt::Unit>) {
                    // T-ActUnit
                } else if constexpr (std::is_same_v<T, ActStmt::Create>) {
                    const FieldType* f = focusType.find(x.prop);
                    if (!f || f->kind != FieldType::Kind::Cmt) {
                        fail("T-Create", path, "a containment of '" + focusClass + "'",
                             "property '" + x.prop + "'");
                        return;
                    }
                    creatable(x.cls, mm.classType(f->cls), "T-Create", path,
                              "a concrete subtype of " + f->cls.str());
                } else if constexpr (std::is_same_v<T, ActStmt::Set>) {
                    auto t = expr(gamma, x.expr, path);
                    if (!t) return;
                    const FieldType* f = focusType.find(x.prop);
                    if (!f) {
                        fail("T-Set", path, "a property of '" + focusClass + "'",
                             "property '" + x.prop + "'");
                        return;
                    }
                    switch (f->kind) {
                        case FieldType::Kind::Attr:
                            if (t->kind != ScalarType::Kind::Base || t->base != f->base)
                                fail("T-Set", path, f->str(), t->str());
                            break;
                        case FieldType::Kind::Ref:
                        case FieldType::Kind::Cmt:
                            if (t->kind != ScalarType::Kind::Ref ||
                                !compatible(t->cls, f->cls))
                                fail("T-Set", path, f->str(), t->str());
                            break;
                    }
                } else if constexpr (std::is_same_v<T, ActStmt::SetCmt>) {
                    auto c = refOperand(gamma, Expr::var(x.var), "T-Set", path);
                    if (!c) return;
                    const FieldType* f = focusType.find(x.prop);
                    if (!f || f->kind != FieldType::Kind::Cmt) {
                        fail("T-Set", path, "a containment of '" + focusClass + "'",
                             "property '" + x.prop + "'");
                        return;
                    }
                    if (!compatible(*c, f->cls))
                        fail("T-Set", path, f->str(), "ref " + c->str());
                } else if constexpr (std::is_same_v<T, ActStmt::UnsetAttr>) {
                    const FieldType* f = focusType.find(x.prop);
                    if (!f || f->kind != FieldType::Kind::Attr)
                        fail("T-AttUnset", path, "an attribute of '" + focusClass + "'",
                             "property '" + x.prop + "'");
                } else if constexpr (std::is_same_v<T, ActStmt::UnsetRefOrCmt>) {
                    const FieldType* f = focusType.find(x.prop);
                    bool isCmt = f && f->kind == FieldType::Kind::Cmt;
                    const char* rule = isCmt ? "T-CmtUnset" : "T-RefUnset";
                    auto c = refOperand(gamma, Expr::var(x.var), rule, path);
                    if (!c) return;
                    if (!f || f->kind == FieldType::Kind::Attr) {
                        fail(rule, path,
                             "a reference or containment of '" + focusClass + "'",
                             "property '" + x.prop + "'");
                        return;
                    }
                    if (!compatible(*c, f->cls)) fail(rule, path, f->str(), "ref " + c->str());
                } else if constexpr (std::is_same_v<T, ActStmt::Let>) {
                    auto t = expr(gamma, x.expr, path);
                    TypeEnvVars inner = gamma;
                    if (t) inner[x.var] = *t;
                    else inner.erase(x.var);
                    act(focusClass, std::move(inner), x.body, path + ".let(" + x.var + ")");
                } else if constexpr (std::is_same_v<T, ActStmt::LetCreate>) {
                    const FieldType* f = focusType.find(x.prop);
                    if (!f || f->kind != FieldType::Kind::Cmt) {
                        fail("T-ActLetCreate", path, "a containment of '" + focusClass + "'",
                             "property '" + x.prop + "'");
                    } else {
                        creatable(x.cls, mm.classType(f->cls), "T-ActLetCreate", path,
                                  "a concrete subtype of " + f->cls.str());
                    }
                    TypeEnvVars inner = gamma;
                    if (mm.hasClass(x.cls))
                        inner[x.var] = ScalarType::refTo(ClassRef::named(x.cls));
                    act(focusClass, std::move(inner), x.body, path + ".let(" + x.var + ")");
                } else if constexpr (std::is_same_v<T, ActStmt::Snapshot2>) {
                    auto c = refOperand(gamma, Expr::var(x.var), "T-ActSnapshot", path);
                    if (!c) return;
                    if (!c->isNamed()) {
                        fail("T-ActSnapshot", path, "a reference to a declared class",
                             "ref " + c->str());
                        return;
                    }
                    act(c->name, gamma, x.body, path + ".snapshot2(" + x.var + ")");
                } else if constexpr (std::is_same_v<T, ActStmt::Seq>) {
                    act(focusClass, gamma, x.first, path + ".seq[0]");
                    act(focusClass, gamma, x.second, path + ".seq[1]");
                }
            },
            s->node);
    }

    void stmt(TypeEnvVars gamma, const StmtPtr& s, const std::string& path) {
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, Stmt::Unit>) {
                    // T-Unit
                } else if constexpr (std::is_same_v<T, Stmt::CreateRoot>) {
                    creatable(x.cls, mm.classType(mm.root()), "T-CreateRoot", path,
                              "a concrete class subsuming under root '" + mm.root() + "'");
                } else if constexpr (std::is_same_v<T, Stmt::DeleteRoot>) {
                    refOperand(gamma, Expr::var(x.var), "T-DeleteRoot", path);
                } else if constexpr (std::is_same_v<T, Stmt::Let>) {
                    auto t = expr(gamma, x.expr, path);
                    TypeEnvVars inner = gamma;
                    if (t) inner[x.var] = *t;
                    else inner.erase(x.var);
                    stmt(std::move(inner), x.body, path + ".let(" + x.var + ")");
                } else if constexpr (std::is_same_v<T, Stmt::LetCreate>) {
                    creatable(x.cls, mm.classType(mm.root()), "T-FmaLetCreate", path,
                              "a concrete class subsuming under root '" + mm.root() + "'");
                    TypeEnvVars inner = gamma;
                    if (mm.hasClass(x.cls))
                        inner[x.var] = ScalarType::refTo(ClassRef::named(x.cls));
                    stmt(std::move(inner), x.body, path + ".let(" + x.var + ")");
                } else if constexpr (std::is_same_v<T, Stmt::Snapshot>) {
                    auto c = refOperand(gamma, Expr::var(x.var), "T-FmaSnapshot", path);
                    if (!c) return;
                    if (!c->isNamed()) {
                        fail("T-FmaSnapshot", path, "a reference to a declared class",
                             "ref " + c->str());
                        return;
                    }
                    act(c->name, gamma, x.body, path + ".snapshot(" + x.var + ")");
                } else if constexpr (std::is_same_v<T, Stmt::Seq>) {
                    stmt(gamma, x.first, path + ".seq[0]");
                    stmt(gamma, x.second, path + ".seq[1]");
                }
            },
            s->node);
    }
};

} // namespace

TypeVerdict typecheckAct(const ModelType& mm, const std::string& focusClass,
                         const TypeEnvVars& gamma, const TypeEnvOids& pi, const ActPtr& s2) {
    Checker c{mm, pi, {}};
    if (!mm.hasClass(focusClass)) {
        c.fail("T-ActSnapshot", "", "a declared focus class",
               "unknown class '" + focusClass + "'");
    } else {
        c.act(focusClass, gamma, s2, "act");
    }
    return {c.errors.empty(), std::move(c.errors)};
}

TypeVerdict typecheckProgram(const ModelType& mm, const TypeEnvOids& pi, const StmtPtr& s,
                             const TypeEnvVars& initialGamma) {
    Checker c{mm, pi, {}};
    for (const auto& v : freeVars(s))
        if (!initialGamma.count(v))
            c.fail("NotClosed", "program", "a bound variable", "free variable '" + v + "'");
    c.stmt(initialGamma, s, "program");
    return {c.errors.empty(), std::move(c.errors)};
}

} // namespace fmadsl
