#pragma once

#include <optional>
#include <set>

#include "fma/metamodel.hpp"
#include "fma/syntax.hpp"
#include "fma/typesys.hpp"

// Independent re-implementations used as oracles. They deliberately share no
// code with the library paths they check.

namespace oracles {

/// Size measure re-evaluated clause by clause.
inline std::uint64_t measureExpr(const fmadsl::Expr&) { return 1; }

inline std::uint64_t measureAct(const fmadsl::ActPtr& s) {
    using namespace fmadsl;
    if (std::holds_alternative<ActStmt::Unit>(s->node)) return 1;
    if (std::holds_alternative<ActStmt::Create>(s->node)) return 1;
    if (std::holds_alternative<ActStmt::UnsetAttr>(s->node)) return 1;
    if (std::holds_alternative<ActStmt::UnsetRefOrCmt>(s->node)) return 1;
    if (const auto* x = std::get_if<ActStmt::Set>(&s->node))
        return 1 + measureExpr(x->expr);
    if (std::holds_alternative<ActStmt::SetCmt>(s->node)) return 1 + 1;
    if (const auto* x = std::get_if<ActStmt::Let>(&s->node))
        return 1 + measureExpr(x->expr) + measureAct(x->body);
    if (const auto* x = std::get_if<ActStmt::LetCreate>(&s->node))
        return 2 + measureAct(x->body);
    if (const auto* x = std::get_if<ActStmt::Snapshot2>(&s->node))
        return 1 + measureAct(x->body);
    const auto& seq = std::get<ActStmt::Seq>(s->node);
    return 1 + measureAct(seq.first) + measureAct(seq.second);
}

inline std::uint64_t measureStmt(const fmadsl::StmtPtr& s) {
    using namespace fmadsl;
    if (std::holds_alternative<Stmt::Unit>(s->node)) return 1;
    if (std::holds_alternative<Stmt::CreateRoot>(s->node)) return 1;
    if (std::holds_alternative<Stmt::DeleteRoot>(s->node)) return 1;
    if (const auto* x = std::get_if<Stmt::Let>(&s->node))
        return 1 + measureExpr(x->expr) + measureStmt(x->body);
    if (const auto* x = std::get_if<Stmt::LetCreate>(&s->node))
        return 2 + measureStmt(x->body);
    if (const auto* x = std::get_if<Stmt::Snapshot>(&s->node))
        return 1 + measureAct(x->body);
    const auto& seq = std::get<Stmt::Seq>(s->node);
    return 1 + measureStmt(seq.first) + measureStmt(seq.second);
}

/// Subtyping by plain unfolding with a depth budget instead of a memo. Past
/// the budget every pending comparison is assumed to hold, which is the same
/// reading the memo gives a repeated pair.
inline bool boundedSubtype(const fmadsl::ModelType& mm, const fmadsl::ObjectType& s1,
                           const fmadsl::ObjectType& s2, int budget) {
    using namespace fmadsl;
    if (s2.isEmpty()) return true;
    if (s1.isEmpty()) return false;
    if (s1.isBottom()) return true;
    if (s2.isBottom()) return false;
    if (budget <= 0) return true;

    for (const auto& need : s2.fields) {
        const FieldType* have = s1.find(need.name);
        if (!have || have->kind != need.type.kind) return false;
        switch (need.type.kind) {
            case FieldType::Kind::Attr:
                if (have->base != need.type.base) return false;
                break;
            case FieldType::Kind::Ref:
            case FieldType::Kind::Cmt: {
                const ClassRef& c1 = have->cls;
                const ClassRef& c2 = need.type.cls;
                if (c1.isAny() || c1.isBottom() || c2.isAny()) break;
                if (c2.isBottom()) return false;
                if (!mm.hasClass(c1.name) || !mm.hasClass(c2.name)) return false;
                if (!boundedSubtype(mm, mm.classType(c1.name), mm.classType(c2.name),
                                    budget - 1))
                    return false;
                break;
            }
        }
    }
    return true;
}

/// Collection typing by exhaustively trying every applicable rule instead of
/// dispatching in a fixed order; the result set must be a singleton (or
/// empty, when no rule applies).
inline std::set<fmadsl::ClassRef> allCollectionTypes(
    const fmadsl::ModelType& mm, const std::vector<fmadsl::ClassRef>& elements) {
    using namespace fmadsl;
    std::set<ClassRef> results;
    if (elements.empty()) {
        results.insert(ClassRef::bottom());
        return results;
    }
    const ClassRef& head = elements.front();
    std::vector<ClassRef> rest(elements.begin() + 1, elements.end());
    for (const auto& tailType : allCollectionTypes(mm, rest)) {
        const ObjectType& t1 = mm.classType(head);
        const ObjectType& t2 = mm.classType(tailType);
        bool oneTwo = subtypeOf(mm, t1, t2);
        bool twoOne = subtypeOf(mm, t2, t1);
        if (oneTwo) results.insert(tailType);
        if (twoOne) results.insert(head);
        if (!oneTwo && !twoOne) results.insert(mm.meet(head, tailType));
    }
    return results;
}

} // namespace oracles
