#pragma once

#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>

#include "fma/value.hpp"

namespace fmadsl {

/// Expressions: base-type literals, variables, and object-identifier
/// literals (the value form of reference type used by program sources).
struct Expr {
    struct Lit {
        Value value;
        friend bool operator==(const Lit&, const Lit&) = default;
    };
    struct Var {
        std::string name;
        friend bool operator==(const Var&, const Var&) = default;
    };
    struct OidLit {
        Oid oid;
        friend bool operator==(const OidLit&, const OidLit&) = default;
    };

    std::variant<Lit, Var, OidLit> node;

    static Expr lit(Value v) { return {Lit{std::move(v)}}; }
    static Expr var(std::string n) { return {Var{std::move(n)}}; }
    static Expr oid(Oid o) { return {OidLit{std::move(o)}}; }

    friend bool operator==(const Expr&, const Expr&) = default;
};

struct ActStmt;
using ActPtr = std::shared_ptr<const ActStmt>;

/// Second-level statements: the model actions applied to the property set of
/// the object under focus, plus let-bindings, nested refocusing and
/// sequencing.
struct ActStmt {
    struct Let {
        std::string var;
        Expr expr;
        ActPtr body;
    };
    struct LetCreate {
        std::string var;
        std::string prop;
        std::string cls;
        ActPtr body;
    };
    struct Create {
        std::string prop;
        std::string cls;
    };
    struct Set {
        std::string prop;
        Expr expr;
    };
    struct SetCmt {
        std::string prop;
        std::string var;
    };
    struct UnsetAttr {
        std::string prop;
    };
    struct UnsetRefOrCmt {
        std::string prop;
        std::string var;
    };
    struct Snapshot2 {
        std::string var;
        ActPtr body;
    };
    struct Seq {
        ActPtr first;
        ActPtr second;
    };
    struct Unit {};

    std::variant<Let, LetCreate, Create, Set, SetCmt, UnsetAttr, UnsetRefOrCmt, Snapshot2,
                 Seq, Unit>
        node;
};

ActPtr actLet(std::string var, Expr e, ActPtr body);
ActPtr actLetCreate(std::string var, std::string prop, std::string cls, ActPtr body);
ActPtr actCreate(std::string prop, std::string cls);
ActPtr actSet(std::string prop, Expr e);
ActPtr actSetCmt(std::string prop, std::string var);
ActPtr actUnsetAttr(std::string prop);
ActPtr actUnset(std::string prop, std::string var);
ActPtr actSnapshot2(std::string var, ActPtr body);
ActPtr actSeq(ActPtr a, ActPtr b);
ActPtr actUnit();

struct Stmt;
using StmtPtr = std::shared_ptr<const Stmt>;

/// First-level statements: root creation and deletion, snapshots,
/// let-bindings and sequencing.
struct Stmt {
    struct Snapshot {
        std::string var;
        ActPtr body;
    };
    struct Let {
        std::string var;
        Expr expr;
        StmtPtr body;
    };
    struct LetCreate {
        std::string var;
        std::string cls;
        StmtPtr body;
    };
    struct CreateRoot {
        std::string cls;
    };
    struct DeleteRoot {
        std::string var;
    };
    struct Seq {
        StmtPtr first;
        StmtPtr second;
    };
    struct Unit {};

    std::variant<Snapshot, Let, LetCreate, CreateRoot, DeleteRoot, Seq, Unit> node;
};

StmtPtr stmtSnapshot(std::string var, ActPtr body);
StmtPtr stmtLet(std::string var, Expr e, StmtPtr body);
StmtPtr stmtLetCreate(std::string var, std::string cls, StmtPtr body);
StmtPtr stmtCreateRoot(std::string cls);
StmtPtr stmtDeleteRoot(std::string var);
StmtPtr stmtSeq(StmtPtr a, StmtPtr b);
StmtPtr stmtUnit();

bool equal(const StmtPtr& a, const StmtPtr& b);
bool equal(const ActPtr& a, const ActPtr& b);

struct ParseError : std::runtime_error {
    ParseError(int line, int col, const std::string& message)
        : std::runtime_error("parse error at " + std::to_string(line) + ":" +
                             std::to_string(col) + ": " + message),
          line(line), col(col) {}

    int line;
    int col;
};

/// Parses a program source into its AST. Throws ParseError.
StmtPtr parse(const std::string& source);

/// Canonical source text; reparsing yields the same AST.
std::string format(const StmtPtr& s);
std::string format(const ActPtr& s);
std::string format(const Expr& e);

std::set<std::string> freeVars(const StmtPtr& s);
std::set<std::string> freeVars(const ActPtr& s);
std::set<std::string> freeVars(const Expr& e);

bool closed(const StmtPtr& s);

/// The termination measure: a positive size that strictly shrinks from every
/// statement to the statements its evaluation dispatches to.
std::uint64_t measure(const StmtPtr& s);
std::uint64_t measure(const ActPtr& s);
std::uint64_t measure(const Expr& e);

} // namespace fmadsl
