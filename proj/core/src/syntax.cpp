#include "fma/syntax.hpp"

#include <cctype>
#include <charconv>
#include <vector>

namespace fmadsl {

ActPtr actLet(std::string var, Expr e, ActPtr body) {
    return std::make_shared<const ActStmt>(
        ActStmt{ActStmt::Let{std::move(var), std::move(e), std::move(body)}});
}
ActPtr actLetCreate(std::string var, std::string prop, std::string cls, ActPtr body) {
    return std::make_shared<const ActStmt>(ActStmt{
        ActStmt::LetCreate{std::move(var), std::move(prop), std::move(cls), std::move(body)}});
}
ActPtr actCreate(std::string prop, std::string cls) {
    return std::make_shared<const ActStmt>(
        ActStmt{ActStmt::Create{std::move(prop), std::move(cls)}});
}
ActPtr actSet(std::string prop, Expr e) {
    return std::make_shared<const ActStmt>(ActStmt{ActStmt::Set{std::move(prop), std::move(e)}});
}
ActPtr actSetCmt(std::string prop, std::string var) {
    return std::make_shared<const ActStmt>(
        ActStmt{ActStmt::SetCmt{std::move(prop), std::move(var)}});
}
ActPtr actUnsetAttr(std::string prop) {
    return std::make_shared<const ActStmt>(ActStmt{ActStmt::UnsetAttr{std::move(prop)}});
}
ActPtr actUnset(std::string prop, std::string var) {
    return std::make_shared<const ActStmt>(
        ActStmt{ActStmt::UnsetRefOrCmt{std::move(prop), std::move(var)}});
}
ActPtr actSnapshot2(std::string var, ActPtr body) {
    return std::make_shared<const ActStmt>(
        ActStmt{ActStmt::Snapshot2{std::move(var), std::move(body)}});
}
ActPtr actSeq(ActPtr a, ActPtr b) {
    return std::make_shared<const ActStmt>(ActStmt{ActStmt::Seq{std::move(a), std::move(b)}});
}
ActPtr actUnit() { return std::make_shared<const ActStmt>(ActStmt{ActStmt::Unit{}}); }

StmtPtr stmtSnapshot(std::string var, ActPtr body) {
    return std::make_shared<const Stmt>(
        Stmt{Stmt::Snapshot{std::move(var), std::move(body)}});
}
StmtPtr stmtLet(std::string var, Expr e, StmtPtr body) {
    return std::make_shared<const Stmt>(
        Stmt{Stmt::Let{std::move(var), std::move(e), std::move(body)}});
}
StmtPtr stmtLetCreate(std::string var, std::string cls, StmtPtr body) {
    return std::make_shared<const Stmt>(
        Stmt{Stmt::LetCreate{std::move(var), std::move(cls), std::move(body)}});
}
StmtPtr stmtCreateRoot(std::string cls) {
    return std::make_shared<const Stmt>(Stmt{Stmt::CreateRoot{std::move(cls)}});
}
StmtPtr stmtDeleteRoot(std::string var) {
    return std::make_shared<const Stmt>(Stmt{Stmt::DeleteRoot{std::move(var)}});
}
StmtPtr stmtSeq(StmtPtr a, StmtPtr b) {
    return std::make_shared<const Stmt>(Stmt{Stmt::Seq{std::move(a), std::move(b)}});
}
StmtPtr stmtUnit() { return std::make_shared<const Stmt>(Stmt{Stmt::Unit{}}); }

bool equal(const ActPtr& a, const ActPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, ActStmt::Let>)
                return x.var == y.var && x.expr == y.expr && equal(x.body, y.body);
            else if constexpr (std::is_same_v<T, ActStmt::LetCreate>)
                return x.var == y.var && x.prop == y.prop && x.cls == y.cls &&
                       equal(x.body, y.body);
            else if constexpr (std::is_same_v<T, ActStmt::Create>)
                return x.prop == y.prop && x.cls == y.cls;
            else if constexpr (std::is_same_v<T, ActStmt::Set>)
                return x.prop == y.prop && x.expr == y.expr;
            else if constexpr (std::is_same_v<T, ActStmt::SetCmt>)
                return x.prop == y.prop && x.var == y.var;
            else if constexpr (std::is_same_v<T, ActStmt::UnsetAttr>)
                return x.prop == y.prop;
            else if constexpr (std::is_same_v<T, ActStmt::UnsetRefOrCmt>)
                return x.prop == y.prop && x.var == y.var;
            else if constexpr (std::is_same_v<T, ActStmt::Snapshot2>)
                return x.var == y.var && equal(x.body, y.body);
            else if constexpr (std::is_same_v<T, ActStmt::Seq>)
                return equal(x.first, y.first) && equal(x.second, y.second);
            else
                return true; // Unit
        },
        a->node);
}

bool equal(const StmtPtr& a, const StmtPtr& b) {
    if (a.get() == b.get()) return true;
    if (a->node.index() != b->node.index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b->node);
            if constexpr (std::is_same_v<T, Stmt::Snapshot>)
                return x.var == y.var && equal(x.body, y.body);
            else if constexpr (std::is_same_v<T, Stmt::Let>)
                return x.var == y.var && x.expr == y.expr && equal(x.body, y.body);
            else if constexpr (std::is_same_v<T, Stmt::LetCreate>)
                return x.var == y.var && x.cls == y.cls && equal(x.body, y.body);
            else if constexpr (std::is_same_v<T, Stmt::CreateRoot>)
                return x.cls == y.cls;
            else if constexpr (std::is_same_v<T, Stmt::DeleteRoot>)
                return x.var == y.var;
            else if constexpr (std::is_same_v<T, Stmt::Seq>)
                return equal(x.first, y.first) && equal(x.second, y.second);
            else
                return true; // Unit
        },
        a->node);
}

// ---------------------------------------------------------------------------
// Lexer

namespace {

enum class Tok { Ident, Int, Str, LParen, RParen, LBrace, RBrace, Semi, Comma, Eq, Dot, End };

struct Token {
    Tok kind;
    std::string text;
    int line;
    int col;
};

struct Lexer {
    const std::string& src;
    std::size_t pos = 0;
    int line = 1;
    int col = 1;

    [[noreturn]] void err(const std::string& m) const { throw ParseError(line, col, m); }

    char peek() const { return pos < src.size() ? src[pos] : '\0'; }
    char advance() {
        char c = src[pos++];
        if (c == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        return c;
    }

    Token next() {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(peek()))) advance();
        int l = line, c = col;
        if (pos >= src.size()) return {Tok::End, "", l, c};
        char ch = peek();
        switch (ch) {
            case '(': advance(); return {Tok::LParen, "(", l, c};
            case ')': advance(); return {Tok::RParen, ")", l, c};
            case '{': advance(); return {Tok::LBrace, "{", l, c};
            case '}': advance(); return {Tok::RBrace, "}", l, c};
            case ';': advance(); return {Tok::Semi, ";", l, c};
            case ',': advance(); return {Tok::Comma, ",", l, c};
            case '=': advance(); return {Tok::Eq, "=", l, c};
            case '.': advance(); return {Tok::Dot, ".", l, c};
            default: break;
        }
        if (ch == '"') {
            advance();
            std::string out;
            while (true) {
                if (pos >= src.size()) err("unterminated string literal");
                char d = advance();
                if (d == '"') break;
                if (d == '\\') {
                    if (pos >= src.size()) err("unterminated escape");
                    char e = advance();
                    switch (e) {
                        case '"': out += '"'; break;
                        case '\\': out += '\\'; break;
                        case 'n': out += '\n'; break;
                        case 't': out += '\t'; break;
                        default: err(std::string("unknown escape '\\") + e + "'");
                    }
                } else {
                    out += d;
                }
            }
            return {Tok::Str, out, l, c};
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) ||
            (ch == '-' && pos + 1 < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[pos + 1])))) {
            std::string out;
            if (ch == '-') out += advance();
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(peek())))
                out += advance();
            return {Tok::Int, out, l, c};
        }
        if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
            std::string out;
            while (pos < src.size() &&
                   (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_'))
                out += advance();
            return {Tok::Ident, out, l, c};
        }
        err(std::string("unexpected character '") + ch + "'");
    }
};

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    std::vector<Token> toks;
    std::size_t at = 0;

    const Token& cur() const { return toks[at]; }
    const Token& get() { return toks[at++]; }

    [[noreturn]] void err(const std::string& m) const {
        throw ParseError(cur().line, cur().col, m);
    }

    bool isIdent(const char* kw) const {
        return cur().kind == Tok::Ident && cur().text == kw;
    }

    void expect(Tok k, const char* what) {
        if (cur().kind != k) err(std::string("expected ") + what);
        ++at;
    }

    std::string expectString() {
        if (cur().kind != Tok::Str) err("expected string literal");
        return get().text;
    }

    std::string expectIdent() {
        if (cur().kind != Tok::Ident) err("expected identifier");
        return get().text;
    }

    std::string parseVar() {
        if (!isIdent("var")) err("expected var(\"...\")");
        ++at;
        expect(Tok::LParen, "'('");
        std::string name = expectString();
        expect(Tok::RParen, "')'");
        return name;
    }

    Expr parseExpr() {
        if (cur().kind == Tok::Str) return Expr::lit(Value(get().text));
        if (cur().kind == Tok::Int) {
            std::int64_t n = 0;
            const std::string& t = cur().text;
            auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), n);
            if (ec != std::errc{} || p != t.data() + t.size()) err("bad integer literal");
            ++at;
            return Expr::lit(Value(n));
        }
        if (isIdent("true")) {
            ++at;
            return Expr::lit(Value(true));
        }
        if (isIdent("false")) {
            ++at;
            return Expr::lit(Value(false));
        }
        if (isIdent("var")) return Expr::var(parseVar());
        if (isIdent("oid")) {
            ++at;
            expect(Tok::LParen, "'('");
            std::string o = expectString();
            expect(Tok::RParen, "')'");
            return Expr::oid(o);
        }
        err("expected expression");
    }

    ActPtr parseAct() {
        ActPtr first = parsePrimaryAct();
        if (cur().kind == Tok::Semi) {
            ++at;
            return actSeq(std::move(first), parseAct());
        }
        return first;
    }

    ActPtr parsePrimaryAct() {
        if (cur().kind == Tok::Dot) {
            ++at;
            return actUnit();
        }
        if (isIdent("let")) {
            ++at;
            std::string x = parseVar();
            expect(Tok::Eq, "'='");
            if (isIdent("create")) {
                ++at;
                expect(Tok::LParen, "'('");
                std::string prop = expectString();
                expect(Tok::Comma, "','");
                std::string cls = expectIdent();
                expect(Tok::RParen, "')'");
                if (!isIdent("in")) err("expected 'in'");
                ++at;
                return actLetCreate(std::move(x), std::move(prop), std::move(cls), parseAct());
            }
            Expr e = parseExpr();
            if (!isIdent("in")) err("expected 'in'");
            ++at;
            return actLet(std::move(x), std::move(e), parseAct());
        }
        if (isIdent("create")) {
            ++at;
            expect(Tok::LParen, "'('");
            std::string prop = expectString();
            expect(Tok::Comma, "','");
            std::string cls = expectIdent();
            expect(Tok::RParen, "')'");
            return actCreate(std::move(prop), std::move(cls));
        }
        if (isIdent("set")) {
            ++at;
            expect(Tok::LParen, "'('");
            std::string prop = expectString();
            expect(Tok::Comma, "','");
            Expr e = parseExpr();
            expect(Tok::RParen, "')'");
            return actSet(std::move(prop), std::move(e));
        }
        if (isIdent("setCmt")) {
            ++at;
            expect(Tok::LParen, "'('");
            std::string prop = expectString();
            expect(Tok::Comma, "','");
            std::string x = parseVar();
            expect(Tok::RParen, "')'");
            return actSetCmt(std::move(prop), std::move(x));
        }
        if (isIdent("unset")) {
            ++at;
            expect(Tok::LParen, "'('");
            std::string prop = expectString();
            if (cur().kind == Tok::Comma) {
                ++at;
                std::string x = parseVar();
                expect(Tok::RParen, "')'");
                return actUnset(std::move(prop), std::move(x));
            }
            expect(Tok::RParen, "')'");
            return actUnsetAttr(std::move(prop));
        }
        if (isIdent("snapshot2")) {
            ++at;
            std::string x = parseVar();
            expect(Tok::LBrace, "'{'");
            ActPtr body = parseAct();
            expect(Tok::RBrace, "'}'");
            return actSnapshot2(std::move(x), std::move(body));
        }
        err("expected an action");
    }

    StmtPtr parseStmt() {
        StmtPtr first = parsePrimaryStmt();
        if (cur().kind == Tok::Semi) {
            ++at;
            return stmtSeq(std::move(first), parseStmt());
        }
        return first;
    }

    StmtPtr parsePrimaryStmt() {
        if (cur().kind == Tok::LParen) {
            ++at;
            expect(Tok::RParen, "')'");
            return stmtUnit();
        }
        if (isIdent("let")) {
            ++at;
            std::string x = parseVar();
            expect(Tok::Eq, "'='");
            if (isIdent("create")) {
                ++at;
                expect(Tok::LParen, "'('");
                std::string cls = expectIdent();
                expect(Tok::RParen, "')'");
                if (!isIdent("in")) err("expected 'in'");
                ++at;
                return stmtLetCreate(std::move(x), std::move(cls), parseStmt());
            }
            Expr e = parseExpr();
            if (!isIdent("in")) err("expected 'in'");
            ++at;
            return stmtLet(std::move(x), std::move(e), parseStmt());
        }
        if (isIdent("snapshot")) {
            ++at;
            std::string x = parseVar();
            expect(Tok::LBrace, "'{'");
            ActPtr body = parseAct();
            expect(Tok::RBrace, "'}'");
            return stmtSnapshot(std::move(x), std::move(body));
        }
        if (isIdent("create")) {
            ++at;
            expect(Tok::LParen, "'('");
            std::string cls = expectIdent();
            expect(Tok::RParen, "')'");
            return stmtCreateRoot(std::move(cls));
        }
        if (isIdent("delete")) {
            ++at;
            expect(Tok::LParen, "'('");
            std::string x = parseVar();
            expect(Tok::RParen, "')'");
            return stmtDeleteRoot(std::move(x));
        }
        err("expected a statement");
    }
};

// ---------------------------------------------------------------------------
// Printer

std::string indentOf(int n) { return std::string(static_cast<std::size_t>(n) * 2, ' '); }

std::string fmtVar(const std::string& name) { return "var(" + quoteString(name) + ")"; }

std::string fmtExpr(const Expr& e) {
    if (const auto* l = std::get_if<Expr::Lit>(&e.node)) return l->value.toSource();
    if (const auto* v = std::get_if<Expr::Var>(&e.node)) return fmtVar(v->name);
    return "oid(" + quoteString(std::get<Expr::OidLit>(e.node).oid) + ")";
}

std::string fmtAct(const ActPtr& s, int indent);

std::string fmtActBlock(const ActPtr& body, int indent) {
    if (std::holds_alternative<ActStmt::Unit>(body->node)) return "{ . }";
    return "{\n" + indentOf(indent + 1) + fmtAct(body, indent + 1) + "\n" + indentOf(indent) +
           "}";
}

std::string fmtAct(const ActPtr& s, int indent) {
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ActStmt::Let>)
                return "let " + fmtVar(x.var) + " = " + fmtExpr(x.expr) + " in\n" +
                       indentOf(indent) + fmtAct(x.body, indent);
            else if constexpr (std::is_same_v<T, ActStmt::LetCreate>)
                return "let " + fmtVar(x.var) + " = create(" + quoteString(x.prop) + ", " +
                       x.cls + ") in\n" + indentOf(indent) + fmtAct(x.body, indent);
            else if constexpr (std::is_same_v<T, ActStmt::Create>)
                return "create(" + quoteString(x.prop) + ", " + x.cls + ")";
            else if constexpr (std::is_same_v<T, ActStmt::Set>)
                return "set(" + quoteString(x.prop) + ", " + fmtExpr(x.expr) + ")";
            else if constexpr (std::is_same_v<T, ActStmt::SetCmt>)
                return "setCmt(" + quoteString(x.prop) + ", " + fmtVar(x.var) + ")";
            else if constexpr (std::is_same_v<T, ActStmt::UnsetAttr>)
                return "unset(" + quoteString(x.prop) + ")";
            else if constexpr (std::is_same_v<T, ActStmt::UnsetRefOrCmt>)
                return "unset(" + quoteString(x.prop) + ", " + fmtVar(x.var) + ")";
            else if constexpr (std::is_same_v<T, ActStmt::Snapshot2>)
                return "snapshot2 " + fmtVar(x.var) + " " + fmtActBlock(x.body, indent);
            else if constexpr (std::is_same_v<T, ActStmt::Seq>)
                return fmtAct(x.first, indent) + ";\n" + indentOf(indent) +
                       fmtAct(x.second, indent);
            else
                return ".";
        },
        s->node);
}

std::string fmtStmt(const StmtPtr& s, int indent) {
    return std::visit(
        [&](const auto& x) -> std::string {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Stmt::Snapshot>)
                return "snapshot " + fmtVar(x.var) + " " + fmtActBlock(x.body, indent);
            else if constexpr (std::is_same_v<T, Stmt::Let>)
                return "let " + fmtVar(x.var) + " = " + fmtExpr(x.expr) + " in\n" +
                       indentOf(indent) + fmtStmt(x.body, indent);
            else if constexpr (std::is_same_v<T, Stmt::LetCreate>)
                return "let " + fmtVar(x.var) + " = create(" + x.cls + ") in\n" +
                       indentOf(indent) + fmtStmt(x.body, indent);
            else if constexpr (std::is_same_v<T, Stmt::CreateRoot>)
                return "create(" + x.cls + ")";
            else if constexpr (std::is_same_v<T, Stmt::DeleteRoot>)
                return "delete(" + fmtVar(x.var) + ")";
            else if constexpr (std::is_same_v<T, Stmt::Seq>)
                return fmtStmt(x.first, indent) + ";\n" + indentOf(indent) +
                       fmtStmt(x.second, indent);
            else
                return "()";
        },
        s->node);
}

} // namespace

StmtPtr parse(const std::string& source) {
    Lexer lex{source};
    Parser p;
    while (true) {
        Token t = lex.next();
        bool end = t.kind == Tok::End;
        p.toks.push_back(std::move(t));
        if (end) break;
    }
    StmtPtr s = p.parseStmt();
    if (p.cur().kind != Tok::End) p.err("trailing input after program");
    return s;
}

std::string format(const StmtPtr& s) { return fmtStmt(s, 0); }
std::string format(const ActPtr& s) { return fmtAct(s, 0); }
std::string format(const Expr& e) { return fmtExpr(e); }

// ---------------------------------------------------------------------------
// Free variables

std::set<std::string> freeVars(const Expr& e) {
    if (const auto* v = std::get_if<Expr::Var>(&e.node)) return {v->name};
    return {};
}

std::set<std::string> freeVars(const ActPtr& s) {
    return std::visit(
        [&](const auto& x) -> std::set<std::string> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ActStmt::Let>) {
                auto fv = freeVars(x.body);
                fv.erase(x.var);
                auto fe = freeVars(x.expr);
                fv.insert(fe.begin(), fe.end());
                return fv;
            } else if constexpr (std::is_same_v<T, ActStmt::LetCreate>) {
                auto fv = freeVars(x.body);
                fv.erase(x.var);
                return fv;
            } else if constexpr (std::is_same_v<T, ActStmt::Set>) {
                return freeVars(x.expr);
            } else if constexpr (std::is_same_v<T, ActStmt::SetCmt>) {
                return {x.var};
            } else if constexpr (std::is_same_v<T, ActStmt::UnsetRefOrCmt>) {
                return {x.var};
            } else if constexpr (std::is_same_v<T, ActStmt::Snapshot2>) {
                auto fv = freeVars(x.body);
                fv.insert(x.var);
                return fv;
            } else if constexpr (std::is_same_v<T, ActStmt::Seq>) {
                auto fv = freeVars(x.first);
                auto f2 = freeVars(x.second);
                fv.insert(f2.begin(), f2.end());
                return fv;
            } else {
                return {}; // Create, UnsetAttr, Unit
            }
        },
        s->node);
}

std::set<std::string> freeVars(const StmtPtr& s) {
    return std::visit(
        [&](const auto& x) -> std::set<std::string> {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Stmt::Snapshot>) {
                auto fv = freeVars(x.body);
                fv.insert(x.var);
                return fv;
            } else if constexpr (std::is_same_v<T, Stmt::Let>) {
                auto fv = freeVars(x.body);
                fv.erase(x.var);
                auto fe = freeVars(x.expr);
                fv.insert(fe.begin(), fe.end());
                return fv;
            } else if constexpr (std::is_same_v<T, Stmt::LetCreate>) {
                auto fv = freeVars(x.body);
                fv.erase(x.var);
                return fv;
            } else if constexpr (std::is_same_v<T, Stmt::DeleteRoot>) {
                return {x.var};
            } else if constexpr (std::is_same_v<T, Stmt::Seq>) {
                auto fv = freeVars(x.first);
                auto f2 = freeVars(x.second);
                fv.insert(f2.begin(), f2.end());
                return fv;
            } else {
                return {}; // CreateRoot, Unit
            }
        },
        s->node);
}

bool closed(const StmtPtr& s) { return freeVars(s).empty(); }

// ---------------------------------------------------------------------------
// Measure

std::uint64_t measure(const Expr&) { return 1; }

std::uint64_t measure(const ActPtr& s) {
    return std::visit(
        [&](const auto& x) -> std::uint64_t {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, ActStmt::Let>)
                return 1 + measure(x.expr) + measure(x.body);
            else if constexpr (std::is_same_v<T, ActStmt::LetCreate>)
                return 2 + measure(x.body);
            else if constexpr (std::is_same_v<T, ActStmt::Set>)
                return 1 + measure(x.expr);
            else if constexpr (std::is_same_v<T, ActStmt::SetCmt>)
                return 2; // set with a variable operand
            else if constexpr (std::is_same_v<T, ActStmt::Snapshot2>)
                return 1 + measure(x.body);
            else if constexpr (std::is_same_v<T, ActStmt::Seq>)
                return 1 + measure(x.first) + measure(x.second);
            else
                return 1; // Create, UnsetAttr, UnsetRefOrCmt, Unit
        },
        s->node);
}

std::uint64_t measure(const StmtPtr& s) {
    return std::visit(
        [&](const auto& x) -> std::uint64_t {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Stmt::Snapshot>)
                return 1 + measure(x.body);
            else if constexpr (std::is_same_v<T, Stmt::Let>)
                return 1 + measure(x.expr) + measure(x.body);
            else if constexpr (std::is_same_v<T, Stmt::LetCreate>)
                return 2 + measure(x.body);
            else if constexpr (std::is_same_v<T, Stmt::Seq>)
                return 1 + measure(x.first) + measure(x.second);
            else
                return 1; // CreateRoot, DeleteRoot, Unit
        },
        s->node);
}

} // namespace fmadsl
