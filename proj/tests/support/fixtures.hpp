#pragma once

#include <random>
#include <string>

#include "fma/json_io.hpp"
#include "fma/metamodel.hpp"
#include "fma/model.hpp"
#include "fma/syntax.hpp"

namespace fixtures {

inline std::string path(const std::string& name) {
    return std::string(FMA_FIXTURE_DIR) + "/" + name;
}

inline fmadsl::ModelType mm(const std::string& name) {
    return fmadsl::loadMetamodelFile(path(name));
}

inline fmadsl::StructuredModel model(const std::string& name) {
    return fmadsl::loadModelFile(path(name));
}

inline std::string text(const std::string& name) { return fmadsl::readTextFile(path(name)); }

// ---------------------------------------------------------------------------
// Random ASTs for round-trip and robustness properties.

inline fmadsl::Expr randomExpr(std::mt19937_64& rng) {
    static const char* vars[] = {"a", "b", "c"};
    static const char* oids[] = {"1", "2", "x$0"};
    switch (rng() % 5) {
        case 0: return fmadsl::Expr::lit(fmadsl::Value(std::string("s") +
                                                       std::to_string(rng() % 10)));
        case 1: return fmadsl::Expr::lit(fmadsl::Value(static_cast<std::int64_t>(rng() % 50)));
        case 2: return fmadsl::Expr::lit(fmadsl::Value(rng() % 2 == 0));
        case 3: return fmadsl::Expr::var(vars[rng() % 3]);
        default: return fmadsl::Expr::oid(oids[rng() % 3]);
    }
}

inline fmadsl::ActPtr randomAct(std::mt19937_64& rng, int depth) {
    static const char* vars[] = {"a", "b", "c"};
    static const char* props[] = {"p", "q", "properties"};
    static const char* classes[] = {"C", "D", "Property"};
    if (depth <= 0) {
        switch (rng() % 5) {
            case 0: return fmadsl::actUnit();
            case 1: return fmadsl::actCreate(props[rng() % 3], classes[rng() % 3]);
            case 2: return fmadsl::actSet(props[rng() % 3], randomExpr(rng));
            case 3: return fmadsl::actUnsetAttr(props[rng() % 3]);
            default: return fmadsl::actSetCmt(props[rng() % 3], vars[rng() % 3]);
        }
    }
    switch (rng() % 6) {
        case 0:
            return fmadsl::actLet(vars[rng() % 3], randomExpr(rng), randomAct(rng, depth - 1));
        case 1:
            return fmadsl::actLetCreate(vars[rng() % 3], props[rng() % 3], classes[rng() % 3],
                                        randomAct(rng, depth - 1));
        case 2:
            return fmadsl::actSnapshot2(vars[rng() % 3], randomAct(rng, depth - 1));
        case 3:
            return fmadsl::actSeq(randomAct(rng, depth - 1), randomAct(rng, depth - 1));
        case 4: return fmadsl::actUnset(props[rng() % 3], vars[rng() % 3]);
        default: return randomAct(rng, 0);
    }
}

inline fmadsl::StmtPtr randomStmt(std::mt19937_64& rng, int depth) {
    static const char* vars[] = {"a", "b", "c"};
    static const char* classes[] = {"C", "D", "Package"};
    if (depth <= 0) {
        switch (rng() % 3) {
            case 0: return fmadsl::stmtUnit();
            case 1: return fmadsl::stmtCreateRoot(classes[rng() % 3]);
            default: return fmadsl::stmtDeleteRoot(vars[rng() % 3]);
        }
    }
    switch (rng() % 5) {
        case 0:
            return fmadsl::stmtLet(vars[rng() % 3], randomExpr(rng),
                                   randomStmt(rng, depth - 1));
        case 1:
            return fmadsl::stmtLetCreate(vars[rng() % 3], classes[rng() % 3],
                                         randomStmt(rng, depth - 1));
        case 2:
            return fmadsl::stmtSnapshot(vars[rng() % 3], randomAct(rng, depth - 1));
        case 3:
            return fmadsl::stmtSeq(randomStmt(rng, depth - 1), randomStmt(rng, depth - 1));
        default: return randomStmt(rng, 0);
    }
}

} // namespace fixtures
