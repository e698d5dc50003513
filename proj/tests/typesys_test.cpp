#include <doctest.h>

#include "fma/typesys.hpp"

#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace fmadsl;

namespace {

ObjectType fieldsOf(std::initializer_list<ObjectType::Field> fs) {
    return ObjectType::withFields(std::vector<ObjectType::Field>(fs));
}

ObjectNode carObj(const Oid& oid) {
    return ObjectNode{oid,
                      {PropertyBinding{"wheels", Value(std::int64_t{4})},
                       PropertyBinding{"doors", Value(std::int64_t{5})}},
                      0};
}

ObjectNode truckObj(const Oid& oid) {
    return ObjectNode{oid,
                      {PropertyBinding{"wheels", Value(std::int64_t{6})},
                       PropertyBinding{"load", Value(std::int64_t{3000})}},
                      0};
}

} // namespace

TEST_CASE("the empty type subsumes everything; bottom is below everything") {
    ModelType cd = fixtures::mm("cd.mm.json");
    for (const auto& c : cd.classOrder()) {
        CHECK(subtypeOf(cd, cd.classType(c), ObjectType::empty()));
        CHECK(subtypeOf(cd, ObjectType::bottom(), cd.classType(c)));
        CHECK_FALSE(subtypeOf(cd, cd.classType(c), ObjectType::bottom()));
    }
    CHECK(subtypeOf(cd, ObjectType::empty(), ObjectType::empty()));
    CHECK(subtypeOf(cd, ObjectType::bottom(), ObjectType::bottom()));
    CHECK_FALSE(subtypeOf(cd, ObjectType::empty(), ObjectType::bottom()));
}

TEST_CASE("subtyping is reflexive on every class of every fixture") {
    for (const auto* name : {"cd.mm.json", "cd2.mm.json", "graph.mm.json", "sm.mm.json"}) {
        ModelType mm = fixtures::mm(name);
        for (const auto& c : mm.classOrder())
            CHECK(subtypeOf(mm, mm.classType(c), mm.classType(c)));
    }
}

TEST_CASE("subtyping is transitive over all class triples of each fixture") {
    for (const auto* name : {"cd.mm.json", "cd2.mm.json", "graph.mm.json", "sm.mm.json"}) {
        ModelType mm = fixtures::mm(name);
        for (const auto& a : mm.classOrder())
            for (const auto& b : mm.classOrder())
                for (const auto& c : mm.classOrder()) {
                    bool ab = subtypeOf(mm, mm.classType(a), mm.classType(b));
                    bool bc = subtypeOf(mm, mm.classType(b), mm.classType(c));
                    if (ab && bc)
                        CHECK(subtypeOf(mm, mm.classType(a), mm.classType(c)));
                }
    }
}

TEST_CASE("declared subclassing implies structural subtyping") {
    for (const auto* name : {"cd.mm.json", "cd2.mm.json", "graph.mm.json", "sm.mm.json"}) {
        ModelType mm = fixtures::mm(name);
        for (const auto& [sub, super] : mm.subclassPairs())
            CHECK(subtypeOf(mm, mm.classType(sub), mm.classType(super)));
    }
}

TEST_CASE("memoized decision agrees with bounded unfolding on all class pairs") {
    for (const auto* name : {"cd.mm.json", "cd2.mm.json", "graph.mm.json", "sm.mm.json"}) {
        ModelType mm = fixtures::mm(name);
        int budget = static_cast<int>(mm.classOrder().size() * mm.classOrder().size()) + 1;
        for (const auto& a : mm.classOrder())
            for (const auto& b : mm.classOrder()) {
                bool fast = subtypeOf(mm, mm.classType(a), mm.classType(b));
                bool slow = oracles::boundedSubtype(mm, mm.classType(a), mm.classType(b),
                                                    budget);
                CHECK(fast == slow);
            }
    }
}

TEST_CASE("state machines subsume under graphs on the name-aligned fixtures") {
    ModelType sm = fixtures::mm("sm.mm.json");
    ModelType graph = fixtures::mm("graph.mm.json");
    // The cyclic src/tgt/owner references exercise the memo.
    CHECK(subtypeOfCross(sm, graph, sm.classType("StateMachine"), graph.classType("Graph")));
    CHECK(modelSubtype(sm, graph));
    CHECK(modelSubtype(sm, sm));
    CHECK(modelSubtype(graph, graph));
    CHECK_FALSE(modelSubtype(graph, sm)); // State requires "initial"

    ModelType renamed = fixtures::mm("sm_renamed.mm.json");
    CHECK_FALSE(modelSubtype(renamed, graph));
}

TEST_CASE("refines checks names exactly and types by subsumption") {
    ModelType cd = fixtures::mm("cd.mm.json");
    CHECK(refines(cd, ObjectType::empty(), ObjectType::empty()));
    ObjectType nameOnly = fieldsOf({{"name", FieldType::attr(BaseType::String)}});
    ObjectType extra = fieldsOf({{"name", FieldType::attr(BaseType::String)},
                                 {"extra", FieldType::attr(BaseType::Integer)}});
    CHECK_FALSE(refines(cd, extra, nameOnly));
    ObjectType propLike = fieldsOf({{"name", FieldType::attr(BaseType::String)},
                                    {"type", FieldType::attr(BaseType::String)}});
    CHECK(refines(cd, propLike, cd.classType("Property")));
    // Empty markers in inferred slots are tolerated.
    ObjectType pkgLike = fieldsOf({{"name", FieldType::attr(BaseType::String)},
                                   {"classes", FieldType::cmt(ClassRef::bottom())}});
    CHECK(refines(cd, pkgLike, cd.classType("Package")));
}

TEST_CASE("an empty reference collection infers the bottom reference type") {
    ModelType cd = fixtures::mm("cd.mm.json");
    InferResult r = inferType(cd, {}, {}, Term{RefCollection{}});
    const auto& t = std::get<ScalarType>(std::get<InferredType>(r));
    CHECK(t == ScalarType::refTo(ClassRef::bottom()));
}

TEST_CASE("a property object infers its class") {
    ModelType cd = fixtures::mm("cd.mm.json");
    TypeEnvOids pi{{"3", "Property"}};
    ObjectNode prop{"3",
                    {PropertyBinding{"name", Value(std::string("n"))},
                     PropertyBinding{"type", Value(std::string("String"))}},
                    0};
    InferResult r = inferType(cd, {}, pi, Term{prop});
    CHECK(std::get<ClassRef>(std::get<InferredType>(r)) == ClassRef::named("Property"));
}

TEST_CASE("an object with a missing or extra property fails to refine") {
    ModelType cd = fixtures::mm("cd.mm.json");
    TypeEnvOids pi{{"3", "Property"}};
    ObjectNode missing{"3", {PropertyBinding{"name", Value(std::string("n"))}}, 0};
    CHECK(std::holds_alternative<TypeError>(inferType(cd, {}, pi, Term{missing})));
    ObjectNode extra{"3",
                     {PropertyBinding{"name", Value(std::string("n"))},
                      PropertyBinding{"type", Value(std::string("t"))},
                      PropertyBinding{"bogus", Value(std::int64_t{1})}},
                     0};
    CHECK(std::holds_alternative<TypeError>(inferType(cd, {}, pi, Term{extra})));
}

TEST_CASE("a mixed collection infers the meet of its element classes") {
    ModelType cd2 = fixtures::mm("cd2.mm.json");
    TypeEnvOids pi{{"c1", "Car"}, {"t1", "Truck"}};
    ObjectSet set{carObj("c1"), truckObj("t1")};
    InferResult r = inferType(cd2, {}, pi, Term{set});
    CHECK(std::get<ClassRef>(std::get<InferredType>(r)) == ClassRef::named("Vehicle"));
}

TEST_CASE("collection inference agrees with the try-all-rules oracle") {
    ModelType cd2 = fixtures::mm("cd2.mm.json");
    std::vector<std::string> classes = cd2.classOrder();
    // All element-class sequences up to length 3.
    std::vector<std::vector<ClassRef>> inputs{{}};
    for (const auto& a : classes) {
        inputs.push_back({ClassRef::named(a)});
        for (const auto& b : classes) {
            inputs.push_back({ClassRef::named(a), ClassRef::named(b)});
            for (const auto& c : classes)
                inputs.push_back(
                    {ClassRef::named(a), ClassRef::named(b), ClassRef::named(c)});
        }
    }
    for (const auto& elements : inputs) {
        auto oracle = oracles::allCollectionTypes(cd2, elements);
        // Unique typing: exhaustive rule application yields one type.
        CHECK(oracle.size() == 1);
        // The dispatch order used by the implementation picks the same type.
        ClassRef acc = ClassRef::bottom();
        for (auto it = elements.rbegin(); it != elements.rend(); ++it) {
            const ObjectType& t1 = cd2.classType(*it);
            const ObjectType& t2 = cd2.classType(acc);
            if (subtypeOf(cd2, t1, t2)) continue;
            if (subtypeOf(cd2, t2, t1)) acc = *it;
            else acc = cd2.meet(*it, acc);
        }
        CHECK(*oracle.begin() == acc);
    }
}

TEST_CASE("the pull-up fixture conforms before and after the refactoring shape") {
    ModelType cd = fixtures::mm("cd.mm.json");
    StructuredModel m = fixtures::model("cd.model.json");
    CHECK(conforms(cd, m));
}

TEST_CASE("an extra root below the root class breaks conformance") {
    ModelType cd = fixtures::mm("cd.mm.json");
    StructuredModel m = fixtures::model("cd.model.json");
    ObjectNode stray{"9",
                     {PropertyBinding{"name", Value(std::string("s"))},
                      PropertyBinding{"type", Value(std::string("t"))}},
                     1};
    m.roots.push_back(stray);
    m.typing["9"] = "Property";
    CHECK_FALSE(conforms(cd, m));
}

TEST_CASE("an ill-typed attribute breaks conformance") {
    ModelType cd = fixtures::mm("cd.mm.json");
    StructuredModel m = fixtures::model("cd.model.json");
    auto locs = locations(m.roots);
    auto [rest, prop] = extract(m.roots, locs.at("3"));
    prop.findProp("name")->payload = Value(std::int64_t{7});
    m.roots = insert(rest, prop, locs.at("3"));
    auto diag = conformsDiag(cd, m);
    CHECK_FALSE(diag.ok);
    REQUIRE(diag.error.has_value());
    CHECK(diag.error->rule == "T-Obj");
}

TEST_CASE("the empty model conforms to any metamodel") {
    for (const auto* name : {"cd.mm.json", "graph.mm.json", "sm.mm.json"}) {
        ModelType mm = fixtures::mm(name);
        CHECK(conforms(mm, StructuredModel{}));
    }
}
