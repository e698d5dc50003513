#include <doctest.h>

#include <random>

#include "fma/json_io.hpp"
#include "fma/model.hpp"
#include "fma/testkit.hpp"

#include "support/fixtures.hpp"

using namespace fmadsl;

namespace {

ObjectNode leaf(const Oid& oid) { return ObjectNode{oid, {}, 0}; }

Location rootLoc(const Oid& oid) {
    Location l;
    l.target = oid;
    return l;
}

Location at(std::initializer_list<Location::Step> steps, const Oid& target) {
    Location l;
    l.steps = steps;
    l.target = target;
    return l;
}

/// Oracle: the multiset of identifiers reachable in a set.
std::set<Oid> oidsOf(const ObjectSet& set) { return allOids(set); }

} // namespace

TEST_CASE("extract a root from a singleton set") {
    ObjectSet m{leaf("a")};
    auto [rest, node] = extract(m, rootLoc("a"));
    CHECK(rest.empty());
    CHECK(node.oid == "a");
}

TEST_CASE("extract the Vehicle class from the pull-up fixture") {
    StructuredModel m = fixtures::model("cd.model.json");
    Location loc = at({{"0", "classes"}}, "1");
    auto [rest, node] = extract(m.roots, loc);
    CHECK(node.oid == "1");
    // Oracle: re-walk both trees and compare identifier sets.
    std::set<Oid> before = oidsOf(m.roots);
    std::set<Oid> after = oidsOf(rest);
    std::set<Oid> sub = subtreeOids(node);
    CHECK(after.size() + sub.size() == before.size());
    for (const auto& o : sub) CHECK(after.count(o) == 0);
    for (const auto& o : after) CHECK(before.count(o) == 1);
}

TEST_CASE("extract a nested property empties its containment only") {
    StructuredModel m = fixtures::model("cd.model.json");
    Location loc = at({{"0", "classes"}, {"2", "properties"}}, "3");
    auto [rest, node] = extract(m.roots, loc);
    CHECK(node.oid == "3");
    CHECK(oidsOf(rest) == std::set<Oid>{"0", "1", "2", "4", "5"});
    // Car keeps an empty properties collection.
    auto locs = locations(rest);
    CHECK(locs.count("2") == 1);
    CHECK(locs.count("3") == 0);
}

TEST_CASE("extract of an unresolvable location fails") {
    ObjectSet m{leaf("a")};
    CHECK_THROWS_AS((void)extract(m, rootLoc("zz")), ModelError);
    try {
        (void)extract(m, rootLoc("zz"));
    } catch (const ModelError& e) {
        CHECK(e.code == ModelError::Code::LocationNotFound);
    }
}

TEST_CASE("insert into the empty set") {
    ObjectSet out = insert({}, leaf("a"), rootLoc("a"));
    REQUIRE(out.size() == 1);
    CHECK(out[0].oid == "a");
}

TEST_CASE("insert rejects a target mismatch") {
    CHECK_THROWS_AS((void)insert({}, leaf("a"), rootLoc("b")), ModelError);
}

TEST_CASE("insert without a parent containment fails") {
    ObjectSet m{leaf("a")};
    Location bad = at({{"a", "kids"}}, "b");
    CHECK_THROWS_AS((void)insert(m, leaf("b"), bad), ModelError);
}

TEST_CASE("insert is a no-op when the slot is taken") {
    ObjectSet m{leaf("a")};
    ObjectSet out = insert(m, leaf("a"), rootLoc("a"));
    CHECK(out == m);
}

TEST_CASE("extract/insert round-trips every location of the fixture") {
    StructuredModel m = fixtures::model("cd.model.json");
    for (const auto& [oid, loc] : locations(m.roots)) {
        auto [rest, node] = extract(m.roots, loc);
        ObjectSet back = insert(rest, node, loc);
        CHECK(back == m.roots);
    }
}

TEST_CASE("insert puts a property under Vehicle") {
    StructuredModel m = fixtures::model("cd.model.json");
    auto [rest, prop] = extract(m.roots, at({{"0", "classes"}, {"2", "properties"}}, "3"));
    ObjectSet out = insert(rest, prop, at({{"0", "classes"}, {"1", "properties"}}, "3"));
    auto locs = locations(out);
    Location expected = at({{"0", "classes"}, {"1", "properties"}}, "3");
    CHECK(locs.at("3") == expected);
}

TEST_CASE("locations of the empty set and singleton") {
    CHECK(locations({}).empty());
    ObjectSet m{leaf("a")};
    auto locs = locations(m);
    REQUIRE(locs.size() == 1);
    CHECK(locs.at("a") == rootLoc("a"));
}

TEST_CASE("locations covers the pull-up fixture") {
    StructuredModel m = fixtures::model("cd.model.json");
    auto locs = locations(m.roots);
    CHECK(locs.size() == 6);
    CHECK(locs.at("3") == at({{"0", "classes"}, {"2", "properties"}}, "3"));
    // Soundness: each location extracts the node carrying its identifier.
    for (const auto& [oid, loc] : locs) {
        auto [rest, node] = extract(m.roots, loc);
        CHECK(node.oid == oid);
    }
}

TEST_CASE("locations rejects duplicate identifiers") {
    ObjectSet m{leaf("a"), leaf("a")};
    CHECK_THROWS_AS((void)locations(m), ModelError);
}

TEST_CASE("isolated: lone object") {
    ObjectSet m{leaf("a")};
    CHECK(isolated(m[0], m));
}

TEST_CASE("isolated respects references from outside the subtree") {
    // A variant of the fixture where a class references a property.
    StructuredModel m = fixtures::model("cd.model.json");
    auto locs = locations(m.roots);
    auto [rest3, prop3] = extract(m.roots, locs.at("3"));

    StructuredModel annotated = fixtures::model("cd.model.json");
    ObjectSet& roots = annotated.roots;
    auto& pkg = roots[0];
    auto& classes = std::get<CmtSet>(pkg.findProp("classes")->payload).children;
    classes[0].props.push_back(PropertyBinding{"annotations", RefSet{{"3"}}});
    CHECK_FALSE(isolated(prop3, annotated.roots));

    // Property 5 is referenced nowhere in the plain fixture.
    auto [rest5, prop5] = extract(m.roots, locs.at("5"));
    CHECK(isolated(prop5, m.roots));
}

TEST_CASE("references inside the subtree do not block isolation") {
    // a contains b; b references a's child c (all within the subtree of a).
    ObjectNode c = leaf("c");
    ObjectNode b{"b", {PropertyBinding{"r", RefSet{{"c"}}}}, 0};
    ObjectNode a{"a", {PropertyBinding{"kids", CmtSet{{b, c}}}}, 0};
    ObjectSet m{a};
    CHECK(isolated(m[0], m));
}

TEST_CASE("round trip holds on generated models and random locations") {
    ModelType mm = fixtures::mm("graph.mm.json");
    std::mt19937_64 rng(42);
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        testkit::GenSpec spec;
        spec.seed = seed;
        StructuredModel m = testkit::genModel(mm, spec);
        auto locs = locations(m.roots);
        std::vector<Location> all;
        for (const auto& [oid, loc] : locs) all.push_back(loc);
        for (int i = 0; i < 4 && !all.empty(); ++i) {
            const Location& loc = all[rng() % all.size()];
            auto [rest, node] = extract(m.roots, loc);
            CHECK(insert(rest, node, loc) == m.roots);
        }
    }
}

TEST_CASE("model JSON round-trips") {
    StructuredModel m = fixtures::model("cd.model.json");
    StructuredModel again = parseModel(writeModel(m));
    CHECK(again == m);
    CHECK(writeModel(again) == writeModel(m));
}

TEST_CASE("model JSON rejects duplicate identifiers") {
    CHECK_THROWS_AS(
        (void)parseModel(R"({"roots":[{"oid":"a","class":"C","props":{}},
                             {"oid":"a","class":"C","props":{}}]})"),
        IoError);
}
