#include <doctest.h>

#include "fma/json_io.hpp"
#include "fma/metamodel.hpp"

#include "support/fixtures.hpp"

using namespace fmadsl;

namespace {

MetamodelDoc minimalDoc() {
    MetamodelDoc doc;
    doc.name = "minimal";
    doc.root = "R";
    MetamodelDoc::Class r;
    r.name = "R";
    r.properties.push_back({"name", FieldType::attr(BaseType::String), std::nullopt});
    doc.classes.push_back(std::move(r));
    return doc;
}

MetamodelError::Code buildError(const MetamodelDoc& doc) {
    try {
        (void)buildMetamodel(doc);
    } catch (const MetamodelError& e) {
        return e.code;
    }
    FAIL("expected the build to be rejected");
    return MetamodelError::Code::BadDocument;
}

} // namespace

TEST_CASE("minimal metamodel builds") {
    ModelType mm = buildMetamodel(minimalDoc());
    CHECK(mm.root() == "R");
    const ObjectType& r = mm.classType("R");
    REQUIRE(r.fields.size() == 1);
    CHECK(r.fields[0].name == "name");
    CHECK(r.fields[0].type == FieldType::attr(BaseType::String));
    CHECK(mm.subclassPairs() == std::set<std::pair<std::string, std::string>>{{"R", "R"}});
}

TEST_CASE("class-diagram fixture builds with three classes") {
    ModelType cd = fixtures::mm("cd.mm.json");
    CHECK(cd.classOrder().size() == 3);
    CHECK(cd.root() == "Package");
    const ObjectType& prop = cd.classType("Property");
    REQUIRE(prop.fields.size() == 2);
    CHECK(prop.fields[0].name == "name");
    CHECK(prop.fields[1].name == "type");
    CHECK(prop.fields[1].type == FieldType::attr(BaseType::String));
}

TEST_CASE("class_type resolves the inference markers") {
    ModelType cd = fixtures::mm("cd.mm.json");
    CHECK(cd.classType(ClassRef::any()).isEmpty());
    CHECK(cd.classType(ClassRef::bottom()).isBottom());
    CHECK_THROWS_AS((void)cd.classType("Banana"), MetamodelError);
}

TEST_CASE("containment opposite to containment is rejected") {
    try {
        (void)fixtures::mm("badopp.mm.json");
        FAIL("expected rejection");
    } catch (const MetamodelError& e) {
        CHECK(e.code == MetamodelError::Code::CmtOppositeCmt);
    }
}

TEST_CASE("one-sided opposites are rejected") {
    MetamodelDoc doc = minimalDoc();
    MetamodelDoc::Class a;
    a.name = "A";
    a.properties.push_back(
        {"other", FieldType::ref(ClassRef::named("A")), std::string("missing")});
    doc.classes.push_back(std::move(a));
    CHECK(buildError(doc) == MetamodelError::Code::NonInvolutiveOpposite);
}

TEST_CASE("duplicate class declarations are rejected") {
    MetamodelDoc doc = minimalDoc();
    doc.classes.push_back(doc.classes[0]);
    CHECK(buildError(doc) == MetamodelError::Code::DuplicateClass);
}

TEST_CASE("structurally identical classes are rejected") {
    MetamodelDoc doc = minimalDoc();
    MetamodelDoc::Class twin = doc.classes[0];
    twin.name = "S";
    doc.classes.push_back(std::move(twin));
    CHECK(buildError(doc) == MetamodelError::Code::NonInjectiveCl);
}

TEST_CASE("unknown root is rejected") {
    MetamodelDoc doc = minimalDoc();
    doc.root = "Nope";
    CHECK(buildError(doc) == MetamodelError::Code::UnknownRoot);
}

TEST_CASE("cyclic inheritance is rejected") {
    MetamodelDoc doc = minimalDoc();
    MetamodelDoc::Class a, b;
    a.name = "A";
    a.supertypes = {"B"};
    a.properties.push_back({"x", FieldType::attr(BaseType::Integer), std::nullopt});
    b.name = "B";
    b.supertypes = {"A"};
    b.properties.push_back({"y", FieldType::attr(BaseType::Boolean), std::nullopt});
    doc.classes.push_back(std::move(a));
    doc.classes.push_back(std::move(b));
    CHECK(buildError(doc) == MetamodelError::Code::CyclicInheritance);
}

TEST_CASE("inherited fields are flattened in declaration order") {
    ModelType cd2 = fixtures::mm("cd2.mm.json");
    const ObjectType& car = cd2.classType("Car");
    REQUIRE(car.fields.size() == 2);
    CHECK(car.fields[0].name == "wheels");
    CHECK(car.fields[1].name == "doors");
    CHECK(cd2.isSubclass("Car", "Vehicle"));
    CHECK(cd2.isSubclass("Car", "Car"));
    CHECK_FALSE(cd2.isSubclass("Vehicle", "Car"));
}

TEST_CASE("default properties use zero values and empty collections") {
    ModelType cd = fixtures::mm("cd.mm.json");
    auto defaults = cd.defaultProps("Property");
    REQUIRE(defaults.size() == 2);
    CHECK(defaults[0].name == "name");
    CHECK(std::get<Value>(defaults[0].payload) == Value(std::string{}));
    CHECK(defaults[1].name == "type");
    CHECK(std::get<Value>(defaults[1].payload) == Value(std::string{}));

    auto pkg = cd.defaultProps("Package");
    REQUIRE(pkg.size() == 2);
    CHECK(std::get<CmtSet>(pkg[1].payload).children.empty());

    CHECK_THROWS_AS((void)cd.defaultProps("UnknownC"), MetamodelError);
}

TEST_CASE("default properties point the declared opposite at the container") {
    ModelType graph = fixtures::mm("graph.mm.json");
    auto defaults = graph.defaultProps("Node", std::pair<Oid, std::string>{"g1", "owner"});
    const PropertyBinding* owner = nullptr;
    for (const auto& b : defaults)
        if (b.name == "owner") owner = &b;
    REQUIRE(owner != nullptr);
    CHECK(std::get<RefSet>(owner->payload).ids == std::vector<Oid>{"g1"});
}

TEST_CASE("opposites resolve both directions and through inheritance") {
    ModelType cd = fixtures::mm("cd.mm.json");
    CHECK_FALSE(cd.opposite(ReferenceEnd::cmtEnd("Class", "properties")).has_value());

    ModelType graph = fixtures::mm("graph.mm.json");
    auto opp = graph.opposite(ReferenceEnd::refEnd("Edge", "src"));
    REQUIRE(opp.has_value());
    CHECK(*opp == ReferenceEnd::refEnd("Node", "outgoing"));

    auto inherited = graph.opposite(ReferenceEnd::refEnd("SubEdge", "src"));
    REQUIRE(inherited.has_value());
    CHECK(*inherited == ReferenceEnd::refEnd("Node", "outgoing"));

    auto back = graph.opposite(ReferenceEnd::refEnd("Node", "owner"));
    REQUIRE(back.has_value());
    CHECK(*back == ReferenceEnd::cmtEnd("Graph", "nodes"));
}

TEST_CASE("opposite table is involutive and never pairs two containments") {
    for (const auto* name : {"cd.mm.json", "graph.mm.json", "sm.mm.json", "cd2.mm.json"}) {
        ModelType mm = fixtures::mm(name);
        for (const auto& [e1, e2] : mm.oppositeTable()) {
            auto back = mm.opposite(e2);
            REQUIRE(back.has_value());
            CHECK(*back == e1);
            bool bothCmt = e1.kind == ReferenceEnd::Kind::Cmt &&
                           e2.kind == ReferenceEnd::Kind::Cmt;
            CHECK_FALSE(bothCmt);
        }
    }
}

TEST_CASE("subclass closure is reflexive and transitive") {
    ModelType cd2 = fixtures::mm("cd2.mm.json");
    const auto& sr = cd2.subclassPairs();
    for (const auto& c : cd2.classOrder()) CHECK(sr.count({c, c}) == 1);
    for (const auto& [a, b] : sr)
        for (const auto& [c, d] : sr)
            if (b == c) CHECK(sr.count({a, d}) == 1);
}

TEST_CASE("meet on the inheritance fixture") {
    ModelType cd2 = fixtures::mm("cd2.mm.json");
    ClassRef car = ClassRef::named("Car");
    ClassRef truck = ClassRef::named("Truck");
    CHECK(cd2.meet(car, car) == car);
    CHECK(cd2.meet(car, ClassRef::any()) == ClassRef::any());
    CHECK(cd2.meet(car, ClassRef::bottom()) == car);
    CHECK(cd2.meet(car, truck) == ClassRef::named("Vehicle"));
    CHECK(cd2.meet(car, ClassRef::named("Garage")) == ClassRef::any());

    // Commutative; the result is a common supertype (or Any) on every pair.
    for (const auto& a : cd2.classOrder()) {
        for (const auto& b : cd2.classOrder()) {
            ClassRef m1 = cd2.meet(ClassRef::named(a), ClassRef::named(b));
            ClassRef m2 = cd2.meet(ClassRef::named(b), ClassRef::named(a));
            CHECK(m1 == m2);
            if (m1.isNamed()) {
                CHECK(cd2.isSubclass(a, m1.name));
                CHECK(cd2.isSubclass(b, m1.name));
            }
        }
    }
}

TEST_CASE("abstract classes load and are flagged") {
    MetamodelDoc doc = minimalDoc();
    MetamodelDoc::Class shape;
    shape.name = "Shape";
    shape.abstract_ = true;
    shape.properties.push_back({"area", FieldType::attr(BaseType::Integer), std::nullopt});
    doc.classes.push_back(std::move(shape));
    ModelType mm = buildMetamodel(doc);
    CHECK(mm.isAbstract("Shape"));
    CHECK_FALSE(mm.isAbstract("R"));
}

TEST_CASE("metamodel JSON errors carry codes") {
    CHECK_THROWS_AS((void)parseMetamodel(R"({"root":"R","classes":{}})"), MetamodelError);
    CHECK_THROWS_AS((void)parseMetamodel("not json"), IoError);
}
