#include "fma/json_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fmadsl {

namespace {

using Json = nlohmann::ordered_json;

ObjectNode parseObject(const Json& j, std::map<Oid, std::string>& typing,
                       std::uint64_t slot) {
    if (!j.is_object() || !j.contains("oid") || !j.contains("class"))
        throw IoError("each model object needs \"oid\" and \"class\" fields");
    ObjectNode node;
    node.oid = j.at("oid").get<std::string>();
    node.slot = slot;
    if (node.oid.empty()) throw IoError("object identifiers must be non-empty");
    std::string cls = j.at("class").get<std::string>();
    if (!typing.emplace(node.oid, std::move(cls)).second)
        throw IoError("duplicate object identifier '" + node.oid + "'");

    if (!j.contains("props")) return node;
    const Json& props = j.at("props");
    if (!props.is_object()) throw IoError("\"props\" must be an object");
    for (const auto& [name, value] : props.items()) {
        PropertyBinding b;
        b.name = name;
        if (node.findProp(name))
            throw IoError("duplicate property '" + name + "' on object '" + node.oid + "'");
        if (value.is_string()) {
            b.payload = Value(value.get<std::string>());
        } else if (value.is_number_integer()) {
            b.payload = Value(value.get<std::int64_t>());
        } else if (value.is_boolean()) {
            b.payload = Value(value.get<bool>());
        } else if (value.is_object() && value.contains("refs")) {
            RefSet rs;
            for (const auto& id : value.at("refs")) {
                Oid o = id.get<std::string>();
                if (rs.contains(o))
                    throw IoError("duplicate reference '" + o + "' in property '" + name +
                                  "'");
                rs.ids.push_back(std::move(o));
            }
            b.payload = std::move(rs);
        } else if (value.is_array()) {
            CmtSet cs;
            std::uint64_t childSlot = 0;
            for (const auto& child : value)
                cs.children.push_back(parseObject(child, typing, childSlot++));
            b.payload = std::move(cs);
        } else {
            throw IoError("property '" + name + "' has an unsupported payload");
        }
        node.props.push_back(std::move(b));
    }
    return node;
}

Json objectToJson(const ObjectNode& node, const std::map<Oid, std::string>& typing) {
    Json j = Json::object();
    j["oid"] = node.oid;
    auto it = typing.find(node.oid);
    j["class"] = it != typing.end() ? it->second : "";
    Json props = Json::object();
    for (const auto& p : node.props) {
        if (p.isAttr()) {
            const auto& v = std::get<Value>(p.payload);
            if (v.isString()) props[p.name] = v.asString();
            else if (v.isInteger()) props[p.name] = v.asInteger();
            else props[p.name] = v.asBoolean();
        } else if (p.isRefs()) {
            Json refs = Json::array();
            for (const auto& id : std::get<RefSet>(p.payload).ids) refs.push_back(id);
            props[p.name] = Json{{"refs", std::move(refs)}};
        } else {
            Json children = Json::array();
            for (const auto& c : std::get<CmtSet>(p.payload).children)
                children.push_back(objectToJson(c, typing));
            props[p.name] = std::move(children);
        }
    }
    j["props"] = std::move(props);
    return j;
}

Json parseText(const std::string& text) {
    Json j = Json::parse(text, nullptr, false);
    if (j.is_discarded()) throw IoError("malformed JSON");
    return j;
}

} // namespace

StructuredModel parseModel(const std::string& text) {
    Json j = parseText(text);
    if (!j.is_object() || !j.contains("roots") || !j.at("roots").is_array())
        throw IoError("a model file is an object with a \"roots\" array");
    StructuredModel model;
    std::uint64_t slot = 0;
    for (const auto& r : j.at("roots"))
        model.roots.push_back(parseObject(r, model.typing, slot++));
    return model;
}

std::string writeModel(const StructuredModel& model) {
    Json roots = Json::array();
    for (const auto& r : model.roots) roots.push_back(objectToJson(r, model.typing));
    Json j = Json{{"roots", std::move(roots)}};
    return j.dump(2) + "\n";
}

MetamodelDoc parseMetamodelDoc(const std::string& text) {
    Json j = parseText(text);
    if (!j.is_object() || !j.contains("root") || !j.contains("classes"))
        throw IoError("a metamodel file needs \"root\" and \"classes\"");
    MetamodelDoc doc;
    doc.name = j.value("name", std::string{});
    doc.root = j.at("root").get<std::string>();
    if (!j.at("classes").is_object()) throw IoError("\"classes\" must be an object");
    for (const auto& [cname, cj] : j.at("classes").items()) {
        MetamodelDoc::Class cls;
        cls.name = cname;
        cls.abstract_ = cj.value("abstract", false);
        if (cj.contains("supertypes"))
            for (const auto& s : cj.at("supertypes"))
                cls.supertypes.push_back(s.get<std::string>());
        if (cj.contains("properties")) {
            if (!cj.at("properties").is_object())
                throw IoError("\"properties\" of class '" + cname + "' must be an object");
            for (const auto& [pname, pj] : cj.at("properties").items()) {
                MetamodelDoc::Property prop;
                prop.name = pname;
                std::string kind = pj.value("kind", std::string{});
                if (kind == "attr") {
                    std::string base = pj.value("type", std::string{});
                    if (base == "String") prop.type = FieldType::attr(BaseType::String);
                    else if (base == "Integer") prop.type = FieldType::attr(BaseType::Integer);
                    else if (base == "Boolean") prop.type = FieldType::attr(BaseType::Boolean);
                    else
                        throw IoError("attribute '" + cname + "." + pname +
                                      "' has unknown base type '" + base + "'");
                } else if (kind == "ref" || kind == "cmt") {
                    std::string target = pj.value("class", std::string{});
                    if (target.empty())
                        throw IoError("property '" + cname + "." + pname +
                                      "' needs a \"class\"");
                    prop.type = kind == "ref" ? FieldType::ref(ClassRef::named(target))
                                              : FieldType::cmt(ClassRef::named(target));
                    if (pj.contains("opposite") && !pj.at("opposite").is_null())
                        prop.opposite = pj.at("opposite").get<std::string>();
                } else {
                    throw IoError("property '" + cname + "." + pname +
                                  "' has unknown kind '" + kind + "'");
                }
                cls.properties.push_back(std::move(prop));
            }
        }
        doc.classes.push_back(std::move(cls));
    }
    return doc;
}

ModelType parseMetamodel(const std::string& text) {
    return buildMetamodel(parseMetamodelDoc(text));
}

std::map<std::string, Env::Bound> parseBindings(const std::string& text) {
    Json j = parseText(text);
    if (!j.is_object()) throw IoError("a bindings file is an object of variable bindings");
    std::map<std::string, Env::Bound> out;
    for (const auto& [name, value] : j.items()) {
        if (value.is_object() && value.contains("oid"))
            out[name] = Oid(value.at("oid").get<std::string>());
        else if (value.is_string()) out[name] = Value(value.get<std::string>());
        else if (value.is_number_integer()) out[name] = Value(value.get<std::int64_t>());
        else if (value.is_boolean()) out[name] = Value(value.get<bool>());
        else throw IoError("binding '" + name + "' has an unsupported value");
    }
    return out;
}

std::string writeVerdict(const TypeVerdict& verdict) {
    Json errors = Json::array();
    for (const auto& e : verdict.errors)
        errors.push_back(Json{{"rule", e.rule},
                              {"path", e.path},
                              {"expected", e.expected},
                              {"found", e.found}});
    Json j = Json{{"ok", verdict.ok}, {"errors", std::move(errors)}};
    return j.dump(2) + "\n";
}

std::string writeValidityReport(const ValidityReport& report) {
    Json violations = Json::array();
    for (const auto& v : report.violations)
        violations.push_back(Json{{"kind", violationKindName(v.kind)},
                                  {"oid", v.oid},
                                  {"prop", v.prop}});
    Json j = Json{{"ok", report.ok}, {"violations", std::move(violations)}};
    return j.dump(2) + "\n";
}

std::string readTextFile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void writeTextFile(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << content;
}

StructuredModel loadModelFile(const std::string& path) {
    return parseModel(readTextFile(path));
}

ModelType loadMetamodelFile(const std::string& path) {
    return parseMetamodel(readTextFile(path));
}

std::map<std::string, Env::Bound> loadBindingsFile(const std::string& path) {
    return parseBindings(readTextFile(path));
}

} // namespace fmadsl
