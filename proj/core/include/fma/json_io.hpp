#pragma once

#include <map>
#include <stdexcept>
#include <string>

#include "fma/interp.hpp"
#include "fma/metamodel.hpp"
#include "fma/model.hpp"
#include "fma/typecheck.hpp"
#include "fma/validate.hpp"

namespace fmadsl {

struct IoError : std::runtime_error {
    explicit IoError(const std::string& message) : std::runtime_error(message) {}
};

/// Model files: {"roots":[{"oid":..,"class":..,"props":{..}}]}. An attribute
/// property is a JSON scalar, a reference collection is {"refs":[..]}, and a
/// containment collection is an array of nested objects. The typing map is
/// derived from the per-object "class" fields.
StructuredModel parseModel(const std::string& text);
std::string writeModel(const StructuredModel& model);

/// Metamodel files: {"name":..,"root":..,"classes":{C:{"abstract":..,
/// "supertypes":[..],"properties":{p:{"kind":"attr","type":..} |
/// {"kind":"ref","class":..,"opposite":..} | {"kind":"cmt",..}}}}}.
MetamodelDoc parseMetamodelDoc(const std::string& text);
ModelType parseMetamodel(const std::string& text);

/// Bindings files seed program variables: {"x":{"oid":"1"},"y":"s","n":3}.
std::map<std::string, Env::Bound> parseBindings(const std::string& text);

std::string writeVerdict(const TypeVerdict& verdict);
std::string writeValidityReport(const ValidityReport& report);

StructuredModel loadModelFile(const std::string& path);
ModelType loadMetamodelFile(const std::string& path);
std::map<std::string, Env::Bound> loadBindingsFile(const std::string& path);
std::string readTextFile(const std::string& path);
void writeTextFile(const std::string& path, const std::string& content);

} // namespace fmadsl
