#include "fma/value.hpp"

namespace fmadsl {

const char* baseTypeName(BaseType b) {
    switch (b) {
        case BaseType::String: return "String";
        case BaseType::Integer: return "Integer";
        case BaseType::Boolean: return "Boolean";
    }
    return "?";
}

BaseType Value::type() const {
    if (isString()) return BaseType::String;
    if (isInteger()) return BaseType::Integer;
    return BaseType::Boolean;
}

Value Value::defaultOf(BaseType b) {
    switch (b) {
        case BaseType::String: return Value(std::string{});
        case BaseType::Integer: return Value(std::int64_t{0});
        case BaseType::Boolean: return Value(false);
    }
    return Value(std::string{});
}

std::string quoteString(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c; break;
        }
    }
    out += "\"";
    return out;
}

std::string Value::toSource() const {
    if (isString()) return quoteString(asString());
    if (isInteger()) return std::to_string(asInteger());
    return asBoolean() ? "true" : "false";
}

} // namespace fmadsl
