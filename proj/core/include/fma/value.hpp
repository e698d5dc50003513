#pragma once

#include <cstdint>
#include <string>
#include <variant>

namespace fmadsl {

/// Object identifiers are opaque non-empty strings.
using Oid = std::string;

enum class BaseType { String, Integer, Boolean };

const char* baseTypeName(BaseType b);

/// A scalar attribute value: string, integer or boolean.
class Value {
public:
    Value() : data_(std::string{}) {}
    explicit Value(std::string s) : data_(std::move(s)) {}
    explicit Value(const char* s) : data_(std::string(s)) {}
    explicit Value(std::int64_t i) : data_(i) {}
    explicit Value(bool b) : data_(b) {}

    BaseType type() const;

    bool isString() const { return std::holds_alternative<std::string>(data_); }
    bool isInteger() const { return std::holds_alternative<std::int64_t>(data_); }
    bool isBoolean() const { return std::holds_alternative<bool>(data_); }

    const std::string& asString() const { return std::get<std::string>(data_); }
    std::int64_t asInteger() const { return std::get<std::int64_t>(data_); }
    bool asBoolean() const { return std::get<bool>(data_); }

    /// The zero value of a base type: "" / 0 / false.
    static Value defaultOf(BaseType b);

    /// Renders the value as it appears in program source (strings quoted).
    std::string toSource() const;

    friend bool operator==(const Value& a, const Value& b) { return a.data_ == b.data_; }
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

private:
    std::variant<std::string, std::int64_t, bool> data_;
};

std::string quoteString(const std::string& s);

} // namespace fmadsl
