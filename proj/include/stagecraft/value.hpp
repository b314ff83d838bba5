#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace stagecraft
{

/// A datum field value: numbers (including time stamps) or strings.
using Value = std::variant<double, std::string>;

/// One data record. Ordered so that iteration and serialization are stable.
using Row = std::map<std::string, Value>;

inline bool is_number(const Value& v) { return std::holds_alternative<double>(v); }
inline double as_number(const Value& v) { return std::get<double>(v); }

/// Shortest round-trip decimal text for a number; strings are returned verbatim.
std::string format_value(const Value& v);
std::string format_number(double x);

/// Total order: numbers before strings, numbers by value, strings lexicographically.
bool value_less(const Value& a, const Value& b);

Value value_from_json(const nlohmann::json& j);
nlohmann::json value_to_json(const Value& v);

Row row_from_json(const nlohmann::json& j);
nlohmann::json row_to_json(const Row& row);

}  // namespace stagecraft
