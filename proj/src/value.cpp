#include "stagecraft/value.hpp"

#include <charconv>
#include <cmath>

#include "stagecraft/error.hpp"

namespace stagecraft
{

std::string format_number(double x)
{
    if (x == 0.0)
    {
        return "0";
    }
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    if (ec != std::errc{})
    {
        throw Error(ErrorCode::internal, "number formatting failed");
    }
    return std::string(buf, end);
}

std::string format_value(const Value& v)
{
    if (const auto* d = std::get_if<double>(&v))
    {
        return format_number(*d);
    }
    return std::get<std::string>(v);
}

bool value_less(const Value& a, const Value& b)
{
    if (a.index() != b.index())
    {
        return a.index() < b.index();
    }
    if (is_number(a))
    {
        return as_number(a) < as_number(b);
    }
    return std::get<std::string>(a) < std::get<std::string>(b);
}

Value value_from_json(const nlohmann::json& j)
{
    if (j.is_number())
    {
        double d = j.get<double>();
        if (!std::isfinite(d))
        {
            throw Error(ErrorCode::invalid_value, "non-finite number in data");
        }
        return d;
    }
    if (j.is_string())
    {
        return j.get<std::string>();
    }
    if (j.is_boolean())
    {
        return j.get<bool>() ? 1.0 : 0.0;
    }
    throw Error(ErrorCode::type_mismatch, "data values must be numbers or strings, got " + j.dump());
}

nlohmann::json value_to_json(const Value& v)
{
    if (const auto* d = std::get_if<double>(&v))
    {
        return *d;
    }
    return std::get<std::string>(v);
}

Row row_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
    {
        throw Error(ErrorCode::type_mismatch, "data rows must be objects");
    }
    Row row;
    for (const auto& [k, v] : j.items())
    {
        row.emplace(k, value_from_json(v));
    }
    return row;
}

nlohmann::json row_to_json(const Row& row)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : row)
    {
        j[k] = value_to_json(v);
    }
    return j;
}

}  // namespace stagecraft
