#include "stagecraft/json_util.hpp"

#include "stagecraft/error.hpp"

namespace stagecraft::json_util
{

using nlohmann::json;

json parse_document(std::string_view text)
{
    try
    {
        return json::parse(text.begin(), text.end());
    }
    catch (const json::parse_error& e)
    {
        throw Error(ErrorCode::syntax, "syntax error at byte " + std::to_string(e.byte) + ": " + e.what(), e.byte);
    }
}

void check_version(const json& doc, std::string_view expected)
{
    if (!doc.contains("version"))
    {
        return;
    }
    const json& v = doc.at("version");
    if (!v.is_string() || v.get<std::string>() != expected)
    {
        throw Error(ErrorCode::schema_version,
                    "unsupported document version " + v.dump() + ", expected \"" + std::string(expected) + "\"");
    }
}

const json& require(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
    {
        throw Error(ErrorCode::invalid_value, std::string("missing required field '") + key + "' in " + j.dump());
    }
    return j.at(key);
}

std::string require_string(const json& j, const char* key)
{
    const json& v = require(j, key);
    if (!v.is_string())
    {
        throw Error(ErrorCode::type_mismatch, std::string("field '") + key + "' must be a string");
    }
    return v.get<std::string>();
}

double require_number(const json& j, const char* key)
{
    const json& v = require(j, key);
    if (!v.is_number())
    {
        throw Error(ErrorCode::type_mismatch, std::string("field '") + key + "' must be a number");
    }
    return v.get<double>();
}

std::string get_string(const json& j, const char* key, const std::string& fallback)
{
    if (!j.is_object() || !j.contains(key))
    {
        return fallback;
    }
    return require_string(j, key);
}

double get_number(const json& j, const char* key, double fallback)
{
    if (!j.is_object() || !j.contains(key))
    {
        return fallback;
    }
    return require_number(j, key);
}

bool get_bool(const json& j, const char* key, bool fallback)
{
    if (!j.is_object() || !j.contains(key))
    {
        return fallback;
    }
    const json& v = j.at(key);
    if (!v.is_boolean())
    {
        throw Error(ErrorCode::type_mismatch, std::string("field '") + key + "' must be a boolean");
    }
    return v.get<bool>();
}

std::vector<std::string> as_string_list(const json& j, const char* what)
{
    if (!j.is_array())
    {
        throw Error(ErrorCode::type_mismatch, std::string(what) + " must be a list of strings");
    }
    std::vector<std::string> out;
    for (const auto& v : j)
    {
        if (!v.is_string())
        {
            throw Error(ErrorCode::type_mismatch, std::string(what) + " must be a list of strings");
        }
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::vector<std::string> get_string_list(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key))
    {
        return {};
    }
    return as_string_list(j.at(key), key);
}

const json& get_array(const json& j, const char* key)
{
    static const json empty = json::array();
    if (!j.is_object() || !j.contains(key))
    {
        return empty;
    }
    const json& v = j.at(key);
    if (!v.is_array())
    {
        throw Error(ErrorCode::type_mismatch, std::string("field '") + key + "' must be a list");
    }
    return v;
}

}  // namespace stagecraft::json_util
