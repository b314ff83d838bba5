#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace stagecraft::json_util
{

/// Parses text into a JSON value; syntax errors carry the byte offset.
nlohmann::json parse_document(std::string_view text);

/// Throws schema_version when `version` is present and differs from expected.
void check_version(const nlohmann::json& doc, std::string_view expected);

const nlohmann::json& require(const nlohmann::json& j, const char* key);
std::string require_string(const nlohmann::json& j, const char* key);
double require_number(const nlohmann::json& j, const char* key);

std::string get_string(const nlohmann::json& j, const char* key, const std::string& fallback);
double get_number(const nlohmann::json& j, const char* key, double fallback);
bool get_bool(const nlohmann::json& j, const char* key, bool fallback);
std::vector<std::string> get_string_list(const nlohmann::json& j, const char* key);
std::vector<std::string> as_string_list(const nlohmann::json& j, const char* what);

/// The array under key, or an empty array.
const nlohmann::json& get_array(const nlohmann::json& j, const char* key);

}  // namespace stagecraft::json_util
