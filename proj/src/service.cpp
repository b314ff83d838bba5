#include "stagecraft/service.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include "stagecraft/chart.hpp"
#include "stagecraft/error.hpp"
#include "stagecraft/json_util.hpp"
#include "stagecraft/plan.hpp"
#include "stagecraft/transition.hpp"

namespace stagecraft
{

using nlohmann::json;
namespace fs = std::filesystem;

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw Error(ErrorCode::io, "cannot read '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view contents)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
    {
        throw Error(ErrorCode::io, "cannot write '" + path + "'");
    }
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out)
    {
        throw Error(ErrorCode::io, "failed writing '" + path + "'");
    }
}

std::string incident_id(std::string_view body)
{
    // FNV-1a, stable across runs and platforms.
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : body)
    {
        h ^= c;
        h *= 1099511628211ull;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i)
    {
        out[static_cast<std::size_t>(i)] = digits[h & 15];
        h >>= 4;
    }
    return out;
}

json list_examples(const std::string& fixture_dir)
{
    json out = json::array();
    if (fixture_dir.empty() || !fs::is_directory(fixture_dir))
    {
        return out;
    }
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(fixture_dir))
    {
        if (entry.is_directory() && fs::exists(entry.path() / "start.json") && fs::exists(entry.path() / "end.json"))
        {
            dirs.push_back(entry.path());
        }
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs)
    {
        json item{{"name", d.filename().string()},
                  {"start", json_util::parse_document(read_file((d / "start.json").string()))},
                  {"end", json_util::parse_document(read_file((d / "end.json").string()))}};
        if (fs::exists(d / "transition.json"))
        {
            item["spec"] = json_util::parse_document(read_file((d / "transition.json").string()));
        }
        out.push_back(std::move(item));
    }
    return out;
}

namespace
{

Response json_response(int status, const json& body) { return {status, "application/json", body.dump() + "\n"}; }

Response error_response(const Error& e)
{
    json body{{"error", error_code_name(e.code())}, {"message", e.what()}};
    if (e.offset())
    {
        body["offset"] = *e.offset();
    }
    body["diagnostics"] = json::array({json{{"code", error_code_name(e.code())}, {"path", ""}, {"message", e.what()}}});
    return json_response(400, body);
}

const json& field(const json& body, const char* key)
{
    if (!body.is_object() || !body.contains(key))
    {
        throw Error(ErrorCode::invalid_value, std::string("request body needs '") + key + "'");
    }
    return body.at(key);
}

struct ChartPair
{
    ChartSpec start;
    ChartSpec end;
};

ChartPair charts_of(const json& body)
{
    return {chart_from_json(field(body, "start")), chart_from_json(field(body, "end"))};
}

Response compile_request(const json& body)
{
    const ChartPair charts = charts_of(body);
    const TransitionSpec spec = transition_from_json(field(body, "spec"));
    const auto diagnostics = validate_transition(spec, charts.start, charts.end);
    if (!diagnostics.empty())
    {
        return json_response(400, json{{"error", "validation"}, {"diagnostics", diagnostics_to_json(diagnostics)}});
    }
    return json_response(200, plan_to_json(compile_plan(charts.start, charts.end, spec)));
}

Response validate_request(const json& body)
{
    const ChartPair charts = charts_of(body);
    const TransitionSpec spec = transition_from_json(field(body, "spec"));
    const auto diagnostics = validate_transition(spec, charts.start, charts.end);
    return json_response(diagnostics.empty() ? 200 : 400, json{{"diagnostics", diagnostics_to_json(diagnostics)}});
}

Response recommend_request(const ServiceConfig& config, const json& body)
{
    const ChartPair charts = charts_of(body);
    RecommendOptions options;
    options.model = config.model;
    std::size_t top = 5;
    if (const auto it = body.find("options"); it != body.end())
    {
        const json& o = *it;
        options.max_stages = static_cast<std::size_t>(json_util::get_number(o, "stages", 3.0));
        options.total_ms = static_cast<std::int64_t>(json_util::get_number(o, "totalDuration", 2000.0));
        top = static_cast<std::size_t>(json_util::get_number(o, "top", 5.0));
        if (top < 1)
        {
            throw Error(ErrorCode::invalid_value, "top must be at least 1");
        }
        if (const auto cm = o.find("costModel"); cm != o.end())
        {
            options.model = cm->is_string() ? default_cost_model(cm->get<std::string>())
                                             : cost_model_from_json(*cm, json_util::get_string(o, "preset", "tuned"));
        }
    }
    options.top = top;
    return json_response(200, recommendation_to_json(recommend(charts.start, charts.end, options), top));
}

std::string content_type_for(const fs::path& p)
{
    const auto ext = p.extension().string();
    if (ext == ".html") return "text/html";
    if (ext == ".js") return "application/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".json") return "application/json";
    if (ext == ".svg") return "image/svg+xml";
    return "application/octet-stream";
}

Response static_asset(const ServiceConfig& config, std::string_view path)
{
    if (config.assets_dir.empty())
    {
        return json_response(404, json{{"error", "not found"}});
    }
    std::string rel(path);
    if (rel.empty() || rel == "/")
    {
        rel = "/index.html";
    }
    if (rel.find("..") != std::string::npos)
    {
        return json_response(404, json{{"error", "not found"}});
    }
    const fs::path file = fs::path(config.assets_dir) / rel.substr(1);
    if (!fs::is_regular_file(file))
    {
        return json_response(404, json{{"error", "not found"}});
    }
    return {200, content_type_for(file), read_file(file.string())};
}

}  // namespace

Response handle(const ServiceConfig& config, std::string_view method, std::string_view path, std::string_view body)
{
    try
    {
        if (method == "GET" && path == "/examples")
        {
            return json_response(200, list_examples(config.fixture_dir));
        }
        if (method == "GET")
        {
            return static_asset(config, path);
        }
        if (method != "POST")
        {
            return json_response(405, json{{"error", "method not allowed"}});
        }
        if (path != "/compile" && path != "/recommend" && path != "/validate")
        {
            return json_response(404, json{{"error", "not found"}});
        }
        const json doc = json_util::parse_document(body);
        if (path == "/compile")
        {
            return compile_request(doc);
        }
        if (path == "/validate")
        {
            return validate_request(doc);
        }
        return recommend_request(config, doc);
    }
    catch (const Error& e)
    {
        if (e.code() == ErrorCode::internal)
        {
            return json_response(500, json{{"error", "internal"}, {"message", e.what()}, {"incident", incident_id(body)}});
        }
        return error_response(e);
    }
    catch (const json::exception& e)
    {
        return error_response(Error(ErrorCode::invalid_value, e.what()));
    }
    catch (const std::exception& e)
    {
        return json_response(500, json{{"error", "internal"}, {"message", e.what()}, {"incident", incident_id(body)}});
    }
}

}  // namespace stagecraft
