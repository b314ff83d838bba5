#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "stagecraft/recommend.hpp"

namespace stagecraft
{

struct Response
{
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

struct ServiceConfig
{
    // Directory of example transitions: one subdirectory per example holding start.json, end.json and
    // transition.json.
    std::string fixture_dir;
    // Static player assets; empty serves none.
    std::string assets_dir;
    CostModel model = default_cost_model();
};

/// Whole file contents; throws Error(io) naming the path.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

/// Short hex digest of a request body, reported with internal errors.
std::string incident_id(std::string_view body);

/// The example list served by GET /examples.
nlohmann::json list_examples(const std::string& fixture_dir);

/// Handles one request without touching the network. Bodies and responses are JSON.
///   POST /compile    {start, end, spec}                       -> plan/1 document
///   POST /recommend  {start, end, options?: {stages, totalDuration, top, costModel}} -> ranked report
///   POST /validate   {start, end, spec}                       -> {diagnostics}
///   GET  /examples                                            -> [{name, start, end, spec}]
Response handle(const ServiceConfig& config, std::string_view method, std::string_view path, std::string_view body);

/// Blocking HTTP server on host:port. Returns when the server stops; false if it failed to bind.
bool serve(const ServiceConfig& config, const std::string& host, int port);

/// HTTP server on a background thread. Port 0 binds any free port. Throws Error(io) if binding fails.
class BackgroundServer
{
public:
    BackgroundServer(const ServiceConfig& config, const std::string& host, int port);
    ~BackgroundServer();
    BackgroundServer(const BackgroundServer&) = delete;
    BackgroundServer& operator=(const BackgroundServer&) = delete;

    int port() const;
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace stagecraft
