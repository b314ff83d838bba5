#include <doctest.h>

#include <httplib.h>

#include "stagecraft/service.hpp"
#include "support.hpp"

using namespace stagecraft;
using nlohmann::json;

TEST_CASE("service over a real socket")
{
    ServiceConfig config;
    config.fixture_dir = STAGECRAFT_FIXTURE_DIR;
    BackgroundServer server(config, "127.0.0.1", 0);
    REQUIRE(server.port() > 0);
    httplib::Client client("127.0.0.1", server.port());

    const auto examples = client.Get("/examples");
    REQUIRE(examples);
    CHECK(examples->status == 200);
    CHECK(json::parse(examples->body).size() >= 5);

    const json body{{"start", json::parse(read_file(test::fixture_path("fig1", "start.json")))},
                    {"end", json::parse(read_file(test::fixture_path("fig1", "end.json")))},
                    {"spec", json::parse(read_file(test::fixture_path("fig1", "transition.json")))}};
    const auto compiled = client.Post("/compile", body.dump(), "application/json");
    REQUIRE(compiled);
    CHECK(compiled->status == 200);
    CHECK(json::parse(compiled->body).at("totalDuration") == 2000.0);

    json rec = body;
    rec.erase("spec");
    rec["options"] = {{"stages", 2}, {"top", 2}};
    const auto ranked = client.Post("/recommend", rec.dump(), "application/json");
    REQUIRE(ranked);
    CHECK(ranked->status == 200);
    CHECK(json::parse(ranked->body).at("candidates").size() == 2);

    const auto bad = client.Post("/compile", "{", "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 400);
    server.stop();
}
