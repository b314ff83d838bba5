#include <doctest.h>

#include <thread>

#include "stagecraft/plan.hpp"
#include "stagecraft/service.hpp"
#include "support.hpp"

using namespace stagecraft;
using nlohmann::json;

namespace
{

ServiceConfig config()
{
    ServiceConfig c;
    c.fixture_dir = STAGECRAFT_FIXTURE_DIR;
    return c;
}

json fixture_doc(const std::string& name, const std::string& file)
{
    return json::parse(read_file(test::fixture_path(name, file)));
}

json pair_body(const std::string& name)
{
    return json{{"start", fixture_doc(name, "start.json")}, {"end", fixture_doc(name, "end.json")}};
}

}  // namespace

TEST_CASE("GET /examples lists the fixtures")
{
    const Response r = handle(config(), "GET", "/examples", "");
    REQUIRE(r.status == 200);
    const json list = json::parse(r.body);
    std::vector<std::string> names;
    for (const auto& e : list)
    {
        names.push_back(e.at("name"));
        CHECK(e.contains("spec"));
    }
    for (const char* want : {"fig1", "fig5", "fig6", "fig7-decreasing", "fig7-increasing"})
    {
        CHECK(std::find(names.begin(), names.end(), want) != names.end());
    }
    CHECK(std::is_sorted(names.begin(), names.end()));
}

TEST_CASE("POST /compile returns a plan")
{
    json body = pair_body("fig1");
    body["spec"] = fixture_doc("fig1", "transition.json");
    const Response r = handle(config(), "POST", "/compile", body.dump());
    REQUIRE(r.status == 200);
    const AnimationPlan plan = plan_from_json(json::parse(r.body));
    CHECK(plan.total_duration == 2000.0);
}

TEST_CASE("POST /compile with an invalid spec returns diagnostics")
{
    json body = pair_body("fig1");
    body["spec"] = json{{"timeline", {{"component", {{"axis", "z-axis"}}}}}};
    const Response r = handle(config(), "POST", "/compile", body.dump());
    CHECK(r.status == 400);
    const json doc = json::parse(r.body);
    REQUIRE(doc.at("diagnostics").size() >= 1);
    CHECK(doc["diagnostics"][0]["code"] == "unknown-component");
}

TEST_CASE("POST /recommend ranks candidates")
{
    json body = pair_body("fig1");
    body["options"] = {{"stages", 2}, {"totalDuration", 2000}, {"top", 3}};
    const Response r = handle(config(), "POST", "/recommend", body.dump());
    REQUIRE(r.status == 200);
    const json doc = json::parse(r.body);
    REQUIRE(doc.at("candidates").size() == 3);
    double prev = -1.0;
    for (const auto& c : doc["candidates"])
    {
        CHECK(c.at("score").get<double>() >= prev);
        prev = c["score"];
        CHECK(c.contains("spec"));
    }
}

TEST_CASE("malformed requests")
{
    const Response syntax = handle(config(), "POST", "/compile", "{nope");
    CHECK(syntax.status == 400);
    CHECK(json::parse(syntax.body).contains("offset"));
    CHECK(handle(config(), "POST", "/compile", "{}").status == 400);
    CHECK(handle(config(), "POST", "/nowhere", "{}").status == 404);
    CHECK(handle(config(), "GET", "/index.html", "").status == 404);
    CHECK(handle(config(), "DELETE", "/compile", "").status == 405);
}

TEST_CASE("concurrent requests give identical answers")
{
    json body = pair_body("fig7-decreasing");
    body["spec"] = fixture_doc("fig7-decreasing", "transition.json");
    const std::string text = body.dump();
    const std::string expected = handle(config(), "POST", "/compile", text).body;
    std::vector<std::string> got(8);
    std::vector<std::thread> threads;
    for (std::size_t i = 0; i < got.size(); ++i)
    {
        threads.emplace_back([&, i] { got[i] = handle(config(), "POST", "/compile", text).body; });
    }
    for (auto& t : threads)
    {
        t.join();
    }
    for (const auto& g : got)
    {
        CHECK(g == expected);
    }
}

TEST_CASE("incident ids are stable")
{
    CHECK(incident_id("abc") == incident_id("abc"));
    CHECK(incident_id("abc") != incident_id("abd"));
    CHECK(incident_id("").size() == 16);
}
