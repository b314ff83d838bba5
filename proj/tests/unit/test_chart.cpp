#include <doctest.h>

#include <cmath>

#include "stagecraft/chart.hpp"
#include "stagecraft/error.hpp"
#include "stagecraft/scale.hpp"
#include "stagecraft/scene.hpp"
#include "support.hpp"

using namespace stagecraft;
using nlohmann::json;

namespace
{

json minimal_chart()
{
    return json::parse(R"({
      "version": "chart/1", "width": 100, "height": 100,
      "data": [{"name": "d", "values": [{"v": 5}]}],
      "scales": [{"name": "x", "type": "linear", "domain": [0, 10], "range": [0, 100]}],
      "marks": [{"name": "m", "type": "symbol", "from": "d", "encode": {"x": {"field": "v", "scale": "x"}}}]
    })");
}

ErrorCode code_of(const json& doc)
{
    try
    {
        chart_from_json(doc);
    }
    catch (const Error& e)
    {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::internal;
}

ScaleDef linear(double d0, double d1, double r0, double r1)
{
    ScaleDef s;
    s.name = "s";
    s.kind = ScaleKind::linear;
    s.numeric_domain = {d0, d1};
    s.pixel_range = {r0, r1};
    return s;
}

}  // namespace

TEST_CASE("minimal chart parses")
{
    const ChartSpec c = chart_from_json(minimal_chart());
    CHECK(c.marks.size() == 1);
    CHECK(c.scales.size() == 1);
    CHECK(c.width == 100);
}

TEST_CASE("chart rejects bad documents")
{
    SUBCASE("dangling scale")
    {
        json d = minimal_chart();
        d["marks"][0]["encode"]["x"]["scale"] = "xx";
        CHECK(code_of(d) == ErrorCode::dangling_reference);
    }
    SUBCASE("dangling dataset")
    {
        json d = minimal_chart();
        d["marks"][0]["from"] = "nope";
        CHECK(code_of(d) == ErrorCode::dangling_reference);
    }
    SUBCASE("duplicate names")
    {
        json d = minimal_chart();
        d["scales"].push_back(d["scales"][0]);
        CHECK(code_of(d) == ErrorCode::duplicate_name);
    }
    SUBCASE("channel not allowed on mark type")
    {
        json d = minimal_chart();
        d["marks"][0]["encode"]["x2"] = {{"value", 3}};
        CHECK(code_of(d) == ErrorCode::illegal_channel);
    }
    SUBCASE("wrong schema version")
    {
        json d = minimal_chart();
        d["version"] = "chart/9";
        CHECK(code_of(d) == ErrorCode::schema_version);
    }
    SUBCASE("syntax error carries offset")
    {
        try
        {
            parse_chart("{\"width\": 10,,}");
            FAIL("no error");
        }
        catch (const Error& e)
        {
            CHECK(e.code() == ErrorCode::syntax);
            REQUIRE(e.offset().has_value());
            CHECK(*e.offset() > 0);
        }
    }
}

TEST_CASE("chart round-trips through json")
{
    for (const char* name : {"fig1", "fig5", "fig6", "fig7-decreasing", "sort-filter", "aggregation"})
    {
        for (const char* which : {"start", "end"})
        {
            const ChartSpec c = test::fixture_chart(name, which);
            CHECK(parse_chart(serialize_chart(c)) == c);
        }
    }
}

TEST_CASE("fig1 start chart components")
{
    const ChartSpec c = test::fixture_chart("fig1", "start");
    CHECK(c.marks.size() == 1);
    CHECK(c.marks[0].type == MarkType::line);
    CHECK(c.axes.size() == 2);
    CHECK(c.find_axis("x-axis") != nullptr);
    CHECK(c.find_axis("y-axis") != nullptr);
    const auto comps = chart_components(c);
    REQUIRE(comps.size() == 4);
    CHECK(comps[0] == view_component);
}

TEST_CASE("filter and aggregate transforms")
{
    DatasetDef d;
    for (int y = 1999; y <= 2003; ++y)
    {
        d.rows.push_back({{"year", double(y)}});
    }
    d.transforms.push_back({FilterTransform{"year", Comparator::less_equal, {Value{2000.0}}}});
    CHECK(apply_transforms(d).size() == 2);

    DatasetDef g;
    g.rows = {{{"k", std::string("a")}, {"v", 1.0}}, {{"k", std::string("a")}, {"v", 3.0}}, {{"k", std::string("b")}, {"v", 5.0}}};
    CHECK(apply_transforms(g) == g.rows);
    g.transforms.push_back({AggregateTransform{{"k"}, {Measure{"v", AggregateOp::mean, "v"}}}});
    const auto rows = apply_transforms(g);
    REQUIRE(rows.size() == 2);
    CHECK(std::get<std::string>(rows[0].at("k")) == "a");
    CHECK(as_number(rows[0].at("v")) == 2.0);
    CHECK(as_number(rows[1].at("v")) == 5.0);
    CHECK(grouping_fields(g) == std::vector<std::string>{"k"});
}

TEST_CASE("scale application")
{
    const ScaleDef s = linear(0, 10, 0, 100);
    auto r = scale_apply(s, 5.0);
    CHECK(r.position == 50.0);
    CHECK_FALSE(r.overflow);
    r = scale_apply(s, 12.0);
    CHECK(r.position == 120.0);
    CHECK(r.overflow);

    ScaleDef b;
    b.kind = ScaleKind::band;
    b.categories = {std::string("A"), std::string("B")};
    b.pixel_range = {0, 100};
    CHECK(scale_apply(b, std::string("A")).position == 0.0);
    CHECK(bandwidth(b) == 50.0);
    CHECK(scale_apply(b, std::string("Z")).overflow);
    CHECK_THROWS_AS(scale_apply(b, std::string("Z"), false), Error);
}

TEST_CASE("tick rule")
{
    ScaleDef s = linear(0, 100, 0, 300);
    const auto ticks = tick_values(s, 5);
    REQUIRE(ticks.size() == 5);
    for (std::size_t i = 0; i < ticks.size(); ++i)
    {
        CHECK(as_number(ticks[i]) == 25.0 * double(i));
    }
    CHECK(tick_step(0, 50, 5) == 25.0);
    CHECK(tick_step(0, 50, 6) == 10.0);
    CHECK(tick_step(2000, 2010, 6) == 2.0);
}

TEST_CASE("render places a symbol through its scale")
{
    const SceneGraph g = render_scene(chart_from_json(minimal_chart()));
    const SceneElement* e = g.find("m/mark/#0");
    REQUIRE(e != nullptr);
    const double left = std::get<double>(e->attrs.at("x"));
    const double width = std::get<double>(e->attrs.at("width"));
    CHECK(left + width / 2 == 50.0);
    CHECK(g.find("view/view-frame/main") != nullptr);
}

TEST_CASE("chart without marks renders guides only")
{
    json d = minimal_chart();
    d["marks"] = json::array();
    d["axes"] = json::array({{{"name", "ax"}, {"orient", "x"}, {"scale", "x"}, {"title", "X"}}});
    const SceneGraph g = render_scene(chart_from_json(d));
    CHECK_FALSE(g.elements.empty());
    for (const auto& e : g.elements)
    {
        CHECK(e.role != "mark");
    }
}

TEST_CASE("static render refuses data outside the domain")
{
    json d = minimal_chart();
    d["data"][0]["values"][0]["v"] = 50;
    CHECK_THROWS_AS(render_scene(chart_from_json(d)), Error);
}

TEST_CASE("every fixture renders at both ends")
{
    for (const char* name : {"fig1", "fig5", "fig6", "fig7-decreasing", "fig7-increasing", "sort-filter", "aggregation"})
    {
        CAPTURE(name);
        CHECK_NOTHROW(render_scene(test::fixture_chart(name, "start")));
        CHECK_NOTHROW(render_scene(test::fixture_chart(name, "end")));
    }
}
