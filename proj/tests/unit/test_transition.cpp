#include <doctest.h>

#include "stagecraft/error.hpp"
#include "stagecraft/transition.hpp"
#include "support.hpp"

using namespace stagecraft;
using nlohmann::json;

namespace
{

std::size_t count_steps(const Block& b)
{
    std::size_t n = 0;
    for_each_step(b, [&](const Step&, const std::vector<std::size_t>&) { ++n; });
    return n;
}

std::vector<std::string> codes(const std::vector<Diagnostic>& ds)
{
    std::vector<std::string> out;
    for (const auto& d : ds)
    {
        out.push_back(d.code);
    }
    return out;
}

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code)
{
    const auto c = codes(ds);
    return std::find(c.begin(), c.end(), code) != c.end();
}

}  // namespace

TEST_CASE("fig1 transition tree")
{
    const TransitionSpec spec = test::fixture_spec("fig1");
    const auto* root = std::get_if<Concat>(&spec.timeline.node);
    REQUIRE(root != nullptr);
    REQUIRE(root->blocks.size() == 3);
    CHECK(std::holds_alternative<Sync>(root->blocks[0].node));
    CHECK(count_steps(spec.timeline) == 5);
    const auto& inner = std::get<Sync>(root->blocks[0].node);
    CHECK(inner.blocks.size() == 3);
    const auto& lines = std::get<Step>(inner.blocks[2].node);
    CHECK_FALSE(lines.change.data.apply);
    CHECK(lines.change.scale.selection.mode == Selection::Mode::all);
}

TEST_CASE("step defaults")
{
    const auto spec = parse_transition(R"({"version": "transition/1", "timeline": {"component": {"mark": "m"}}})");
    const auto& step = std::get<Step>(spec.timeline.node);
    CHECK(step.change == ChangeSpec{});
    CHECK(step.change.data.apply);
    CHECK(step.change.mark_type);
    CHECK(step.timing.delay == TimeValue::ms(0));
    CHECK(step.timing.ease == Ease::cubic_in_out);
}

TEST_CASE("transition parse errors")
{
    CHECK_THROWS_AS(parse_transition(R"({"staggerings": [{"name": "s", "by": "k", "overlap": 1.3}],
        "timeline": {"component": "pause"}})"),
                    Error);
    try
    {
        parse_transition(R"({"timeline": {"component": "pause", "timing": {"ease": "wobble"}}})");
        FAIL("no error");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::unknown_ease);
    }
    CHECK_THROWS_AS(parse_transition(R"({"staggerings": [{"name": "a", "by": "k", "staggering": "b"},
        {"name": "b", "by": "k", "staggering": "a"}], "timeline": {"component": "pause"}})"),
                    Error);
    CHECK_THROWS_AS(parse_transition(R"({"timeline": {"component": "pause", "timing": {"staggering": "ghost"}}})"),
                    Error);
}

TEST_CASE("transition round-trips")
{
    for (const char* name : {"fig1", "fig5", "fig6", "fig7-decreasing", "sort-filter", "aggregation"})
    {
        const TransitionSpec s = test::fixture_spec(name);
        CHECK(parse_transition(serialize_transition(s)) == s);
    }
}

TEST_CASE("fixtures validate cleanly")
{
    for (const char* name : {"fig1", "fig5", "fig6", "fig7-decreasing", "fig7-increasing", "sort-filter", "aggregation"})
    {
        CAPTURE(name);
        const auto f = test::load(name);
        CHECK(validate_transition(f.spec, f.start, f.end).empty());
    }
}

TEST_CASE("validation diagnostics")
{
    const auto f = test::load("fig1");
    SUBCASE("unknown component")
    {
        const auto spec = parse_transition(R"({"timeline": {"component": {"axis": "z-axis"}}})");
        CHECK(has_code(validate_transition(spec, f.start, f.end), "unknown-component"));
    }
    SUBCASE("ratio without total")
    {
        const auto spec = parse_transition(R"({"timeline": {"component": {"mark": "lines"}, "timing": {"duration": {"ratio": 0.5}}}})");
        CHECK(has_code(validate_transition(spec, f.start, f.end), "missing-total"));
    }
    SUBCASE("ratio with total is fine")
    {
        const auto spec = parse_transition(
            R"({"totalDuration": 1000, "timeline": {"component": {"mark": "lines"}, "timing": {"duration": {"ratio": 0.5}}}})");
        CHECK(validate_transition(spec, f.start, f.end).empty());
    }
    SUBCASE("overlapping steps on one component")
    {
        const auto spec = parse_transition(R"({"timeline": {"sync": [
            {"component": {"mark": "lines"}, "timing": {"duration": 500}},
            {"component": {"mark": "lines"}, "timing": {"duration": 500}}]}})");
        CHECK_FALSE(validate_transition(spec, f.start, f.end).empty());
    }
}
