#include <doctest.h>

#include <set>

#include "stagecraft/changes.hpp"
#include "stagecraft/error.hpp"
#include "stagecraft/plan.hpp"
#include "stagecraft/schedule.hpp"
#include "support.hpp"

using namespace stagecraft;

namespace
{

Row keyed(const std::string& k, double v = 0.0) { return {{"k", k}, {"v", v}}; }

std::set<std::string> keys_of(const std::vector<KeyedRow>& rows)
{
    std::set<std::string> out;
    for (const auto& r : rows)
    {
        out.insert(r.key);
    }
    return out;
}

std::set<std::string> kinds(const ChangeSet& cs, const ComponentRef& ref)
{
    std::set<std::string> out;
    if (const auto* list = cs.find(ref))
    {
        for (const auto& c : *list)
        {
            out.insert(c.kind);
        }
    }
    return out;
}

const ComponentRef lines{ComponentKind::mark, "lines"};
const ComponentRef x_axis{ComponentKind::axis, "x-axis"};
const ComponentRef y_axis{ComponentKind::axis, "y-axis"};

}  // namespace

TEST_CASE("keyed join partitions rows")
{
    const JoinResult j = join_data({keyed("A"), keyed("B"), keyed("C")}, {keyed("B"), keyed("C"), keyed("D")}, {"k"});
    CHECK(keys_of(j.enter) == std::set<std::string>{"k=D"});
    CHECK(j.update.size() == 2);
    CHECK(keys_of(j.exit) == std::set<std::string>{"k=A"});
}

TEST_CASE("index join of identical rows is all update")
{
    const std::vector<Row> rows{keyed("A"), keyed("B")};
    const JoinResult j = join_data(rows, rows, {});
    CHECK(j.enter.empty());
    CHECK(j.exit.empty());
    CHECK(j.update.size() == 2);
}

TEST_CASE("duplicate keys are rejected")
{
    try
    {
        join_data({keyed("A"), keyed("A")}, {}, {"k"});
        FAIL("no error");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::duplicate_key);
    }
}

TEST_CASE("fig6 joins on country regardless of order")
{
    const auto f = test::load("fig6");
    auto start = apply_transforms(*f.start.find_dataset("now"));
    auto end = apply_transforms(*f.end.find_dataset("now"));
    std::reverse(end.begin(), end.end());
    const JoinResult j = join_data(start, end, {"country"});
    REQUIRE(j.update.size() == 3);
    for (const auto& [a, b] : j.update)
    {
        CHECK(a.row.at("country") == b.row.at("country"));
    }
}

TEST_CASE("aggregate pairing")
{
    const std::vector<Row> raw{keyed("a", 1), keyed("a", 3), keyed("b", 5)};
    const std::vector<Row> agg{keyed("a", 2), keyed("b", 5)};
    CHECK(join_aggregate(raw, agg, {"k"}) == std::vector<std::size_t>{0, 0, 1});
    CHECK(join_aggregate({}, agg, {"k"}).empty());
    CHECK_THROWS_AS(join_aggregate({keyed("z", 1)}, agg, {"k"}), Error);

    const auto f = test::load("aggregation");
    const auto raw_rows = apply_transforms(f.start.datasets[0]);
    const auto agg_rows = apply_transforms(f.end.datasets[0]);
    const auto pairing = join_aggregate(raw_rows, agg_rows, {"group"});
    REQUIRE(pairing.size() == raw_rows.size());
    for (std::size_t i = 0; i < pairing.size(); ++i)
    {
        CHECK(raw_rows[i].at("group") == agg_rows[pairing[i]].at("group"));
    }
}

TEST_CASE("fig1 change detection")
{
    const auto f = test::load("fig1");
    const ChangeSet cs = detect_changes(f.start, f.end);
    CHECK(kinds(cs, lines) == std::set<std::string>{"data", "scale.x", "scale.y"});
    CHECK(kinds(cs, x_axis) == std::set<std::string>{"scale.x"});
    CHECK(kinds(cs, y_axis) == std::set<std::string>{"scale.y"});
    CHECK(cs.find(view_component) == nullptr);
    CHECK(cs.count() == 5);
    for (const auto& c : *cs.find(lines))
    {
        if (c.kind.starts_with("scale."))
        {
            CHECK(c.dimension == DomainDimension::same);
        }
    }
}

TEST_CASE("identical charts have no changes")
{
    const auto c = test::fixture_chart("fig5", "start");
    CHECK(detect_changes(c, c).empty());
}

TEST_CASE("fig5 flags a dimension change on x")
{
    const auto f = test::load("fig5");
    const ChangeSet cs = detect_changes(f.start, f.end);
    bool seen = false;
    for (const auto& c : *cs.find({ComponentKind::mark, "points"}))
    {
        if (c.kind == "scale.x")
        {
            seen = true;
            CHECK(c.dimension == DomainDimension::different);
        }
    }
    CHECK(seen);
}

TEST_CASE("view size changes carry their effect")
{
    const auto f = test::load("sort-filter");
    const ChangeSet cs = detect_changes(f.start, f.end);
    const auto* view = cs.find(view_component);
    REQUIRE(view != nullptr);
    REQUIRE(view->size() == 1);
    CHECK(view->at(0).kind == "view.height");
    CHECK(view->at(0).height == SizeEffect::shrinks);
}

TEST_CASE("fig1 step states")
{
    const auto f = test::load("fig1");
    const Schedule s = plan_schedule(f.spec, f.start, f.end);
    const auto states = thread_step_states(s, f.start, f.end);
    REQUIRE(states.size() == 5);

    const auto& third = states[2];
    CHECK(third.final.scales.at("x") == *f.end.find_scale("x"));
    CHECK(third.final.rows == third.initial.rows);

    const auto& fifth = states[4];
    CHECK(fifth.initial.scales.at("x") == *f.end.find_scale("x"));
    CHECK(fifth.initial.scales.at("y") == *f.end.find_scale("y"));
    CHECK(fifth.final.rows.size() == 22);
    CHECK(fifth.initial.rows.size() == 12);
}

TEST_CASE("single default step goes from start to end")
{
    const auto f = test::load("aggregation");
    const Schedule s = plan_schedule(f.spec, f.start, f.end);
    const auto states = thread_step_states(s, f.start, f.end);
    REQUIRE(states.size() == 1);
    CHECK(states[0].initial.mark->type == MarkType::symbol);
    CHECK(states[0].final.mark->type == MarkType::rect);
    CHECK(states[0].final.rows.size() == 3);
}

TEST_CASE("change_spec_for applies exactly the subset")
{
    const auto f = test::load("fig1");
    const ChangeSet cs = detect_changes(f.start, f.end);
    std::vector<AtomicChange> scales;
    for (const auto& c : *cs.find(lines))
    {
        if (c.kind.starts_with("scale."))
        {
            scales.push_back(c);
        }
    }
    const ChangeSpec spec = change_spec_for(scales, ComponentKind::mark);
    CHECK_FALSE(spec.data.apply);
    const auto keys = resolve_join_keys(f.start, f.end, "lines", {});
    const ComponentState a = component_state(f.start, lines, keys.start);
    const ComponentState b = component_state(f.end, lines, keys.end);
    const ComponentState mid = apply_change(a, b, spec, f.end);
    CHECK(mid.rows == a.rows);
    CHECK(mid.scales.at("x") == b.scales.at("x"));
    CHECK(mid.scales.at("y") == b.scales.at("y"));
}

TEST_CASE("guide tick join")
{
    ComponentState a;
    a.ref = {ComponentKind::axis, "ax"};
    a.present = true;
    AxisDef axis;
    axis.name = "ax";
    axis.scale = "y";
    a.axis = axis;
    ScaleDef y;
    y.name = "y";
    y.numeric_domain = {0, 100};
    y.pixel_range = {100, 0};
    a.scales["y"] = y;
    ComponentState b = a;
    b.scales["y"].numeric_domain = {0, 50};

    SUBCASE("shrinking domain")
    {
        const GuideJoin j = diff_guide_data(a, b, DomainDimension::same);
        std::vector<double> upd, ex, en;
        for (const auto& v : j.update) upd.push_back(as_number(v));
        for (const auto& v : j.exit) ex.push_back(as_number(v));
        for (const auto& v : j.enter) en.push_back(as_number(v));
        CHECK(upd == std::vector<double>{0, 25, 50});
        CHECK(ex == std::vector<double>{75, 100});
        CHECK(en.empty());
        CHECK_FALSE(j.crossfade);
    }
    SUBCASE("identical scales")
    {
        const GuideJoin j = diff_guide_data(a, a, DomainDimension::same);
        CHECK(j.update.size() == 5);
        CHECK(j.enter.empty());
        CHECK(j.exit.empty());
    }
    SUBCASE("dimension change cross-fades")
    {
        const GuideJoin j = diff_guide_data(a, b, DomainDimension::different);
        CHECK(j.crossfade);
        CHECK(j.update.empty());
    }
}
