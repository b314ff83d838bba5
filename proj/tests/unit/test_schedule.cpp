#include <doctest.h>

#include "stagecraft/error.hpp"
#include "stagecraft/plan.hpp"
#include "stagecraft/schedule.hpp"
#include "support.hpp"

using namespace stagecraft;

namespace
{

Step step_ms(const std::string& mark, double ms)
{
    Step s;
    s.component = {ComponentKind::mark, mark};
    s.timing.duration = TimeValue::ms(ms);
    return s;
}

struct Window
{
    std::int64_t start;
    std::int64_t end;
    bool operator==(const Window&) const = default;
};

std::vector<Window> windows(const Schedule& s)
{
    std::vector<Window> out;
    for (const auto& st : s.steps)
    {
        out.push_back({st.start_ms, st.end_ms});
    }
    return out;
}

std::vector<Value> numbers(std::initializer_list<double> xs)
{
    std::vector<Value> out;
    for (double x : xs)
    {
        out.emplace_back(x);
    }
    return out;
}

}  // namespace

TEST_CASE("concat sequences its children")
{
    Concat c;
    c.blocks = {Block{step_ms("a", 500)}, Block{step_ms("b", 300)}};
    const Schedule s = schedule_timeline(Block{c}, 0, std::nullopt);
    CHECK(windows(s) == std::vector<Window>{{0, 500}, {500, 800}});
    CHECK(s.total_end_ms == 800);
}

TEST_CASE("sync aligns starts or ends")
{
    Sync sy;
    sy.blocks = {Block{step_ms("a", 500)}, Block{step_ms("b", 300)}};
    CHECK(windows(schedule_timeline(Block{sy}, 0, std::nullopt)) == std::vector<Window>{{0, 500}, {0, 300}});
    sy.at = SyncAt::end;
    CHECK(windows(schedule_timeline(Block{sy}, 0, std::nullopt)) == std::vector<Window>{{0, 500}, {200, 500}});
}

TEST_CASE("delays shift a step inside its block")
{
    Step s = step_ms("a", 400);
    s.timing.delay = TimeValue::ms(100);
    Concat c;
    c.blocks = {Block{s}, Block{step_ms("b", 100)}};
    const Schedule sc = schedule_timeline(Block{c}, 0, std::nullopt);
    CHECK(windows(sc) == std::vector<Window>{{100, 500}, {500, 600}});
    CHECK(sc.steps[0].delay_ms == 100);
}

TEST_CASE("ratios resolve against the total")
{
    CHECK(resolve_ms(TimeValue::ratio(0.25), 2000.0) == 500);
    CHECK(resolve_ms(TimeValue::ms(123), std::nullopt) == 123);
    try
    {
        resolve_ms(TimeValue::ratio(0.5), std::nullopt);
        FAIL("no error");
    }
    catch (const Error& e)
    {
        CHECK(e.code() == ErrorCode::missing_total);
    }
}

TEST_CASE("fig1 schedule")
{
    const auto f = test::load("fig1");
    const Schedule s = plan_schedule(f.spec, f.start, f.end);
    CHECK(windows(s) == std::vector<Window>{{0, 900}, {0, 900}, {0, 900}, {900, 1100}, {1100, 2000}});
    CHECK(s.total_end_ms == 2000);
    CHECK(s.steps[3].step.component.kind == ComponentKind::pause);
    CHECK(s.warnings.empty());
}

TEST_CASE("concat enumerator expansion divides the body")
{
    Concat c;
    c.blocks = {Block{step_ms("m", 900)}};
    c.enumerator = EnumeratorSpec{FilterRef{"year", Comparator::less_equal, ""}, {}, 1.0};
    const Concat three = expand_concat_enumerator(c, numbers({1, 2, 3}), std::nullopt);
    REQUIRE(three.blocks.size() == 3);
    const Schedule s = schedule_timeline(Block{three}, 0, std::nullopt);
    CHECK(windows(s) == std::vector<Window>{{0, 300}, {300, 600}, {600, 900}});
    REQUIRE(three.blocks[2].binding.has_value());
    CHECK(as_number(three.blocks[2].binding->value) == 3.0);

    const Concat one = expand_concat_enumerator(c, numbers({7}), std::nullopt);
    REQUIRE(one.blocks.size() == 1);
    CHECK(windows(schedule_timeline(Block{one}, 0, std::nullopt)) == std::vector<Window>{{0, 900}});

    c.blocks = {Block{step_ms("m", 3100)}};
    std::vector<Value> years;
    for (int y = 1984; y <= 2014; ++y)
    {
        years.emplace_back(double(y));
    }
    const Schedule sweep = schedule_timeline(Block{expand_concat_enumerator(c, years, std::nullopt)}, 0, std::nullopt);
    REQUIRE(sweep.steps.size() == 31);
    for (const auto& st : sweep.steps)
    {
        CHECK(st.end_ms - st.start_ms == 100);
    }
}

TEST_CASE("remainder goes to the last iteration")
{
    Concat c;
    c.blocks = {Block{step_ms("m", 1000)}};
    c.enumerator = EnumeratorSpec{FilterRef{"year", Comparator::less_equal, ""}, {}, 1.0};
    const Schedule s = schedule_timeline(Block{expand_concat_enumerator(c, numbers({1, 2, 3}), std::nullopt)}, 0, std::nullopt);
    CHECK(windows(s) == std::vector<Window>{{0, 333}, {333, 666}, {666, 1000}});
}

TEST_CASE("enumerator values")
{
    ChartSpec start;
    DatasetDef d;
    d.name = "d";
    d.rows = {{{"year", 1990.0}}};
    d.transforms.push_back({FilterTransform{"year", Comparator::less_equal, {Value{1984.0}}}});
    start.datasets.push_back(d);
    ChartSpec end = start;
    std::get<FilterTransform>(end.datasets[0].transforms[0].op).rhs = {Value{2014.0}};

    EnumeratorSpec e{FilterRef{"year", Comparator::less_equal, "d"}, {}, 1.0};
    const auto v = resolve_enumerator_values(e, start, end);
    REQUIRE(v.size() == 31);
    CHECK(as_number(v.front()) == 1984.0);
    CHECK(as_number(v.back()) == 2014.0);

    CHECK(resolve_enumerator_values(e, start, start).size() == 1);

    EnumeratorSpec explicit_values{FilterRef{"year", Comparator::less_equal, "d"},
                                   {Value{std::string("a")}, Value{std::string("b")}, Value{std::string("c")}}, std::nullopt};
    CHECK(resolve_enumerator_values(explicit_values, start, end) == explicit_values.values);
}

TEST_CASE("fig6 sweeps five years across the concat")
{
    const auto f = test::load("fig6");
    const Schedule s = plan_schedule(f.spec, f.start, f.end);
    REQUIRE(s.steps.size() == 10);
    CHECK(s.total_end_ms == 2000);
    CHECK(as_number(s.steps[0].binding->value) == 1980.0);
    CHECK(as_number(s.steps[9].binding->value) == 2000.0);
}

TEST_CASE("autoScaleOrder follows the direction of the data change")
{
    SUBCASE("decreasing values update data first")
    {
        const auto f = test::load("fig7-decreasing");
        const Schedule s = plan_schedule(f.spec, f.start, f.end);
        REQUIRE(s.steps.size() == 3);
        CHECK(s.steps[0].step.component == ComponentRef{ComponentKind::mark, "bars"});
        CHECK(s.steps[0].step.change.scale.selection.mode == Selection::Mode::none);
        CHECK(s.warnings.empty());
    }
    SUBCASE("increasing values change the scale first")
    {
        const auto f = test::load("fig7-increasing");
        const Schedule s = plan_schedule(f.spec, f.start, f.end);
        REQUIRE(s.steps.size() == 3);
        CHECK_FALSE(s.steps[0].step.change.data.apply);
        CHECK(s.warnings.empty());
    }
}

TEST_CASE("autoScaleOrder falls back with a warning")
{
    Concat c;
    c.blocks = {Block{step_ms("a", 1)}, Block{step_ms("b", 1)}, Block{step_ms("c", 1)}};
    c.auto_scale_order = {"a", "b", "c"};
    const AutoOrder none = resolve_auto_scale_order(c, [](const std::vector<std::size_t>&) { return false; });
    CHECK(none.order == std::vector<std::size_t>{0, 1, 2});
    CHECK(none.warning.has_value());

    const AutoOrder found = resolve_auto_scale_order(c, [](const std::vector<std::size_t>& p) { return p[0] == 2; });
    CHECK(found.order == std::vector<std::size_t>{2, 0, 1});
    CHECK_FALSE(found.warning.has_value());
}

TEST_CASE("overlapping steps on one component are reported")
{
    Sync sy;
    sy.blocks = {Block{step_ms("a", 500)}, Block{step_ms("a", 300)}};
    CHECK(find_overlapping_steps(schedule_timeline(Block{sy}, 0, std::nullopt)).has_value());
    Concat c;
    c.blocks = {Block{step_ms("a", 500)}, Block{step_ms("a", 300)}};
    CHECK_FALSE(find_overlapping_steps(schedule_timeline(Block{c}, 0, std::nullopt)).has_value());
}
