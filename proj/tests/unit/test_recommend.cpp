#include <doctest.h>

#include <cmath>
#include <set>

#include "stagecraft/changes.hpp"
#include "stagecraft/error.hpp"
#include "stagecraft/recommend.hpp"
#include "support.hpp"

using namespace stagecraft;

namespace
{

AtomicChange change(ComponentKind kind, const std::string& name, const std::string& what,
                    std::optional<DomainDimension> dim = std::nullopt)
{
    AtomicChange c;
    c.component = {kind, name};
    c.kind = what;
    c.dimension = dim;
    if (what == "data")
    {
        c.detail = "filter";
    }
    return c;
}

const CostModel tuned = default_cost_model("tuned");

std::vector<Assignment> brute_force(std::size_t k, std::size_t n)
{
    std::vector<Assignment> out;
    std::size_t total = 1;
    for (std::size_t i = 0; i < k; ++i)
    {
        total *= n;
    }
    for (std::size_t code = 0; code < total; ++code)
    {
        Assignment a(k);
        std::size_t c = code;
        for (std::size_t i = k; i-- > 0;)
        {
            a[i] = c % n;
            c /= n;
        }
        out.push_back(a);
    }
    return out;
}

}  // namespace

TEST_CASE("capacity presets")
{
    CHECK(capacity(800, capacity_preset("initial")) == 0.6);
    CHECK(capacity(1200, capacity_preset("tuned")) == 0.7);
    CHECK(capacity(2000, capacity_preset("tuned")) == doctest::Approx(1.3088).epsilon(1e-3));
    CHECK(capacity(667, capacity_preset("tuned")) == doctest::Approx(0.2024).epsilon(1e-3));
    CHECK_THROWS_AS(capacity_preset("loose"), Error);
    double prev = -1.0;
    for (int t = 0; t <= 5000; t += 50)
    {
        const double c = capacity(t, capacity_preset("tuned"));
        CHECK(c > prev);
        prev = c;
    }
}

TEST_CASE("stage cost")
{
    CHECK(stage_cost({}, tuned) == 0.0);
    CHECK(stage_cost({change(ComponentKind::mark, "m", "scale.x"), change(ComponentKind::mark, "m", "scale.y")}, tuned) ==
          doctest::Approx(0.8));
    CHECK(stage_cost({change(ComponentKind::mark, "m", "data")}, tuned) == doctest::Approx(0.65));
    AtomicChange agg = change(ComponentKind::mark, "m", "data");
    agg.detail = "aggregate";
    CHECK(stage_cost({agg}, tuned) == doctest::Approx(0.7));
    CHECK_THROWS_AS(stage_cost({change(ComponentKind::mark, "m", "wiggle")}, tuned), Error);
}

TEST_CASE("bundling rules")
{
    const auto same = DomainDimension::same;
    const auto diff = DomainDimension::different;
    SUBCASE("mark and axis scale together")
    {
        const Stage s{change(ComponentKind::mark, "m", "scale.y", same), change(ComponentKind::axis, "y-axis", "scale.y", same)};
        CHECK(bundling_adjustment(s, tuned) == doctest::Approx(-0.2));
    }
    SUBCASE("x and y scales of a mark together")
    {
        const Stage s{change(ComponentKind::mark, "m", "scale.x", same), change(ComponentKind::mark, "m", "scale.y", same)};
        CHECK(bundling_adjustment(s, tuned) == doctest::Approx(-0.2));
    }
    SUBCASE("dimension change without its encoding")
    {
        const Stage s{change(ComponentKind::mark, "m", "scale.x", diff)};
        CHECK(bundling_adjustment(s, tuned) == doctest::Approx(0.4));
        const Stage with_encoding{change(ComponentKind::mark, "m", "scale.x", diff), change(ComponentKind::mark, "m", "encode.x")};
        CHECK(bundling_adjustment(with_encoding, tuned) == doctest::Approx(0.0));
    }
    SUBCASE("empty stage")
    {
        CHECK(bundling_adjustment({}, tuned) == 0.0);
    }
}

TEST_CASE("complexity arithmetic")
{
    const auto same = DomainDimension::same;
    const Stage xy{change(ComponentKind::mark, "m", "scale.x", same), change(ComponentKind::mark, "m", "scale.y", same)};
    CHECK(complexity({xy}, {2000}, tuned) == 0.0);
    CHECK(complexity({}, {}, tuned) == 0.0);

    const Stage one{change(ComponentKind::mark, "m", "scale.x", same)};
    const double expected = 3 * (0.4 - capacity(667, capacity_preset("tuned")));
    CHECK(complexity({one, one, one}, {667, 667, 667}, tuned) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(expected == doctest::Approx(0.5928).epsilon(1e-3));
}

TEST_CASE("stage durations")
{
    CHECK(stage_durations(2000, 3) == std::vector<std::int64_t>{666, 666, 668});
    CHECK(stage_durations(2000, 1) == std::vector<std::int64_t>{2000});
}

TEST_CASE("raw enumeration matches the closed form and a brute-force oracle")
{
    CHECK(enumerate_component_sequences(3, 2).size() == 8);
    CHECK(enumerate_component_sequences(5, 1).size() == 1);
    CHECK(enumerate_component_sequences(2, 3).size() == 9);
    for (std::size_t k = 1; k <= 4; ++k)
    {
        for (std::size_t n = 1; n <= 3; ++n)
        {
            CHECK(enumerate_component_sequences(k, n) == brute_force(k, n));
        }
    }
}

TEST_CASE("fig1 mark pruning")
{
    const auto f = test::load("fig1");
    const ChangeSet cs = detect_changes(f.start, f.end);
    const ComponentRef lines{ComponentKind::mark, "lines"};
    const auto& changes = *cs.find(lines);
    const auto keys = resolve_join_keys(f.start, f.end, "lines", {});
    const PruneResult two = prune_sequences(lines, changes, 2, f.start, f.end, keys);
    CHECK(two.raw == 8);
    CHECK(two.pruned == 3);
    CHECK(two.surviving.size() == 5);
    for (const auto& a : two.surviving)
    {
        std::size_t data_stage = 0;
        std::size_t last_scale = 0;
        for (std::size_t i = 0; i < changes.size(); ++i)
        {
            if (changes[i].kind == "data")
            {
                data_stage = a[i];
            }
            else
            {
                last_scale = std::max(last_scale, a[i]);
            }
        }
        CHECK(data_stage >= last_scale);
    }
    const PruneResult one = prune_sequences(lines, changes, 1, f.start, f.end, keys);
    CHECK(one.surviving.size() == 1);
}

TEST_CASE("combine excludes empty stages")
{
    const std::vector<Assignment> a{{0}, {1}};
    const std::vector<Assignment> b{{0}, {1}};
    const auto combos = combine_candidates({a, b}, 2);
    REQUIRE(combos.size() == 2);
    std::set<std::vector<std::size_t>> got(combos.begin(), combos.end());
    CHECK(got == std::set<std::vector<std::size_t>>{{0, 1}, {1, 0}});
    CHECK(combine_candidates({{{0}}, {{0}}}, 1).size() == 1);

    // A{a1,a2}, B{b}: oracle over the full cross product.
    const auto as = enumerate_component_sequences(2, 2);
    const auto bs = enumerate_component_sequences(1, 2);
    std::size_t oracle = 0;
    for (const auto& x : as)
    {
        for (const auto& y : bs)
        {
            std::set<std::size_t> used(x.begin(), x.end());
            used.insert(y.begin(), y.end());
            oracle += used.size() == 2 ? 1 : 0;
        }
    }
    CHECK(combine_candidates({as, bs}, 2).size() == oracle);
}

TEST_CASE("constraint violations")
{
    const auto f = test::load("aggregation");
    const ComponentRef marks{ComponentKind::mark, "marks"};
    const auto keys = resolve_join_keys(f.start, f.end, "marks", {});
    const ComponentState a = component_state(f.start, marks, keys.start);
    const ComponentState b = component_state(f.end, marks, keys.end);

    SUBCASE("aggregated data with the raw field still encoded")
    {
        ChangeSpec only_data;
        only_data.encode.mode = EncodeChange::Mode::none;
        only_data.scale.selection.mode = Selection::Mode::none;
        only_data.mark_type = false;
        const auto v = check_constraints(apply_change(a, b, only_data, f.end));
        REQUIRE_FALSE(v.empty());
        CHECK(v[0].rule == "Unavailable Data Field");
    }
    SUBCASE("rect without extents")
    {
        ChangeSpec only_type;
        only_type.data.apply = false;
        only_type.encode.mode = EncodeChange::Mode::none;
        only_type.scale.selection.mode = Selection::Mode::none;
        const auto v = check_constraints(apply_change(a, b, only_type, f.end));
        REQUIRE_FALSE(v.empty());
        CHECK(v[0].rule == "Unavailable Encoding");
    }
    SUBCASE("endpoints are clean")
    {
        CHECK(check_constraints(a).empty());
        CHECK(check_constraints(b).empty());
    }
}

TEST_CASE("color encoding before its scale is unavailable")
{
    ComponentState s;
    s.ref = {ComponentKind::mark, "m"};
    s.present = true;
    MarkDef m;
    m.name = "m";
    m.encodings["color"] = EncodingChannel{std::nullopt, "k", "color"};
    s.mark = m;
    s.rows = {{"#0", {{"k", std::string("a")}}}};
    const auto v = check_constraints(s);
    REQUIRE(v.size() == 1);
    CHECK(v[0].rule == "Unavailable Scale");
}

TEST_CASE("adversarial overflow prunes everything")
{
    ChartSpec start;
    start.width = 100;
    start.height = 100;
    DatasetDef d;
    d.name = "d";
    d.rows = {{{"v", 5.0}}};
    start.datasets.push_back(d);
    ScaleDef x;
    x.name = "x";
    x.numeric_domain = {0, 10};
    x.pixel_range = {0, 100};
    start.scales.push_back(x);
    MarkDef m;
    m.name = "m";
    m.dataset = "d";
    m.encodings["x"] = EncodingChannel{std::nullopt, "v", "x"};
    start.marks.push_back(m);

    ChartSpec end = start;
    end.datasets[0].rows = {{{"v", 50.0}}};
    end.scales[0].numeric_domain = {40, 60};

    const ComponentRef ref{ComponentKind::mark, "m"};
    const ChangeSet cs = detect_changes(start, end);
    const PruneResult pr = prune_sequences(ref, *cs.find(ref), 2, start, end);
    CHECK(pr.raw == 4);
    // Both changes in one stage still leave an empty stage; every split overflows.
    CHECK(pr.surviving.size() == 2);
    RecommendOptions opts;
    opts.max_stages = 2;
    const Recommendation rec = recommend(start, end, opts);
    for (const auto& c : rec.candidates)
    {
        CHECK(c.stages.size() == 1);
    }
    CHECK_FALSE(rec.enumeration[1].components[0].explanations.empty());
}

TEST_CASE("view steps follow size effects")
{
    const auto f = test::load("sort-filter");
    RecommendOptions opts;
    opts.max_stages = 3;
    const Recommendation rec = recommend(f.start, f.end, opts);
    REQUIRE_FALSE(rec.candidates.empty());
    for (const auto& c : rec.candidates)
    {
        std::size_t seen = 0;
        for (std::size_t s = 0; s < c.stages.size(); ++s)
        {
            for (const auto& ch : c.stages[s])
            {
                if (ch.component.kind == ComponentKind::view)
                {
                    ++seen;
                    bool shrinks_here = false;
                    for (const auto& other : c.stages[s])
                    {
                        shrinks_here |= other.component.kind != ComponentKind::view && other.height == SizeEffect::shrinks;
                    }
                    bool shrinks_later = false;
                    for (std::size_t t = s + 1; t < c.stages.size(); ++t)
                    {
                        for (const auto& other : c.stages[t])
                        {
                            shrinks_later |= other.height == SizeEffect::shrinks;
                        }
                    }
                    CHECK((shrinks_here || s + 1 == c.stages.size()));
                    CHECK_FALSE(shrinks_later);
                }
            }
        }
        CHECK(seen == 1);
    }
}

TEST_CASE("recommendation coverage and order")
{
    const auto f = test::load("fig1");
    const Recommendation rec = recommend(f.start, f.end, {});
    REQUIRE_FALSE(rec.candidates.empty());
    const std::size_t total = rec.changes.count();
    for (std::size_t i = 0; i < rec.candidates.size(); ++i)
    {
        const auto& c = rec.candidates[i];
        std::size_t n = 0;
        for (const auto& s : c.stages)
        {
            CHECK_FALSE(s.empty());
            n += s.size();
        }
        CHECK(n == total);
        if (i > 0)
        {
            CHECK(rec.candidates[i - 1].score <= c.score + 1e-9);
        }
    }
    CHECK(rec.candidates[0].score == doctest::Approx(2.05 - 0.6 - capacity(2000, tuned.capacity)).epsilon(1e-12));

    const Recommendation again = recommend(f.start, f.end, {});
    REQUIRE(again.candidates.size() == rec.candidates.size());
    for (std::size_t i = 0; i < rec.candidates.size(); ++i)
    {
        CHECK(again.candidates[i].signature == rec.candidates[i].signature);
    }

    RecommendOptions one;
    one.max_stages = 1;
    CHECK(recommend(f.start, f.end, one).candidates.size() == 1);
}

TEST_CASE("recommend rejects bad options and identical charts")
{
    const auto f = test::load("fig1");
    RecommendOptions o;
    o.max_stages = 5;
    CHECK_THROWS_AS(recommend(f.start, f.end, o), Error);
    o.max_stages = 2;
    o.total_ms = 0;
    CHECK_THROWS_AS(recommend(f.start, f.end, o), Error);
    const Recommendation same = recommend(f.start, f.start, {});
    CHECK(same.candidates.empty());
    CHECK_FALSE(same.warnings.empty());
}

TEST_CASE("candidate specs compile")
{
    const auto f = test::load("fig1");
    const Recommendation rec = recommend(f.start, f.end, {});
    for (std::size_t i = 0; i < 5 && i < rec.candidates.size(); ++i)
    {
        const auto& spec = rec.candidates[i].spec;
        CHECK(validate_transition(spec, f.start, f.end).empty());
        CHECK(parse_transition(serialize_transition(spec)) == spec);
    }
}

TEST_CASE("cost model documents")
{
    const CostModel m = default_cost_model("initial");
    CHECK(parse_cost_model(cost_model_to_json(m, "initial").dump(), "initial") == m);
    CostModel bad = m;
    bad.weights["markType"] = 0.9;
    CHECK_THROWS_AS(validate_cost_model(bad), Error);
    bad = m;
    bad.weights["scale"] = 0.0;
    CHECK_THROWS_AS(validate_cost_model(bad), Error);
    bad = m;
    bad.discount = 0.1;
    CHECK_THROWS_AS(validate_cost_model(bad), Error);

    const std::string path = std::string(STAGECRAFT_FIXTURE_DIR) + "/../config/cost-model.json";
    CHECK(parse_cost_model(read_file(path), "tuned") == default_cost_model("tuned"));
    CHECK(parse_cost_model(read_file(path), "initial") == default_cost_model("initial"));
}
