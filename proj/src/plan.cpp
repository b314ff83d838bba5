#include "stagecraft/plan.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stagecraft/changes.hpp"
#include "stagecraft/error.hpp"
#include "stagecraft/json_util.hpp"

namespace stagecraft
{

using nlohmann::json;

const char* segment_role_name(SegmentRole role)
{
    switch (role)
    {
        case SegmentRole::enter: return "enter";
        case SegmentRole::update: return "update";
        case SegmentRole::exit: return "exit";
    }
    return "update";
}

namespace
{

SegmentRole segment_role_from_name(const std::string& name)
{
    if (name == "enter") return SegmentRole::enter;
    if (name == "update") return SegmentRole::update;
    if (name == "exit") return SegmentRole::exit;
    throw Error(ErrorCode::invalid_value, "unknown segment role '" + name + "'");
}

}  // namespace

// ---------------------------------------------------------------------------------------------------
// Staggering

std::vector<StaggerWindow> stagger_windows(std::size_t n, double overlap, Ease ease, double start, double duration)
{
    std::vector<StaggerWindow> out(n);
    if (n == 0)
    {
        return out;
    }
    std::vector<double> e(n);
    std::vector<double> s(n, 0.0);
    const auto dn = static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
    {
        e[i] = ease_value(ease, static_cast<double>(i + 1) / dn) - ease_value(ease, static_cast<double>(i) / dn);
        if (i > 0)
        {
            s[i] = s[i - 1] + e[i - 1] * (1.0 - overlap);
        }
    }
    double last = 0.0;
    std::size_t last_index = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        if (s[i] + e[i] >= last)
        {
            last = s[i] + e[i];
            last_index = i;
        }
    }
    const double k = last > 0.0 ? duration / last : 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
        out[i] = {start + s[i] * k, start + (s[i] + e[i]) * k};
    }
    out[last_index].end = start + duration;
    return out;
}

std::vector<StaggerWindow> resolve_stagger(const std::vector<Row>& datums, const TransitionSpec& spec,
                                           const StaggeringSpec& staggering, double start, double duration)
{
    std::vector<Value> keys;
    keys.reserve(datums.size());
    for (const auto& d : datums)
    {
        const auto it = d.find(staggering.field);
        if (it == d.end())
        {
            throw Error(ErrorCode::unknown_field,
                        "staggering '" + staggering.name + "' needs field '" + staggering.field + "' on every element");
        }
        keys.push_back(it->second);
    }

    std::vector<Value> groups = keys;
    std::sort(groups.begin(), groups.end(), value_less);
    groups.erase(std::unique(groups.begin(), groups.end()), groups.end());
    if (staggering.order == StaggeringSpec::Order::descending)
    {
        std::reverse(groups.begin(), groups.end());
    }
    else if (staggering.order == StaggeringSpec::Order::explicit_list)
    {
        std::vector<Value> ordered;
        for (const auto& v : staggering.explicit_order)
        {
            if (std::find(groups.begin(), groups.end(), v) != groups.end() &&
                std::find(ordered.begin(), ordered.end(), v) == ordered.end())
            {
                ordered.push_back(v);
            }
        }
        for (const auto& v : groups)
        {
            if (std::find(ordered.begin(), ordered.end(), v) == ordered.end())
            {
                ordered.push_back(v);
            }
        }
        groups = std::move(ordered);
    }

    const auto windows = stagger_windows(groups.size(), staggering.overlap, staggering.ease, start, duration);
    std::vector<StaggerWindow> out(datums.size());
    const StaggeringSpec* inner = staggering.nested.empty() ? nullptr : spec.find_staggering(staggering.nested);
    for (std::size_t g = 0; g < groups.size(); ++g)
    {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < keys.size(); ++i)
        {
            if (keys[i] == groups[g])
            {
                members.push_back(i);
            }
        }
        if (inner == nullptr)
        {
            for (auto i : members)
            {
                out[i] = windows[g];
            }
            continue;
        }
        std::vector<Row> sub;
        for (auto i : members)
        {
            sub.push_back(datums[i]);
        }
        const auto nested = resolve_stagger(sub, spec, *inner, windows[g].start, windows[g].end - windows[g].start);
        for (std::size_t m = 0; m < members.size(); ++m)
        {
            out[members[m]] = nested[m];
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------------
// Interpolation

namespace
{

bool is_hex_color(std::string_view s)
{
    if (s.size() != 7 || s[0] != '#')
    {
        return false;
    }
    return std::all_of(s.begin() + 1, s.end(), [](char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; });
}

int hex_channel(std::string_view s, std::size_t at) { return std::stoi(std::string(s.substr(at, 2)), nullptr, 16); }

double blend(double a, double b, double p) { return (1.0 - p) * a + p * b; }

// Position on `other` of the nearest vertex (previous first, then next) that both lists share.
std::optional<std::pair<double, double>> anchor(const Points& own, std::size_t i, const std::map<std::string, const Vertex*>& other)
{
    for (std::size_t k = i; k-- > 0;)
    {
        const auto it = other.find(own[k].key);
        if (it != other.end())
        {
            return std::pair{it->second->x, it->second->y};
        }
    }
    for (std::size_t k = i + 1; k < own.size(); ++k)
    {
        const auto it = other.find(own[k].key);
        if (it != other.end())
        {
            return std::pair{it->second->x, it->second->y};
        }
    }
    return std::nullopt;
}

Points blend_points(const Points& a, const Points& b, double p)
{
    if (p <= 0.0)
    {
        return a;
    }
    if (p >= 1.0)
    {
        return b;
    }
    std::map<std::string, const Vertex*> in_a;
    std::map<std::string, const Vertex*> in_b;
    for (const auto& v : a) in_a.emplace(v.key, &v);
    for (const auto& v : b) in_b.emplace(v.key, &v);

    // Merged order: b's order, with a-only vertices after their nearest preceding shared vertex.
    std::vector<std::pair<std::string, int>> merged;  // key, 0 shared / 1 a-only / 2 b-only
    for (const auto& v : b)
    {
        merged.emplace_back(v.key, in_a.contains(v.key) ? 0 : 2);
    }
    std::size_t front_insert = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        if (in_b.contains(a[i].key))
        {
            continue;
        }
        std::size_t at = front_insert;
        bool anchored = false;
        for (std::size_t k = i; k-- > 0;)
        {
            if (!in_b.contains(a[k].key))
            {
                continue;
            }
            anchored = true;
            const auto pos = std::find_if(merged.begin(), merged.end(), [&](const auto& m) { return m.first == a[k].key; });
            at = static_cast<std::size_t>(pos - merged.begin()) + 1;
            while (at < merged.size() && merged[at].second == 1)
            {
                ++at;
            }
            break;
        }
        if (!anchored)
        {
            ++front_insert;
        }
        merged.insert(merged.begin() + static_cast<std::ptrdiff_t>(at), {a[i].key, 1});
    }

    auto index_of = [](const Points& pts, const std::string& key) {
        return static_cast<std::size_t>(std::find_if(pts.begin(), pts.end(), [&](const Vertex& v) { return v.key == key; }) - pts.begin());
    };
    Points out;
    out.reserve(merged.size());
    for (const auto& [key, kind] : merged)
    {
        if (kind == 0)
        {
            const Vertex& va = *in_a.at(key);
            const Vertex& vb = *in_b.at(key);
            out.push_back({key, blend(va.x, vb.x, p), blend(va.y, vb.y, p)});
        }
        else if (kind == 2)
        {
            const Vertex& vb = *in_b.at(key);
            const auto from = anchor(b, index_of(b, key), in_a).value_or(std::pair{vb.x, vb.y});
            out.push_back({key, blend(from.first, vb.x, p), blend(from.second, vb.y, p)});
        }
        else
        {
            const Vertex& va = *in_a.at(key);
            const auto to = anchor(a, index_of(a, key), in_b).value_or(std::pair{va.x, va.y});
            out.push_back({key, blend(va.x, to.first, p), blend(va.y, to.second, p)});
        }
    }
    return out;
}

AttrValue blend_value(const AttrValue& a, const AttrValue& b, double p)
{
    if (const auto* x = std::get_if<double>(&a))
    {
        if (const auto* y = std::get_if<double>(&b))
        {
            return blend(*x, *y, p);
        }
    }
    if (const auto* x = std::get_if<std::string>(&a))
    {
        if (const auto* y = std::get_if<std::string>(&b); y != nullptr && is_hex_color(*x) && is_hex_color(*y))
        {
            return blend_color(*x, *y, p);
        }
    }
    if (const auto* x = std::get_if<Points>(&a))
    {
        if (const auto* y = std::get_if<Points>(&b))
        {
            return blend_points(*x, *y, p);
        }
    }
    return p < 0.5 ? a : b;
}

}  // namespace

std::string blend_color(std::string_view a, std::string_view b, double p)
{
    if (p <= 0.0)
    {
        return std::string(a);
    }
    if (p >= 1.0)
    {
        return std::string(b);
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out = "#";
    for (std::size_t at = 1; at < 7; at += 2)
    {
        const double c = blend(hex_channel(a, at), hex_channel(b, at), p);
        const int v = std::clamp(static_cast<int>(std::floor(c + 0.5)), 0, 255);
        out += digits[v >> 4];
        out += digits[v & 15];
    }
    return out;
}

Attrs interpolate_attrs(const Attrs& from, const Attrs& to, double p)
{
    Attrs out;
    for (const auto& [k, a] : from)
    {
        const auto it = to.find(k);
        out[k] = it == to.end() ? a : blend_value(a, it->second, p);
    }
    for (const auto& [k, b] : to)
    {
        if (!out.contains(k))
        {
            out[k] = b;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------------------------------
// Scheduling with autoScaleOrder

namespace
{

Block& block_at(Block& root, const std::vector<std::size_t>& path)
{
    Block* b = &root;
    for (auto i : path)
    {
        if (auto* sync = std::get_if<Sync>(&b->node))
        {
            b = &sync->blocks.at(i);
        }
        else
        {
            b = &std::get<Concat>(b->node).blocks.at(i);
        }
    }
    return *b;
}

bool overflow_free(const Block& root, const std::vector<std::string>& marks, const ChartSpec& start, const ChartSpec& end,
                   std::optional<double> total)
{
    try
    {
        const Schedule schedule = schedule_timeline(root, 0, total);
        const auto states = thread_step_states(schedule, start, end);
        for (std::size_t i = 0; i < states.size(); ++i)
        {
            const ComponentRef& ref = schedule.steps[i].step.component;
            if (ref.kind != ComponentKind::mark || std::find(marks.begin(), marks.end(), ref.name) == marks.end())
            {
                continue;
            }
            if (!overflow_report(states[i].final).empty())
            {
                return false;
            }
        }
        return true;
    }
    catch (const Error&)
    {
        return false;
    }
}

void resolve_auto_orders(Block& root, std::vector<std::size_t>& path, const ChartSpec& start, const ChartSpec& end,
                         std::optional<double> total, std::vector<std::string>& warnings)
{
    Block& node = block_at(root, path);
    if (auto* concat = std::get_if<Concat>(&node.node); concat != nullptr && !concat->auto_scale_order.empty())
    {
        const Concat original = *concat;
        const auto chosen = resolve_auto_scale_order(original, [&](const std::vector<std::size_t>& order) {
            Block trial = root;
            std::get<Concat>(block_at(trial, path).node) = reorder_concat(original, order);
            return overflow_free(trial, original.auto_scale_order, start, end, total);
        });
        std::get<Concat>(block_at(root, path).node) = reorder_concat(original, chosen.order);
        if (chosen.warning)
        {
            warnings.push_back(*chosen.warning);
        }
    }
    const Block& current = block_at(root, path);
    std::size_t children = 0;
    if (const auto* sync = std::get_if<Sync>(&current.node))
    {
        children = sync->blocks.size();
    }
    else if (const auto* c = std::get_if<Concat>(&current.node))
    {
        children = c->blocks.size();
    }
    for (std::size_t i = 0; i < children; ++i)
    {
        path.push_back(i);
        resolve_auto_orders(root, path, start, end, total, warnings);
        path.pop_back();
    }
}

}  // namespace

Schedule plan_schedule(const TransitionSpec& spec, const ChartSpec& start, const ChartSpec& end)
{
    Block timeline = expand_concat_enumerators(spec.timeline, start, end, spec.total_duration);
    std::vector<std::string> warnings;
    std::vector<std::size_t> path;
    resolve_auto_orders(timeline, path, start, end, spec.total_duration, warnings);
    Schedule schedule = schedule_timeline(timeline, 0, spec.total_duration);
    schedule.warnings = std::move(warnings);
    return schedule;
}

std::map<std::string, std::vector<std::string>> plan_mark_keys(const TransitionSpec& spec, const ChartSpec& start,
                                                               const ChartSpec& end, bool at_start)
{
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [name, keys] : transition_keys(plan_schedule(spec, start, end), start, end))
    {
        out.emplace(name, at_start ? keys.start : keys.end);
    }
    return out;
}

// ---------------------------------------------------------------------------------------------------
// Compilation

namespace
{

bool crossfade_role(const std::string& role)
{
    return role == "axis-tick" || role == "axis-label" || role == "axis-grid" || role == "legend-symbol" ||
           role == "legend-label";
}

Attrs faded(Attrs attrs)
{
    attrs["opacity"] = 0.0;
    return attrs;
}

struct Rendered
{
    std::vector<SceneElement> elements;
    std::map<std::string, std::size_t> index;

    explicit Rendered(std::vector<SceneElement> els) : elements(std::move(els))
    {
        for (std::size_t i = 0; i < elements.size(); ++i)
        {
            index.emplace(elements[i].id, i);
        }
    }

    const SceneElement* find(const std::string& id) const
    {
        const auto it = index.find(id);
        return it == index.end() ? nullptr : &elements[it->second];
    }
};

class Compiler
{
public:
    Compiler(const ChartSpec& start, const ChartSpec& end, const TransitionSpec& spec) : start_(start), end_(end), spec_(spec) {}

    AnimationPlan run()
    {
        const Schedule schedule = plan_schedule(spec_, start_, end_);
        const auto states = thread_step_states(schedule, start_, end_);
        const auto keys = transition_keys(schedule, start_, end_);

        plan_.total_duration = static_cast<double>(schedule.total_end_ms);
        if (spec_.total_duration)
        {
            plan_.total_duration = std::max(plan_.total_duration, *spec_.total_duration);
        }
        plan_.warnings = schedule.warnings;

        std::set<ComponentRef> touched;
        for (std::size_t i = 0; i < schedule.steps.size(); ++i)
        {
            const ScheduledStep& s = schedule.steps[i];
            plan_.schedule.push_back({component_label(s.step.component), path_label(s.path), s.start_ms, s.end_ms,
                                      s.delay_ms, s.duration_ms});
            if (s.step.component.kind == ComponentKind::pause)
            {
                continue;
            }
            touched.insert(s.step.component);
            compile_step(s, states[i], keys);
        }

        std::vector<ComponentRef> all = chart_components(start_);
        for (const auto& r : chart_components(end_))
        {
            if (std::find(all.begin(), all.end(), r) == all.end())
            {
                all.push_back(r);
            }
        }
        for (const auto& ref : all)
        {
            if (touched.contains(ref))
            {
                continue;
            }
            std::vector<std::string> k;
            if (ref.kind == ComponentKind::mark)
            {
                k = keys.at(ref.name).start;
            }
            for (const auto& e : render_component(component_state(start_, ref, k)))
            {
                add(e, {0.0, plan_.total_duration, e.attrs, e.attrs, Ease::linear, SegmentRole::update});
            }
        }
        for (auto& [id, track] : plan_.tracks)
        {
            std::stable_sort(track.segments.begin(), track.segments.end(),
                             [](const Segment& a, const Segment& b) { return a.t0 < b.t0; });
        }
        return std::move(plan_);
    }

private:
    void add(const SceneElement& e, Segment seg)
    {
        Track& t = plan_.tracks[e.id];
        t.role = e.role;
        t.segments.push_back(std::move(seg));
    }

    std::string field_of(const ScaleDef& s) const
    {
        if (const ScaleDef* a = start_.find_scale(s.name); a != nullptr && *a == s)
        {
            return scale_field(start_, s.name);
        }
        if (const ScaleDef* b = end_.find_scale(s.name); b != nullptr && *b == s)
        {
            return scale_field(end_, s.name);
        }
        return s.domain_source ? s.domain_source->field : std::string{};
    }

    // Whether a guide step replaces its sub-elements instead of joining them.
    bool guide_crossfade(const StepStates& st, const Step& step) const
    {
        auto scale_of = [](const ComponentState& c) -> const ScaleDef* {
            std::string name;
            if (c.axis) name = c.axis->scale;
            if (c.legend) name = c.legend->scale;
            const auto it = c.scales.find(name);
            return it == c.scales.end() ? nullptr : &it->second;
        };
        const ScaleDef* a = scale_of(st.initial);
        const ScaleDef* b = scale_of(st.final);
        if (a == nullptr || b == nullptr || *a == *b)
        {
            return false;
        }
        const DomainDimension d = step.change.scale.dimension ? *step.change.scale.dimension
                                                              : scale_change_dimension(*a, field_of(*a), *b, field_of(*b));
        return d == DomainDimension::different;
    }

    void compile_step(const ScheduledStep& s, const StepStates& st, const std::map<std::string, MarkKeys>& keys)
    {
        const Step& step = s.step;
        const double w0 = static_cast<double>(s.start_ms + s.delay_ms);
        const double w1 = w0 + static_cast<double>(s.duration_ms);

        std::vector<ComponentState> chain{st.initial};
        if (step.enumerator && step.component.kind == ComponentKind::mark)
        {
            const MarkDef* m = end_.find_mark(step.component.name);
            if (m == nullptr)
            {
                m = start_.find_mark(step.component.name);
            }
            FilterRef filter = step.enumerator->filter;
            if (filter.dataset.empty())
            {
                filter.dataset = m->dataset;
            }
            const auto values = resolve_enumerator_values(*step.enumerator, start_, end_, filter.dataset);
            const ComponentState target = component_state(end_, step.component, keys.at(step.component.name).end);
            for (std::size_t j = 0; j + 1 < values.size(); ++j)
            {
                chain.push_back(apply_change(st.initial, target, step.change, end_,
                                             EnumeratorBinding{filter, values[j], j, values.size()}));
            }
        }
        chain.push_back(st.final);

        std::vector<Rendered> renders;
        renders.reserve(chain.size());
        for (const auto& c : chain)
        {
            renders.emplace_back(render_component(c));
        }

        // Element windows.
        std::map<std::string, StaggerWindow> windows;
        if (!step.timing.staggering.empty() && step.component.kind == ComponentKind::mark)
        {
            std::vector<std::string> ids;
            std::vector<Row> datums;
            for (const auto& r : renders)
            {
                for (const auto& e : r.elements)
                {
                    if (std::find(ids.begin(), ids.end(), e.id) == ids.end())
                    {
                        ids.push_back(e.id);
                        datums.push_back(e.datum);
                    }
                }
            }
            const StaggeringSpec* stag = spec_.find_staggering(step.timing.staggering);
            if (stag == nullptr)
            {
                throw Error(ErrorCode::dangling_reference, "unknown staggering '" + step.timing.staggering + "'");
            }
            const auto w = resolve_stagger(datums, spec_, *stag, w0, w1 - w0);
            for (std::size_t i = 0; i < ids.size(); ++i)
            {
                windows.emplace(ids[i], w[i]);
            }
        }
        auto window_of = [&](const std::string& id, std::size_t j) {
            StaggerWindow w{w0, w1};
            if (const auto it = windows.find(id); it != windows.end())
            {
                w = it->second;
            }
            const double k = static_cast<double>(renders.size() - 1);
            const double len = w.end - w.start;
            const double a = w.start + len * static_cast<double>(j) / k;
            const double b = j + 2 == renders.size() ? w.end : w.start + len * static_cast<double>(j + 1) / k;
            return StaggerWindow{a, b};
        };

        const bool crossfade = step.component.kind != ComponentKind::mark && guide_crossfade(st, step);
        for (std::size_t j = 0; j + 1 < renders.size(); ++j)
        {
            emit_pair(chain[j], chain[j + 1], renders[j], renders[j + 1], step, crossfade,
                      [&](const std::string& id) { return window_of(id, j); });
        }
    }

    template <typename WindowFn>
    void emit_pair(const ComponentState& a, const ComponentState& b, const Rendered& ra, const Rendered& rb, const Step& step,
                   bool crossfade, WindowFn window)
    {
        const Ease ease = step.timing.ease;
        const bool is_mark = step.component.kind == ComponentKind::mark;
        const bool line = is_mark && b.mark && b.mark->type == MarkType::line;
        const bool aggregating = is_mark && !line && a.present && a.groupby.empty() && !b.groupby.empty();
        const bool disaggregating = is_mark && !line && b.present && !a.groupby.empty() && b.groupby.empty();
        const std::string base = step.component.name + "/mark/";

        std::optional<Rendered> from_initial;
        if (is_mark && step.change.data.enter_from_initial && a.present && a.mark)
        {
            ComponentState x = a;
            x.rows = b.rows;
            x.key_fields = b.key_fields;
            from_initial.emplace(render_component(x));
        }

        for (const auto& e : ra.elements)
        {
            const StaggerWindow w = window(e.id);
            const SceneElement* f = rb.find(e.id);
            if (crossfade && crossfade_role(e.role))
            {
                const double mid = 0.5 * (w.start + w.end);
                add(e, {w.start, mid, e.attrs, faded(e.attrs), ease, SegmentRole::exit});
                if (f != nullptr)
                {
                    add(*f, {mid, w.end, faded(f->attrs), f->attrs, ease, SegmentRole::enter});
                }
                continue;
            }
            if (f != nullptr)
            {
                add(e, {w.start, w.end, e.attrs, f->attrs, ease, SegmentRole::update});
                continue;
            }
            Attrs to = faded(e.attrs);
            if (aggregating)
            {
                if (const SceneElement* g = rb.find(base + row_key(e.datum, b.groupby, 0)))
                {
                    to = g->attrs;
                }
            }
            add(e, {w.start, w.end, e.attrs, std::move(to), ease, SegmentRole::exit});
        }
        for (const auto& f : rb.elements)
        {
            if (ra.find(f.id) != nullptr)
            {
                continue;
            }
            const StaggerWindow w = window(f.id);
            double t0 = w.start;
            if (crossfade && crossfade_role(f.role))
            {
                t0 = 0.5 * (w.start + w.end);
            }
            Attrs from = faded(f.attrs);
            if (disaggregating)
            {
                if (const SceneElement* g = ra.find(base + row_key(f.datum, a.groupby, 0)))
                {
                    from = g->attrs;
                }
            }
            else if (from_initial)
            {
                if (const SceneElement* g = from_initial->find(f.id))
                {
                    from = g->attrs;
                }
            }
            add(f, {t0, w.end, std::move(from), f.attrs, ease, SegmentRole::enter});
        }
    }

    const ChartSpec& start_;
    const ChartSpec& end_;
    const TransitionSpec& spec_;
    AnimationPlan plan_;
};

}  // namespace

AnimationPlan compile_plan(const ChartSpec& start, const ChartSpec& end, const TransitionSpec& spec)
{
    const auto diagnostics = validate_transition(spec, start, end);
    if (!diagnostics.empty())
    {
        const Diagnostic& d = diagnostics.front();
        throw Error(ErrorCode::schedule, d.code + " at " + d.path + ": " + d.message);
    }
    return Compiler(start, end, spec).run();
}

std::map<std::string, Attrs> sample_plan(const AnimationPlan& plan, double t)
{
    std::map<std::string, Attrs> out;
    for (const auto& [id, track] : plan.tracks)
    {
        if (track.segments.empty())
        {
            continue;
        }
        const Segment* cur = nullptr;
        for (const auto& seg : track.segments)
        {
            if (seg.t0 <= t)
            {
                cur = &seg;
            }
            else
            {
                break;
            }
        }
        if (cur == nullptr)
        {
            const Segment& first = track.segments.front();
            if (first.role != SegmentRole::enter)
            {
                out.emplace(id, first.from);
            }
            continue;
        }
        if (t >= cur->t1)
        {
            if (cur->role != SegmentRole::exit)
            {
                out.emplace(id, cur->to);
            }
            continue;
        }
        if (cur->role == SegmentRole::enter && t <= cur->t0)
        {
            continue;
        }
        const double u = (t - cur->t0) / (cur->t1 - cur->t0);
        out.emplace(id, interpolate_attrs(cur->from, cur->to, ease_value(cur->ease, u)));
    }
    return out;
}

// ---------------------------------------------------------------------------------------------------
// Serialization

json plan_to_json(const AnimationPlan& plan)
{
    json tracks = json::object();
    for (const auto& [id, track] : plan.tracks)
    {
        json segs = json::array();
        for (const auto& s : track.segments)
        {
            segs.push_back(json{{"t0", s.t0},
                                {"t1", s.t1},
                                {"from", attrs_to_json(s.from)},
                                {"to", attrs_to_json(s.to)},
                                {"ease", ease_name(s.ease)},
                                {"role", segment_role_name(s.role)}});
        }
        tracks[id] = json{{"role", track.role}, {"segments", std::move(segs)}};
    }
    json schedule = json::array();
    for (const auto& s : plan.schedule)
    {
        schedule.push_back(json{{"component", s.component},
                                {"path", s.path},
                                {"start", s.start_ms},
                                {"end", s.end_ms},
                                {"delay", s.delay_ms},
                                {"duration", s.duration_ms}});
    }
    return json{{"version", plan_schema_version},
                {"totalDuration", plan.total_duration},
                {"tracks", std::move(tracks)},
                {"schedule", std::move(schedule)},
                {"warnings", plan.warnings}};
}

AnimationPlan plan_from_json(const json& doc)
{
    json_util::check_version(doc, plan_schema_version);
    AnimationPlan plan;
    try
    {
        plan.total_duration = json_util::require_number(doc, "totalDuration");
        for (const auto& [id, t] : json_util::require(doc, "tracks").items())
        {
            Track track;
            track.role = json_util::get_string(t, "role", "");
            for (const auto& s : json_util::get_array(t, "segments"))
            {
                Segment seg;
                seg.t0 = json_util::require_number(s, "t0");
                seg.t1 = json_util::require_number(s, "t1");
                seg.from = attrs_from_json(json_util::require(s, "from"));
                seg.to = attrs_from_json(json_util::require(s, "to"));
                const auto ease = ease_from_name(json_util::get_string(s, "ease", "linear"));
                if (!ease)
                {
                    throw Error(ErrorCode::unknown_ease, "unknown ease in track '" + id + "'");
                }
                seg.ease = *ease;
                seg.role = segment_role_from_name(json_util::get_string(s, "role", "update"));
                track.segments.push_back(std::move(seg));
            }
            plan.tracks.emplace(id, std::move(track));
        }
        for (const auto& s : json_util::get_array(doc, "schedule"))
        {
            plan.schedule.push_back({json_util::get_string(s, "component", ""), json_util::get_string(s, "path", ""),
                                     s.value("start", std::int64_t{0}), s.value("end", std::int64_t{0}),
                                     s.value("delay", std::int64_t{0}), s.value("duration", std::int64_t{0})});
        }
        plan.warnings = json_util::get_string_list(doc, "warnings");
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::invalid_value, std::string("malformed plan: ") + e.what());
    }
    return plan;
}

std::string serialize_plan(const AnimationPlan& plan) { return plan_to_json(plan).dump() + "\n"; }

AnimationPlan parse_plan(std::string_view text) { return plan_from_json(json_util::parse_document(text)); }

}  // namespace stagecraft
