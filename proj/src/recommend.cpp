#include "stagecraft/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "stagecraft/error.hpp"
#include "stagecraft/json_util.hpp"
#include "stagecraft/scale.hpp"
#include "stagecraft/scene.hpp"

namespace stagecraft
{

using nlohmann::json;

// ---------------------------------------------------------------------------------------------------
// Cost model

CapacityParams capacity_preset(std::string_view name)
{
    if (name == "initial")
    {
        return {0.8, 800.0, 300.0, 0.2};
    }
    if (name == "tuned")
    {
        return {1.4, 1200.0, 300.0, 0.0};
    }
    throw Error(ErrorCode::invalid_value, "unknown capacity preset '" + std::string(name) + "'");
}

double capacity(double t_ms, const CapacityParams& p)
{
    // (ceiling + intercept + intercept * e) / (1 + e) rounds to the nearest double at the midpoint,
    // where intercept + ceiling / 2 does not.
    const double e = std::exp(-(t_ms - p.midpoint_ms) / p.slope_ms);
    if (std::isinf(e))
    {
        return p.intercept;
    }
    return (p.ceiling + p.intercept + p.intercept * e) / (1.0 + e);
}

CostModel default_cost_model(std::string_view preset)
{
    CostModel m;
    m.weights = {{"view", 0.2},  {"signal", 0.2}, {"encode", 0.3},      {"markType", 0.35},
                 {"scale", 0.4}, {"guide", 0.3},  {"data.filter", 0.65}, {"data.aggregate", 0.7}};
    m.capacity = capacity_preset(preset);
    return m;
}

void validate_cost_model(const CostModel& m)
{
    for (const auto& [k, w] : m.weights)
    {
        if (!(w > 0.0))
        {
            throw Error(ErrorCode::invalid_value, "weight '" + k + "' must be positive");
        }
    }
    for (const char* k : {"view", "signal", "encode", "markType", "scale", "guide", "data.filter", "data.aggregate"})
    {
        if (!m.weights.contains(k))
        {
            throw Error(ErrorCode::invalid_value, std::string("cost model has no weight for '") + k + "'");
        }
    }
    if (!(m.weights.at("markType") < m.weights.at("data.filter") && m.weights.at("markType") < m.weights.at("data.aggregate")))
    {
        throw Error(ErrorCode::invalid_value, "markType weight must be below both data weights");
    }
    if (!(m.capacity.ceiling > 0.0) || !(m.capacity.slope_ms > 0.0))
    {
        throw Error(ErrorCode::invalid_value, "capacity ceiling and slope must be positive");
    }
    if (!(m.discount < 0.0) || !(m.penalty > 0.0))
    {
        throw Error(ErrorCode::invalid_value, "bundling discount must be negative and penalty positive");
    }
}

namespace
{

CapacityParams capacity_from_json(const json& j)
{
    return {json_util::require_number(j, "ceiling"), json_util::require_number(j, "midpointMs"),
            json_util::require_number(j, "slopeMs"), json_util::get_number(j, "intercept", 0.0)};
}

json capacity_to_json(const CapacityParams& p)
{
    return json{{"ceiling", p.ceiling}, {"midpointMs", p.midpoint_ms}, {"slopeMs", p.slope_ms}, {"intercept", p.intercept}};
}

}  // namespace

CostModel cost_model_from_json(const json& doc, std::string_view preset)
{
    json_util::check_version(doc, cost_model_schema_version);
    CostModel m = default_cost_model(preset == "initial" ? "initial" : "tuned");
    try
    {
        if (doc.contains("weights"))
        {
            m.weights.clear();
            for (const auto& [k, v] : doc.at("weights").items())
            {
                m.weights[k] = v.get<double>();
            }
        }
        if (const auto it = doc.find("capacity"); it != doc.end())
        {
            const auto p = it->find(std::string(preset));
            if (p != it->end())
            {
                m.capacity = capacity_from_json(*p);
            }
            else
            {
                m.capacity = capacity_preset(preset);
            }
        }
        else
        {
            m.capacity = capacity_preset(preset);
        }
        if (const auto it = doc.find("bundling"); it != doc.end())
        {
            m.discount = json_util::get_number(*it, "discount", m.discount);
            m.penalty = json_util::get_number(*it, "penalty", m.penalty);
        }
    }
    catch (const json::exception& e)
    {
        throw Error(ErrorCode::invalid_value, std::string("malformed cost model: ") + e.what());
    }
    validate_cost_model(m);
    return m;
}

CostModel parse_cost_model(std::string_view text, std::string_view preset)
{
    return cost_model_from_json(json_util::parse_document(text), preset);
}

json cost_model_to_json(const CostModel& m, std::string_view preset_name)
{
    return json{{"version", cost_model_schema_version},
                {"weights", m.weights},
                {"capacity", {{std::string(preset_name), capacity_to_json(m.capacity)}}},
                {"bundling", {{"discount", m.discount}, {"penalty", m.penalty}}}};
}

// ---------------------------------------------------------------------------------------------------
// Complexity

std::string weight_key(const AtomicChange& c)
{
    if (c.component.kind == ComponentKind::view)
    {
        return "view";
    }
    if (c.kind.starts_with("signal."))
    {
        return "signal";
    }
    if (c.component.kind != ComponentKind::mark)
    {
        return "guide";
    }
    if (c.kind == "data")
    {
        return c.detail == "aggregate" ? "data.aggregate" : "data.filter";
    }
    if (c.kind.starts_with("encode"))
    {
        return "encode";
    }
    if (c.kind == "markType")
    {
        return "markType";
    }
    if (c.kind.starts_with("scale."))
    {
        return "scale";
    }
    throw Error(ErrorCode::invalid_value, "no weight for change kind '" + c.kind + "'");
}

double stage_cost(const Stage& stage, const CostModel& model)
{
    double w = 0.0;
    for (const auto& c : stage)
    {
        const auto key = weight_key(c);
        const auto it = model.weights.find(key);
        if (it == model.weights.end())
        {
            throw Error(ErrorCode::invalid_value, "cost model has no weight for '" + key + "'");
        }
        w += it->second;
    }
    return w;
}

namespace
{

std::string scale_channel(const AtomicChange& c) { return c.kind.starts_with("scale.") ? c.kind.substr(6) : std::string{}; }

// x or y for a spatial channel, empty otherwise.
std::string axis_of(const std::string& ch)
{
    if (ch == "x" || ch == "x2" || ch == "width") return "x";
    if (ch == "y" || ch == "y2" || ch == "height") return "y";
    return {};
}

bool is_mark_scale(const AtomicChange& c) { return c.component.kind == ComponentKind::mark && c.kind.starts_with("scale."); }

}  // namespace

std::vector<BundlingMatch> bundling_matches(const Stage& stage, const CostModel& model)
{
    std::vector<BundlingMatch> out;
    std::map<std::string, std::vector<const AtomicChange*>> mark_scales;
    for (const auto& c : stage)
    {
        if (!is_mark_scale(c))
        {
            continue;
        }
        mark_scales[c.component.name].push_back(&c);
        const std::string ch = scale_channel(c);
        const std::string label = component_label(c.component);

        if (c.dimension == DomainDimension::different)
        {
            const bool encoded = std::any_of(stage.begin(), stage.end(), [&](const AtomicChange& o) {
                return o.component == c.component && o.kind == "encode." + ch;
            });
            if (!encoded)
            {
                out.push_back({"dimension-without-encoding", model.penalty, label + " " + c.kind});
            }
        }

        const std::string orient = axis_of(ch);
        for (const auto& o : stage)
        {
            if (o.scale_name != c.scale_name || !o.kind.starts_with("scale."))
            {
                continue;
            }
            if (!orient.empty() && o.component.kind == ComponentKind::axis && o.kind == "scale." + orient)
            {
                out.push_back({"mark-with-axis", model.discount, label + " " + c.kind + " + " + component_label(o.component)});
            }
            if (orient.empty() && o.component.kind == ComponentKind::legend)
            {
                out.push_back({"mark-with-legend", model.discount, label + " " + c.kind + " + " + component_label(o.component)});
            }
        }
    }
    for (const auto& [mark, list] : mark_scales)
    {
        const AtomicChange* x = nullptr;
        const AtomicChange* y = nullptr;
        std::size_t non_spatial = 0;
        for (const auto* c : list)
        {
            const std::string orient = axis_of(scale_channel(*c));
            if (orient == "x" && x == nullptr) x = c;
            else if (orient == "y" && y == nullptr) y = c;
            else if (orient.empty()) ++non_spatial;
        }
        if (x != nullptr && y != nullptr && x->dimension != DomainDimension::different && y->dimension != DomainDimension::different)
        {
            out.push_back({"x-with-y", model.discount, "mark:" + mark});
        }
        if (non_spatial >= 2)
        {
            out.push_back({"non-spatial-together", model.discount, "mark:" + mark});
        }
    }
    return out;
}

double bundling_adjustment(const Stage& stage, const CostModel& model)
{
    double b = 0.0;
    for (const auto& m : bundling_matches(stage, model))
    {
        b += m.effect;
    }
    return b;
}

double complexity(const std::vector<Stage>& stages, const std::vector<double>& durations_ms, const CostModel& model)
{
    double total = 0.0;
    for (std::size_t i = 0; i < stages.size(); ++i)
    {
        const double v = stage_cost(stages[i], model) - capacity(durations_ms.at(i), model.capacity) +
                         bundling_adjustment(stages[i], model);
        total += std::max(0.0, v);
    }
    return total;
}

std::vector<std::int64_t> stage_durations(std::int64_t total_ms, std::size_t n)
{
    std::vector<std::int64_t> out(n, total_ms / static_cast<std::int64_t>(n));
    out.back() = total_ms - out.front() * static_cast<std::int64_t>(n - 1);
    return out;
}

// ---------------------------------------------------------------------------------------------------
// Enumeration

std::vector<Assignment> enumerate_component_sequences(std::size_t k, std::size_t n)
{
    if (n == 0)
    {
        throw Error(ErrorCode::invalid_value, "stage count must be at least 1");
    }
    std::vector<Assignment> out;
    Assignment a(k, 0);
    while (true)
    {
        out.push_back(a);
        std::size_t i = k;
        while (i > 0)
        {
            --i;
            if (++a[i] < n)
            {
                break;
            }
            a[i] = 0;
            if (i == 0)
            {
                return out;
            }
        }
        if (k == 0)
        {
            return out;
        }
    }
}

std::vector<Violation> check_constraints(const ComponentState& state)
{
    std::vector<Violation> out;
    const std::string label = component_label(state.ref);
    if (!state.present)
    {
        return out;
    }
    if (state.axis && !state.scales.contains(state.axis->scale))
    {
        out.push_back({"Unavailable Scale", label, "scale '" + state.axis->scale + "'"});
    }
    if (state.legend && !state.scales.contains(state.legend->scale))
    {
        out.push_back({"Unavailable Scale", label, "scale '" + state.legend->scale + "'"});
    }
    if (!state.mark)
    {
        return out;
    }
    const MarkDef& m = *state.mark;
    bool scales_ok = true;
    for (const auto& [ch, enc] : m.encodings)
    {
        if (!channel_allowed(m.type, ch))
        {
            out.push_back({"Unavailable Encoding", label, "channel '" + ch + "' on " + mark_type_name(m.type)});
        }
        if (enc.is_constant())
        {
            continue;
        }
        if (!enc.scale.empty() && !state.scales.contains(enc.scale))
        {
            out.push_back({"Unavailable Scale", label, "channel '" + ch + "' uses scale '" + enc.scale + "'"});
            scales_ok = false;
        }
        if (!state.rows.empty() && !state.rows.front().row.contains(enc.field))
        {
            out.push_back({"Unavailable Data Field", label, "channel '" + ch + "' uses field '" + enc.field + "'"});
            scales_ok = false;
        }
    }
    if (m.type == MarkType::rect)
    {
        auto band = [&](const char* ch) {
            const auto it = m.encodings.find(ch);
            if (it == m.encodings.end() || it->second.is_constant())
            {
                return false;
            }
            const auto s = state.scales.find(it->second.scale);
            return s != state.scales.end() && s->second.kind == ScaleKind::band;
        };
        if (!m.encodings.contains("x2") && !m.encodings.contains("width") && !band("x"))
        {
            out.push_back({"Unavailable Encoding", label, "rect has no horizontal extent"});
        }
        if (!m.encodings.contains("y2") && !m.encodings.contains("height") && !band("y"))
        {
            out.push_back({"Unavailable Encoding", label, "rect has no vertical extent"});
        }
    }
    if (scales_ok)
    {
        for (const auto& line : overflow_report(state))
        {
            out.push_back({"Overflow", label, line});
        }
    }
    return out;
}

PruneResult prune_sequences(const ComponentRef& component, const std::vector<AtomicChange>& changes, std::size_t n,
                            const ChartSpec& start, const ChartSpec& end, const MarkKeys& keys)
{
    PruneResult result;
    const auto all = enumerate_component_sequences(changes.size(), n);
    result.raw = all.size();
    const ComponentState initial = component_state(start, component, keys.start);
    const ComponentState target = component_state(end, component, keys.end);
    for (const auto& a : all)
    {
        ComponentState state = initial;
        std::optional<std::string> why;
        for (std::size_t s = 0; s + 1 < n && !why; ++s)
        {
            std::vector<AtomicChange> subset;
            for (std::size_t i = 0; i < changes.size(); ++i)
            {
                if (a[i] == s)
                {
                    subset.push_back(changes[i]);
                }
            }
            if (subset.empty())
            {
                continue;
            }
            try
            {
                state = apply_change(state, target, change_spec_for(subset, component.kind), end);
                const auto v = check_constraints(state);
                if (!v.empty())
                {
                    why = v.front().rule + " after stage " + std::to_string(s + 1) + ": " + v.front().detail;
                }
            }
            catch (const Error& e)
            {
                why = std::string("stage ") + std::to_string(s + 1) + ": " + e.what();
            }
        }
        if (why)
        {
            ++result.pruned;
            std::string seq;
            for (std::size_t s = 0; s < n; ++s)
            {
                seq += s == 0 ? "[{" : ", {";
                bool first = true;
                for (std::size_t i = 0; i < changes.size(); ++i)
                {
                    if (a[i] == s)
                    {
                        seq += (first ? "" : ", ") + changes[i].kind;
                        first = false;
                    }
                }
                seq += "}";
            }
            result.explanations.push_back(component_label(component) + " " + seq + "]: " + *why);
        }
        else
        {
            result.surviving.push_back(a);
        }
    }
    return result;
}

std::vector<std::vector<std::size_t>> combine_candidates(const std::vector<std::vector<Assignment>>& per_component,
                                                         std::size_t n)
{
    std::vector<std::vector<std::size_t>> out;
    if (per_component.empty())
    {
        return out;
    }
    // Stage-usage bitmask of every surviving assignment.
    std::vector<std::vector<std::uint32_t>> masks(per_component.size());
    for (std::size_t c = 0; c < per_component.size(); ++c)
    {
        if (per_component[c].empty())
        {
            return out;
        }
        for (const auto& a : per_component[c])
        {
            std::uint32_t m = 0;
            for (auto s : a)
            {
                m |= 1u << s;
            }
            masks[c].push_back(m);
        }
    }
    const std::uint32_t full = n >= 32 ? ~0u : (1u << n) - 1u;
    std::vector<std::size_t> choice(per_component.size(), 0);
    while (true)
    {
        std::uint32_t m = 0;
        for (std::size_t c = 0; c < choice.size(); ++c)
        {
            m |= masks[c][choice[c]];
        }
        if (m == full)
        {
            out.push_back(choice);
        }
        std::size_t c = choice.size();
        while (true)
        {
            if (c == 0)
            {
                return out;
            }
            --c;
            if (++choice[c] < per_component[c].size())
            {
                break;
            }
            choice[c] = 0;
        }
    }
}

// ---------------------------------------------------------------------------------------------------
// Candidates

TransitionSpec candidate_spec(const std::vector<Stage>& stages, const std::vector<std::int64_t>& durations)
{
    TransitionSpec spec;
    spec.total_duration = static_cast<double>(std::accumulate(durations.begin(), durations.end(), std::int64_t{0}));
    std::map<ComponentRef, std::size_t> last_stage;
    for (std::size_t s = 0; s < stages.size(); ++s)
    {
        for (const auto& c : stages[s])
        {
            last_stage[c.component] = s;
        }
    }
    Concat root;
    for (std::size_t s = 0; s < stages.size(); ++s)
    {
        std::vector<ComponentRef> order;
        for (const auto& c : stages[s])
        {
            if (std::find(order.begin(), order.end(), c.component) == order.end())
            {
                order.push_back(c.component);
            }
        }
        Sync sync;
        for (const auto& ref : order)
        {
            Step step;
            step.component = ref;
            if (last_stage.at(ref) != s)
            {
                std::vector<AtomicChange> subset;
                for (const auto& c : stages[s])
                {
                    if (c.component == ref)
                    {
                        subset.push_back(c);
                    }
                }
                step.change = change_spec_for(subset, ref.kind);
            }
            step.timing.duration = TimeValue::ms(static_cast<double>(durations[s]));
            sync.blocks.push_back(Block{step});
        }
        root.blocks.push_back(Block{std::move(sync)});
    }
    spec.timeline = Block{std::move(root)};
    return spec;
}

namespace
{

std::string stage_signature(const std::vector<Stage>& stages)
{
    std::string out;
    for (std::size_t s = 0; s < stages.size(); ++s)
    {
        if (s > 0)
        {
            out += " | ";
        }
        std::vector<std::string> parts;
        for (const auto& c : stages[s])
        {
            parts.push_back(component_label(c.component) + ":" + c.kind);
        }
        std::sort(parts.begin(), parts.end());
        for (std::size_t i = 0; i < parts.size(); ++i)
        {
            out += (i == 0 ? "" : ", ") + parts[i];
        }
    }
    return out;
}

SizeEffect effect_on(const AtomicChange& c, bool width) { return width ? c.width : c.height; }

void insert_view_steps(std::vector<Stage>& stages, const std::vector<AtomicChange>& view)
{
    for (const auto& v : view)
    {
        const bool width = v.kind == "view.width";
        const SizeEffect effect = effect_on(v, width);
        std::size_t target = effect == SizeEffect::shrinks ? stages.size() - 1 : 0;
        if (effect == SizeEffect::expands)
        {
            for (std::size_t s = 0; s < stages.size(); ++s)
            {
                if (std::any_of(stages[s].begin(), stages[s].end(), [&](const AtomicChange& c) { return effect_on(c, width) == SizeEffect::expands; }))
                {
                    target = s;
                    break;
                }
            }
        }
        else if (effect == SizeEffect::shrinks)
        {
            for (std::size_t s = stages.size(); s-- > 0;)
            {
                if (std::any_of(stages[s].begin(), stages[s].end(), [&](const AtomicChange& c) { return effect_on(c, width) == SizeEffect::shrinks; }))
                {
                    target = s;
                    break;
                }
            }
        }
        stages[target].push_back(v);
    }
}

double weight_sum(const CostModel& model)
{
    double s = 0.0;
    for (const auto& [k, w] : model.weights)
    {
        s += w;
    }
    return s;
}

}  // namespace

Recommendation recommend(const ChartSpec& start, const ChartSpec& end, const RecommendOptions& options)
{
    if (options.max_stages < 1 || options.max_stages > 4)
    {
        throw Error(ErrorCode::invalid_value, "stage count must be within [1, 4]");
    }
    if (options.total_ms <= 0)
    {
        throw Error(ErrorCode::invalid_value, "total duration must be positive");
    }
    validate_cost_model(options.model);

    Recommendation rec;
    rec.changes = detect_changes(start, end, options.detect);
    if (rec.changes.empty())
    {
        rec.warnings.push_back("start and end charts are identical; nothing to animate");
        return rec;
    }

    // Guides enumerate only their scale changes; the rest follow the guide's last scale stage.
    std::vector<AtomicChange> view;
    std::vector<ComponentChanges> components;
    std::vector<std::vector<AtomicChange>> riders;
    std::vector<AtomicChange> last_stage_riders;
    for (const auto& cc : rec.changes.components)
    {
        if (cc.component.kind == ComponentKind::view)
        {
            view = cc.changes;
            continue;
        }
        ComponentChanges enumerated{cc.component, {}};
        std::vector<AtomicChange> rest;
        for (const auto& c : cc.changes)
        {
            const bool guide = cc.component.kind != ComponentKind::mark;
            (guide && !c.kind.starts_with("scale.") ? rest : enumerated.changes).push_back(c);
        }
        if (enumerated.changes.empty())
        {
            last_stage_riders.insert(last_stage_riders.end(), rest.begin(), rest.end());
            continue;
        }
        components.push_back(std::move(enumerated));
        riders.push_back(std::move(rest));
    }

    auto keys_for = [&](const ComponentRef& ref) -> MarkKeys {
        if (ref.kind != ComponentKind::mark)
        {
            return {};
        }
        return resolve_join_keys(start, end, ref.name, {});
    };

    const double unit = 1e-9 * weight_sum(options.model);
    struct Ranked
    {
        long long key;
        Candidate candidate;
    };
    std::vector<Ranked> ranked;

    for (std::size_t n = 1; n <= options.max_stages; ++n)
    {
        StageCountReport report;
        report.stages = n;
        std::vector<std::vector<Assignment>> surviving;
        double raw_total = 1.0;
        for (const auto& cc : components)
        {
            PruneResult pr = prune_sequences(cc.component, cc.changes, n, start, end, keys_for(cc.component));
            raw_total *= static_cast<double>(pr.raw);
            report.components.push_back({cc.component, cc.changes.size(), pr.raw, pr.pruned, pr.surviving.size(), pr.explanations});
            surviving.push_back(std::move(pr.surviving));
        }
        if (raw_total > 1e5)
        {
            rec.warnings.push_back(std::to_string(n) + " stages: " + format_number(raw_total) +
                                   " raw candidates; enumeration may be slow");
        }
        std::vector<std::vector<std::size_t>> combos;
        if (components.empty())
        {
            if (n == 1)
            {
                combos.push_back({});
            }
        }
        else
        {
            combos = combine_candidates(surviving, n);
        }
        report.combined = combos.size();

        const auto durations = stage_durations(options.total_ms, n);
        std::vector<double> dms(durations.begin(), durations.end());
        for (const auto& combo : combos)
        {
            Candidate c;
            c.stages.assign(n, {});
            for (std::size_t k = 0; k < components.size(); ++k)
            {
                const Assignment& a = surviving[k][combo[k]];
                for (std::size_t i = 0; i < a.size(); ++i)
                {
                    c.stages[a[i]].push_back(components[k].changes[i]);
                }
                const std::size_t last = *std::max_element(a.begin(), a.end());
                c.stages[last].insert(c.stages[last].end(), riders[k].begin(), riders[k].end());
            }
            c.stages.back().insert(c.stages.back().end(), last_stage_riders.begin(), last_stage_riders.end());
            insert_view_steps(c.stages, view);
            c.durations = durations;
            c.score = complexity(c.stages, dms, options.model);
            c.signature = stage_signature(c.stages);
            ranked.push_back({std::llround(c.score / unit), std::move(c)});
        }
        rec.enumeration.push_back(std::move(report));
    }

    std::sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
        if (a.key != b.key) return a.key < b.key;
        if (a.candidate.stages.size() != b.candidate.stages.size()) return a.candidate.stages.size() < b.candidate.stages.size();
        return a.candidate.signature < b.candidate.signature;
    });
    rec.candidates.reserve(ranked.size());
    for (std::size_t i = 0; i < ranked.size(); ++i)
    {
        Candidate& c = ranked[i].candidate;
        if (i < options.top)
        {
            c.spec = candidate_spec(c.stages, c.durations);
        }
        rec.candidates.push_back(std::move(c));
    }
    if (rec.candidates.empty())
    {
        rec.warnings.push_back("every enumerated sequence was pruned");
    }
    return rec;
}

json recommendation_to_json(const Recommendation& rec, std::size_t top)
{
    json enumeration = json::array();
    std::size_t raw = 0;
    std::size_t pruned = 0;
    for (const auto& r : rec.enumeration)
    {
        json comps = json::array();
        for (const auto& c : r.components)
        {
            raw += c.raw;
            pruned += c.pruned;
            comps.push_back(json{{"component", component_label(c.component)},
                                 {"changes", c.changes},
                                 {"raw", c.raw},
                                 {"pruned", c.pruned},
                                 {"surviving", c.surviving},
                                 {"explanations", c.explanations}});
        }
        enumeration.push_back(json{{"stages", r.stages}, {"components", comps}, {"combined", r.combined}});
    }
    json candidates = json::array();
    for (std::size_t i = 0; i < rec.candidates.size() && i < top; ++i)
    {
        const Candidate& c = rec.candidates[i];
        json stages = json::array();
        for (const auto& s : c.stages)
        {
            json list = json::array();
            for (const auto& a : s)
            {
                list.push_back(component_label(a.component) + ":" + a.kind);
            }
            stages.push_back(std::move(list));
        }
        candidates.push_back(json{{"rank", i + 1},
                                  {"score", c.score},
                                  {"stages", stages},
                                  {"durations", c.durations},
                                  {"spec", transition_to_json(c.spec)}});
    }
    return json{{"changes", changes_to_json(rec.changes)},
                {"enumeration", enumeration},
                {"counts", {{"raw", raw}, {"pruned", pruned}, {"final", rec.candidates.size()}}},
                {"candidates", candidates},
                {"warnings", rec.warnings}};
}

}  // namespace stagecraft
