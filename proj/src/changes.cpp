#include "stagecraft/changes.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "stagecraft/error.hpp"
#include "stagecraft/scale.hpp"

namespace stagecraft
{

using nlohmann::json;

// ---------------------------------------------------------------------------------------------------
// Joins

JoinResult join_keyed(const std::vector<KeyedRow>& start, const std::vector<KeyedRow>& end)
{
    JoinResult out;
    std::unordered_map<std::string, const KeyedRow*> by_key;
    for (const auto& kr : end)
    {
        by_key.emplace(kr.key, &kr);
    }
    std::set<std::string> matched;
    for (const auto& kr : start)
    {
        const auto it = by_key.find(kr.key);
        if (it == by_key.end())
        {
            out.exit.push_back(kr);
        }
        else
        {
            out.update.emplace_back(kr, *it->second);
            matched.insert(kr.key);
        }
    }
    for (const auto& kr : end)
    {
        if (!matched.contains(kr.key))
        {
            out.enter.push_back(kr);
        }
    }
    return out;
}

JoinResult join_data(const std::vector<Row>& start, const std::vector<Row>& end, const std::vector<std::string>& key_fields)
{
    JoinResult out = join_keyed(key_rows(start, key_fields), key_rows(end, key_fields));
    out.key_fields = key_fields;
    return out;
}

std::vector<std::size_t> join_aggregate(const std::vector<Row>& raw, const std::vector<Row>& agg,
                                        const std::vector<std::string>& groupby)
{
    std::unordered_map<std::string, std::size_t> groups;
    for (std::size_t i = 0; i < agg.size(); ++i)
    {
        groups.emplace(row_key(agg[i], groupby, i), i);
    }
    std::vector<std::size_t> out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
    {
        const std::string key = row_key(raw[i], groupby, i);
        const auto it = groups.find(key);
        if (it == groups.end())
        {
            throw Error(ErrorCode::invalid_value, "raw row " + std::to_string(i) + " has no aggregate group '" + key + "'");
        }
        out.push_back(it->second);
    }
    return out;
}

MarkKeys resolve_join_keys(const ChartSpec& start, const ChartSpec& end, const std::string& mark,
                           const std::vector<std::string>& user_keys)
{
    const MarkDef* ms = start.find_mark(mark);
    const MarkDef* me = end.find_mark(mark);
    const std::vector<std::string> gs = ms != nullptr ? grouping_fields(*start.find_dataset(ms->dataset)) : std::vector<std::string>{};
    const std::vector<std::string> ge = me != nullptr ? grouping_fields(*end.find_dataset(me->dataset)) : std::vector<std::string>{};

    if (!gs.empty() && !ge.empty())
    {
        std::vector<std::string> shared;
        for (const auto& f : ge)
        {
            if (std::find(gs.begin(), gs.end(), f) != gs.end())
            {
                shared.push_back(f);
            }
        }
        if (!shared.empty())
        {
            return {shared, shared};
        }
    }

    auto fallback = [&](const MarkDef* m) -> std::vector<std::string> {
        if (!user_keys.empty())
        {
            return user_keys;
        }
        if (m != nullptr && m->type == MarkType::line)
        {
            return line_key_fields(*m);
        }
        return {};
    };
    MarkKeys keys{fallback(ms), fallback(me)};
    if (gs.empty() != ge.empty())
    {
        if (!gs.empty())
        {
            keys.start = gs;
        }
        else
        {
            keys.end = ge;
        }
    }
    return keys;
}

// ---------------------------------------------------------------------------------------------------
// Change detection

const char* size_effect_name(SizeEffect e)
{
    switch (e)
    {
        case SizeEffect::neutral: return "neutral";
        case SizeEffect::expands: return "expands";
        case SizeEffect::shrinks: return "shrinks";
    }
    return "neutral";
}

std::size_t ChangeSet::count() const
{
    std::size_t n = 0;
    for (const auto& c : components)
    {
        n += c.changes.size();
    }
    return n;
}

const std::vector<AtomicChange>* ChangeSet::find(const ComponentRef& ref) const
{
    for (const auto& c : components)
    {
        if (c.component == ref)
        {
            return &c.changes;
        }
    }
    return nullptr;
}

std::string scale_field(const ChartSpec& chart, const std::string& scale)
{
    const ScaleDef* s = chart.find_scale(scale);
    if (s == nullptr)
    {
        return {};
    }
    if (s->domain_source)
    {
        return s->domain_source->field;
    }
    for (const auto& m : chart.marks)
    {
        for (const auto& ch : all_channels())
        {
            const auto it = m.encodings.find(ch);
            if (it != m.encodings.end() && !it->second.is_constant() && it->second.scale == scale)
            {
                return it->second.field;
            }
        }
    }
    return {};
}

DomainDimension scale_change_dimension(const ScaleDef& a, const std::string& field_a, const ScaleDef& b,
                                       const std::string& field_b)
{
    if (is_continuous(a.kind) != is_continuous(b.kind))
    {
        return DomainDimension::different;
    }
    if (!field_a.empty() && !field_b.empty() && field_a != field_b)
    {
        return DomainDimension::different;
    }
    return DomainDimension::same;
}

namespace
{

SizeEffect extent_effect(const ScaleDef* a, const ScaleDef* b)
{
    if (a == nullptr || b == nullptr || !(is_continuous(a->kind) || a->kind == ScaleKind::band || a->kind == ScaleKind::point))
    {
        return SizeEffect::neutral;
    }
    const double ea = std::abs(a->pixel_range.second - a->pixel_range.first);
    const double eb = std::abs(b->pixel_range.second - b->pixel_range.first);
    if (eb > ea) return SizeEffect::expands;
    if (eb < ea) return SizeEffect::shrinks;
    return SizeEffect::neutral;
}

SizeEffect value_effect(double a, double b)
{
    if (b > a) return SizeEffect::expands;
    if (b < a) return SizeEffect::shrinks;
    return SizeEffect::neutral;
}

bool horizontal_channel(std::string_view ch) { return ch == "x" || ch == "x2" || ch == "width"; }
bool vertical_channel(std::string_view ch) { return ch == "y" || ch == "y2" || ch == "height"; }

json scale_payload(const ScaleDef* s) { return s != nullptr ? scale_def_to_json(*s) : json(nullptr); }

class Detector
{
public:
    Detector(const ChartSpec& start, const ChartSpec& end, const DetectOptions& options)
        : start_(start), end_(end), options_(options)
    {
    }

    ChangeSet run()
    {
        ChangeSet set;
        for (const auto& ref : component_order())
        {
            std::vector<AtomicChange> changes;
            switch (ref.kind)
            {
                case ComponentKind::view: view(ref, changes); break;
                case ComponentKind::mark: mark(ref, changes); break;
                case ComponentKind::axis: axis(ref, changes); break;
                case ComponentKind::legend: legend(ref, changes); break;
                case ComponentKind::pause: break;
            }
            if (!changes.empty())
            {
                set.components.push_back({ref, std::move(changes)});
            }
        }
        return set;
    }

private:
    std::vector<ComponentRef> component_order() const
    {
        std::vector<ComponentRef> refs;
        const auto a = chart_components(start_);
        const auto b = chart_components(end_);
        for (ComponentKind kind : {ComponentKind::view, ComponentKind::mark, ComponentKind::axis, ComponentKind::legend})
        {
            for (const auto* list : {&a, &b})
            {
                for (const auto& r : *list)
                {
                    if (r.kind == kind && std::find(refs.begin(), refs.end(), r) == refs.end())
                    {
                        refs.push_back(r);
                    }
                }
            }
        }
        return refs;
    }

    AtomicChange make(const ComponentRef& ref, std::string kind) const
    {
        AtomicChange c;
        c.component = ref;
        c.kind = std::move(kind);
        return c;
    }

    DomainDimension dimension(const std::string& name_a, const std::string& name_b) const
    {
        const auto it = options_.dimensions.find(name_b);
        if (it != options_.dimensions.end())
        {
            return it->second;
        }
        const ScaleDef* a = start_.find_scale(name_a);
        const ScaleDef* b = end_.find_scale(name_b);
        if (a == nullptr || b == nullptr)
        {
            return DomainDimension::same;
        }
        return scale_change_dimension(*a, scale_field(start_, name_a), *b, scale_field(end_, name_b));
    }

    void view(const ComponentRef& ref, std::vector<AtomicChange>& out) const
    {
        if (start_.width != end_.width)
        {
            AtomicChange c = make(ref, "view.width");
            c.initial = start_.width;
            c.final = end_.width;
            c.width = value_effect(start_.width, end_.width);
            out.push_back(std::move(c));
        }
        if (start_.height != end_.height)
        {
            AtomicChange c = make(ref, "view.height");
            c.initial = start_.height;
            c.final = end_.height;
            c.height = value_effect(start_.height, end_.height);
            out.push_back(std::move(c));
        }
    }

    void signal_changes(const ComponentRef& ref, std::vector<AtomicChange>& out) const
    {
        std::set<std::string> names;
        for (const auto& s : signals_used(ref, start_)) names.insert(s);
        for (const auto& s : signals_used(ref, end_)) names.insert(s);
        const auto a = start_.signals();
        const auto b = end_.signals();
        for (const auto& n : names)
        {
            if (a.at(n) != b.at(n))
            {
                AtomicChange c = make(ref, "signal." + n);
                c.initial = a.at(n);
                c.final = b.at(n);
                (n == "width" ? c.width : c.height) = value_effect(a.at(n), b.at(n));
                out.push_back(std::move(c));
            }
        }
    }

    void scale_change(const ComponentRef& ref, const std::string& kind, const std::string& name_a,
                      const std::string& name_b, std::string_view axis_dim, std::vector<AtomicChange>& out) const
    {
        const ScaleDef* a = start_.find_scale(name_a);
        const ScaleDef* b = end_.find_scale(name_b);
        const bool same = a != nullptr && b != nullptr && name_a == name_b && *a == *b;
        if (same)
        {
            return;
        }
        AtomicChange c = make(ref, kind);
        c.scale_name = b != nullptr ? name_b : name_a;
        c.dimension = dimension(name_a, name_b);
        c.initial = scale_payload(a);
        c.final = scale_payload(b);
        if (axis_dim == "width")
        {
            c.width = extent_effect(a, b);
        }
        else if (axis_dim == "height")
        {
            c.height = extent_effect(a, b);
        }
        out.push_back(std::move(c));
    }

    void mark(const ComponentRef& ref, std::vector<AtomicChange>& out) const
    {
        const MarkDef* a = start_.find_mark(ref.name);
        const MarkDef* b = end_.find_mark(ref.name);
        if (a == nullptr || b == nullptr)
        {
            AtomicChange c = make(ref, "data");
            c.detail = a == nullptr ? "enter" : "exit";
            c.initial = a != nullptr;
            c.final = b != nullptr;
            out.push_back(std::move(c));
            return;
        }
        const DatasetDef& da = *start_.find_dataset(a->dataset);
        const DatasetDef& db = *end_.find_dataset(b->dataset);
        const auto rows_a = apply_transforms(da);
        const auto rows_b = apply_transforms(db);
        const auto group_a = grouping_fields(da);
        const auto group_b = grouping_fields(db);
        if (rows_a != rows_b || group_a != group_b)
        {
            AtomicChange c = make(ref, "data");
            c.detail = group_a != group_b ? "aggregate" : "filter";
            c.initial = json{{"rows", rows_a.size()}, {"groupby", group_a}};
            c.final = json{{"rows", rows_b.size()}, {"groupby", group_b}};
            out.push_back(std::move(c));
        }

        std::set<std::string> seen_scales;
        for (const auto& ch : all_channels())
        {
            const auto ea = a->encodings.find(ch);
            const auto eb = b->encodings.find(ch);
            const bool bound_a = ea != a->encodings.end() && !ea->second.is_constant() && !ea->second.scale.empty();
            const bool bound_b = eb != b->encodings.end() && !eb->second.is_constant() && !eb->second.scale.empty();
            if (!bound_a && !bound_b)
            {
                continue;
            }
            const std::string name_a = bound_a ? ea->second.scale : eb->second.scale;
            const std::string name_b = bound_b ? eb->second.scale : ea->second.scale;
            if (!seen_scales.insert(name_b).second)
            {
                continue;
            }
            const std::string_view dim = horizontal_channel(ch) ? "width" : vertical_channel(ch) ? "height" : "";
            scale_change(ref, "scale." + ch, name_a, name_b, dim, out);
        }

        for (const auto& ch : all_channels())
        {
            const auto ea = a->encodings.find(ch);
            const auto eb = b->encodings.find(ch);
            const bool has_a = ea != a->encodings.end();
            const bool has_b = eb != b->encodings.end();
            if (has_a != has_b || (has_a && !(ea->second == eb->second)))
            {
                AtomicChange c = make(ref, "encode." + ch);
                c.initial = has_a ? encoding_to_json(ea->second) : json(nullptr);
                c.final = has_b ? encoding_to_json(eb->second) : json(nullptr);
                out.push_back(std::move(c));
            }
        }

        if (a->type != b->type)
        {
            AtomicChange c = make(ref, "markType");
            c.initial = mark_type_name(a->type);
            c.final = mark_type_name(b->type);
            out.push_back(std::move(c));
        }
    }

    template <typename Def>
    void presence(const ComponentRef& ref, const Def* a, const Def* b, std::vector<AtomicChange>& out) const
    {
        AtomicChange c = make(ref, "encode");
        c.detail = a == nullptr ? "enter" : "exit";
        c.initial = a != nullptr;
        c.final = b != nullptr;
        out.push_back(std::move(c));
    }

    void part_change(const ComponentRef& ref, const std::string& part, bool a, bool b, std::vector<AtomicChange>& out) const
    {
        for (const auto& c : out)
        {
            if (c.kind == "encode." + part)
            {
                return;
            }
        }
        AtomicChange c = make(ref, "encode." + part);
        c.initial = a;
        c.final = b;
        out.push_back(std::move(c));
    }

    void axis(const ComponentRef& ref, std::vector<AtomicChange>& out) const
    {
        const AxisDef* a = start_.find_axis(ref.name);
        const AxisDef* b = end_.find_axis(ref.name);
        if (a == nullptr || b == nullptr)
        {
            presence(ref, a, b, out);
            return;
        }
        const bool x = b->orient == AxisOrient::x;
        scale_change(ref, x ? "scale.x" : "scale.y", a->scale, b->scale, x ? "width" : "height", out);
        const AxisParts& pa = a->parts;
        const AxisParts& pb = b->parts;
        if (pa.domain != pb.domain) part_change(ref, "domain", pa.domain, pb.domain, out);
        if (pa.ticks != pb.ticks || a->tick_count != b->tick_count) part_change(ref, "ticks", pa.ticks, pb.ticks, out);
        if (pa.labels != pb.labels) part_change(ref, "labels", pa.labels, pb.labels, out);
        if (pa.grid != pb.grid) part_change(ref, "grid", pa.grid, pb.grid, out);
        if (pa.title != pb.title || a->title != b->title) part_change(ref, "title", pa.title, pb.title, out);
        signal_changes(ref, out);
    }

    void legend(const ComponentRef& ref, std::vector<AtomicChange>& out) const
    {
        const LegendDef* a = start_.find_legend(ref.name);
        const LegendDef* b = end_.find_legend(ref.name);
        if (a == nullptr || b == nullptr)
        {
            presence(ref, a, b, out);
            return;
        }
        scale_change(ref, "scale." + b->channel, a->scale, b->scale, "", out);
        const LegendParts& pa = a->parts;
        const LegendParts& pb = b->parts;
        if (pa.symbols != pb.symbols) part_change(ref, "symbols", pa.symbols, pb.symbols, out);
        if (pa.labels != pb.labels) part_change(ref, "labels", pa.labels, pb.labels, out);
        if (pa.title != pb.title || a->title != b->title) part_change(ref, "title", pa.title, pb.title, out);
        signal_changes(ref, out);
    }

    const ChartSpec& start_;
    const ChartSpec& end_;
    const DetectOptions& options_;
};

}  // namespace

ChangeSet detect_changes(const ChartSpec& start, const ChartSpec& end, const DetectOptions& options)
{
    return Detector(start, end, options).run();
}

json changes_to_json(const ChangeSet& changes)
{
    json out = json::array();
    for (const auto& cc : changes.components)
    {
        json list = json::array();
        for (const auto& c : cc.changes)
        {
            json j{{"kind", c.kind},
                   {"initial", c.initial},
                   {"final", c.final},
                   {"width", size_effect_name(c.width)},
                   {"height", size_effect_name(c.height)}};
            if (!c.detail.empty())
            {
                j["detail"] = c.detail;
            }
            if (!c.scale_name.empty())
            {
                j["scale"] = c.scale_name;
            }
            if (c.dimension)
            {
                j["domainDimension"] = *c.dimension == DomainDimension::same ? "same" : "different";
            }
            list.push_back(std::move(j));
        }
        out.push_back(json{{"component", component_label(cc.component)}, {"changes", list}});
    }
    return out;
}

ChangeSpec change_spec_for(const std::vector<AtomicChange>& subset, ComponentKind kind)
{
    ChangeSpec c;
    c.data.apply = false;
    c.encode.mode = EncodeChange::Mode::channels;
    c.scale.selection.mode = Selection::Mode::list;
    c.signal.mode = Selection::Mode::list;
    c.mark_type = false;
    for (const auto& a : subset)
    {
        const std::string& k = a.kind;
        if (k == "data")
        {
            c.data.apply = true;
        }
        else if (k == "encode")
        {
            c.encode.mode = EncodeChange::Mode::all;
        }
        else if (k.starts_with("encode."))
        {
            if (c.encode.mode == EncodeChange::Mode::channels)
            {
                c.encode.channels.push_back(k.substr(7));
            }
        }
        else if (k.starts_with("scale."))
        {
            c.scale.selection.names.push_back(a.scale_name);
        }
        else if (k == "markType")
        {
            c.mark_type = true;
        }
        else if (k.starts_with("signal."))
        {
            c.signal.names.push_back(k.substr(7));
        }
        else if (k.starts_with("view."))
        {
            c.signal.names.push_back(k.substr(5));
        }
    }
    if (c.encode.mode == EncodeChange::Mode::channels && c.encode.channels.empty())
    {
        c.encode.mode = EncodeChange::Mode::none;
    }
    if (c.scale.selection.names.empty())
    {
        c.scale.selection.mode = Selection::Mode::none;
    }
    if (c.signal.names.empty())
    {
        c.signal.mode = Selection::Mode::none;
    }
    (void)kind;
    return c;
}

// ---------------------------------------------------------------------------------------------------
// State threading

std::optional<std::vector<Row>> bound_rows(const ChartSpec& end, const std::string& mark, const EnumeratorBinding& binding)
{
    const MarkDef* m = end.find_mark(mark);
    if (m == nullptr)
    {
        return std::nullopt;
    }
    if (!binding.filter.dataset.empty() && binding.filter.dataset != m->dataset)
    {
        return std::nullopt;
    }
    DatasetDef ds = *end.find_dataset(m->dataset);
    bool bound = false;
    for (auto& t : ds.transforms)
    {
        if (auto* f = std::get_if<FilterTransform>(&t.op); f != nullptr && f->field == binding.filter.field && f->op != Comparator::in)
        {
            f->rhs = {binding.value};
            bound = true;
        }
    }
    if (!bound)
    {
        return std::nullopt;
    }
    return apply_transforms(ds);
}

namespace
{

void apply_data(ComponentState& r, const ComponentState& initial, const ComponentState& target, const DataChange& data,
                const ChartSpec& end, const std::optional<EnumeratorBinding>& binding)
{
    std::vector<KeyedRow> target_rows = target.rows;
    if (binding)
    {
        if (const auto rows = bound_rows(end, target.ref.name, *binding))
        {
            target_rows = key_rows(*rows, target.key_fields);
        }
    }
    std::unordered_map<std::string, const KeyedRow*> before;
    for (const auto& kr : initial.rows)
    {
        before.emplace(kr.key, &kr);
    }
    std::set<std::string> kept;
    std::vector<KeyedRow> rows;
    for (const auto& kr : target_rows)
    {
        const auto it = before.find(kr.key);
        if (it != before.end())
        {
            rows.push_back(data.update ? kr : *it->second);
            kept.insert(kr.key);
        }
        else if (data.enter)
        {
            rows.push_back(kr);
        }
    }
    if (!data.exit)
    {
        for (const auto& kr : initial.rows)
        {
            if (!kept.contains(kr.key))
            {
                rows.push_back(kr);
            }
        }
    }
    r.rows = std::move(rows);
    r.key_fields = target.key_fields;
    r.groupby = target.groupby;
    r.present = target.present;
}

void apply_mark_encode(ComponentState& r, const ComponentState& target, const EncodeChange& encode)
{
    if (!r.mark || !target.mark)
    {
        return;
    }
    MarkDef& m = *r.mark;
    const MarkDef& t = *target.mark;
    switch (encode.mode)
    {
        case EncodeChange::Mode::none: return;
        case EncodeChange::Mode::all:
            m.encodings = t.encodings;
            m.order_field = t.order_field;
            m.dataset = t.dataset;
            return;
        case EncodeChange::Mode::channels:
            for (const auto& ch : encode.channels)
            {
                const auto it = t.encodings.find(ch);
                if (it == t.encodings.end())
                {
                    m.encodings.erase(ch);
                }
                else
                {
                    m.encodings[ch] = it->second;
                }
            }
            return;
        case EncodeChange::Mode::explicit_encoding:
            for (const auto& [ch, enc] : encode.mark_channels)
            {
                if (!enc)
                {
                    m.encodings.erase(ch);
                    continue;
                }
                if (!enc->is_constant() && !r.rows.empty() && !r.rows.front().row.contains(enc->field))
                {
                    throw Error(ErrorCode::unknown_field, "explicit encoding of '" + ch + "' on mark '" + m.name +
                                                              "' uses field '" + enc->field + "' absent from the step's data");
                }
                if (!enc->is_constant() && !enc->scale.empty() && !r.scales.contains(enc->scale))
                {
                    throw Error(ErrorCode::dangling_reference, "explicit encoding of '" + ch + "' on mark '" + m.name +
                                                                   "' uses scale '" + enc->scale + "' that is not available");
                }
                m.encodings[ch] = *enc;
            }
            return;
    }
}

void set_axis_part(AxisDef& a, const AxisDef* t, const std::string& part, std::optional<bool> on)
{
    bool* flag = part == "domain"   ? &a.parts.domain
                 : part == "ticks"  ? &a.parts.ticks
                 : part == "labels" ? &a.parts.labels
                 : part == "grid"   ? &a.parts.grid
                 : part == "title"  ? &a.parts.title
                                    : nullptr;
    if (flag == nullptr)
    {
        throw Error(ErrorCode::invalid_value, "unknown axis part '" + part + "'");
    }
    if (on)
    {
        *flag = *on;
        return;
    }
    const bool* src = part == "domain"   ? &t->parts.domain
                      : part == "ticks"  ? &t->parts.ticks
                      : part == "labels" ? &t->parts.labels
                      : part == "grid"   ? &t->parts.grid
                                         : &t->parts.title;
    *flag = *src;
    if (part == "title")
    {
        a.title = t->title;
    }
    if (part == "ticks")
    {
        a.tick_count = t->tick_count;
    }
}

void set_legend_part(LegendDef& l, const LegendDef* t, const std::string& part, std::optional<bool> on)
{
    bool* flag = part == "symbols"  ? &l.parts.symbols
                 : part == "labels" ? &l.parts.labels
                 : part == "title"  ? &l.parts.title
                                    : nullptr;
    if (flag == nullptr)
    {
        throw Error(ErrorCode::invalid_value, "unknown legend part '" + part + "'");
    }
    if (on)
    {
        *flag = *on;
        return;
    }
    *flag = part == "symbols" ? t->parts.symbols : part == "labels" ? t->parts.labels : t->parts.title;
    if (part == "title")
    {
        l.title = t->title;
    }
}

template <typename Def, typename SetPart>
void apply_guide_encode(ComponentState& r, std::optional<Def>& def, const std::optional<Def>& target, bool target_present,
                        const EncodeChange& encode, SetPart set_part)
{
    switch (encode.mode)
    {
        case EncodeChange::Mode::none: return;
        case EncodeChange::Mode::all:
            r.present = target_present;
            if (def && target)
            {
                const std::string scale = def->scale;
                *def = *target;
                def->scale = scale;
            }
            return;
        case EncodeChange::Mode::channels:
            if (def && target)
            {
                for (const auto& part : encode.channels)
                {
                    set_part(*def, &*target, part, std::nullopt);
                }
            }
            return;
        case EncodeChange::Mode::explicit_encoding:
            if (def)
            {
                for (const auto& [part, on] : encode.guide.parts)
                {
                    set_part(*def, nullptr, part, on);
                }
                if (encode.guide.title)
                {
                    def->title = *encode.guide.title;
                }
            }
            return;
    }
}

}  // namespace

ComponentState apply_change(const ComponentState& initial, const ComponentState& target, const ChangeSpec& change,
                            const ChartSpec& end, const std::optional<EnumeratorBinding>& binding)
{
    ComponentState r = initial;
    r.ref = target.ref;
    const Selection& scales = change.scale.selection;

    std::set<std::string> names;
    for (const auto& [n, s] : initial.scales) names.insert(n);
    for (const auto& [n, s] : target.scales) names.insert(n);
    for (const auto& n : names)
    {
        if (!scales.includes(n))
        {
            continue;
        }
        const auto it = target.scales.find(n);
        if (it == target.scales.end())
        {
            r.scales.erase(n);
        }
        else
        {
            r.scales[n] = it->second;
        }
    }
    for (const char* s : {"height", "width"})
    {
        if (change.signal.includes(s))
        {
            r.signals[s] = target.signals.at(s);
        }
    }

    switch (target.ref.kind)
    {
        case ComponentKind::mark:
            if (!r.mark && target.mark)
            {
                r.mark = target.mark;
            }
            if (change.data.apply)
            {
                apply_data(r, initial, target, change.data, end, binding);
            }
            apply_mark_encode(r, target, change.encode);
            if (change.mark_type && r.mark && target.mark)
            {
                r.mark->type = target.mark->type;
            }
            break;
        case ComponentKind::axis:
            if (!r.axis && target.axis)
            {
                r.axis = target.axis;
            }
            apply_guide_encode(r, r.axis, target.axis, target.present, change.encode, set_axis_part);
            if (r.axis && target.axis && scales.includes(target.axis->scale))
            {
                r.axis->scale = target.axis->scale;
            }
            break;
        case ComponentKind::legend:
            if (!r.legend && target.legend)
            {
                r.legend = target.legend;
            }
            apply_guide_encode(r, r.legend, target.legend, target.present, change.encode, set_legend_part);
            if (r.legend && target.legend && scales.includes(target.legend->scale))
            {
                r.legend->scale = target.legend->scale;
            }
            break;
        case ComponentKind::view:
            r.present = true;
            break;
        case ComponentKind::pause:
            break;
    }
    return r;
}

std::map<std::string, MarkKeys> transition_keys(const Schedule& schedule, const ChartSpec& start, const ChartSpec& end)
{
    std::map<std::string, std::vector<std::string>> user;
    for (const auto& s : schedule.steps)
    {
        if (s.step.component.kind == ComponentKind::mark && !s.step.change.data.keys.empty())
        {
            user.emplace(s.step.component.name, s.step.change.data.keys);
        }
    }
    std::map<std::string, MarkKeys> out;
    for (const ChartSpec* chart : {&start, &end})
    {
        for (const auto& m : chart->marks)
        {
            if (!out.contains(m.name))
            {
                const auto it = user.find(m.name);
                out.emplace(m.name, resolve_join_keys(start, end, m.name, it == user.end() ? std::vector<std::string>{} : it->second));
            }
        }
    }
    return out;
}

std::vector<StepStates> thread_step_states(const Schedule& schedule, const ChartSpec& start, const ChartSpec& end)
{
    if (const auto clash = find_overlapping_steps(schedule))
    {
        throw Error(ErrorCode::contradiction, *clash);
    }
    const auto keys = transition_keys(schedule, start, end);
    auto keys_for = [&](const ComponentRef& ref, bool at_start) {
        if (ref.kind != ComponentKind::mark)
        {
            return std::vector<std::string>{};
        }
        const MarkKeys& k = keys.at(ref.name);
        return at_start ? k.start : k.end;
    };

    std::map<ComponentRef, ComponentState> current;
    std::vector<StepStates> out;
    out.reserve(schedule.steps.size());
    for (const auto& s : schedule.steps)
    {
        const ComponentRef& ref = s.step.component;
        if (ref.kind == ComponentKind::pause)
        {
            out.push_back({});
            continue;
        }
        auto it = current.find(ref);
        if (it == current.end())
        {
            it = current.emplace(ref, component_state(start, ref, keys_for(ref, true))).first;
        }
        const ComponentState target = component_state(end, ref, keys_for(ref, false));
        ComponentState final = apply_change(it->second, target, s.step.change, end, s.binding);
        out.push_back({it->second, final});
        it->second = std::move(final);
    }
    return out;
}

GuideJoin diff_guide_data(const ComponentState& initial, const ComponentState& final, DomainDimension dimension)
{
    auto entries = [](const ComponentState& st) -> std::vector<Value> {
        if (!st.present)
        {
            return {};
        }
        if (st.axis)
        {
            return tick_values(st.scales.at(st.axis->scale), st.axis->tick_count);
        }
        if (st.legend)
        {
            const ScaleDef& s = st.scales.at(st.legend->scale);
            return is_continuous(s.kind) ? tick_values(s, 5) : s.categories;
        }
        return {};
    };
    const auto a = entries(initial);
    const auto b = entries(final);
    GuideJoin out;
    if (dimension == DomainDimension::different)
    {
        out.crossfade = true;
        out.exit = a;
        out.enter = b;
        return out;
    }
    for (const auto& v : a)
    {
        (std::find(b.begin(), b.end(), v) != b.end() ? out.update : out.exit).push_back(v);
    }
    for (const auto& v : b)
    {
        if (std::find(a.begin(), a.end(), v) == a.end())
        {
            out.enter.push_back(v);
        }
    }
    return out;
}

}  // namespace stagecraft
