#include "stagecraft/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stagecraft/error.hpp"
#include "stagecraft/scale.hpp"

namespace stagecraft
{

using nlohmann::json;

namespace
{

constexpr const char* default_fill = "#4c78a8";
constexpr const char* text_fill = "#000000";
constexpr const char* guide_ink = "#000000";
constexpr const char* grid_ink = "#dddddd";
constexpr double default_symbol_size = 64.0;

Attrs box(double x, double y, double w, double h, std::string fill, std::string text = "", std::string shape = "")
{
    return Attrs{{"x", x},
                 {"y", y},
                 {"width", w},
                 {"height", h},
                 {"fill", std::move(fill)},
                 {"opacity", 1.0},
                 {"text", std::move(text)},
                 {"shape", std::move(shape)}};
}

const ScaleDef& scale_of(const ComponentState& state, const std::string& name)
{
    const auto it = state.scales.find(name);
    if (it == state.scales.end())
    {
        throw Error(ErrorCode::dangling_reference,
                    component_label(state.ref) + " references scale '" + name + "' that is not available");
    }
    return it->second;
}

const Value& field_of(const ComponentState& state, const Row& row, const std::string& field)
{
    const auto it = row.find(field);
    if (it == row.end())
    {
        throw Error(ErrorCode::unknown_field,
                    component_label(state.ref) + " encodes field '" + field + "' that is not in its data");
    }
    return it->second;
}

double constant_number(const ComponentState& state, const std::string& channel, const Value& v)
{
    if (!is_number(v))
    {
        throw Error(ErrorCode::type_mismatch,
                    component_label(state.ref) + " channel '" + channel + "' needs a numeric constant");
    }
    return as_number(v);
}

// Resolved channels of one datum.
class Encoder
{
public:
    Encoder(const ComponentState& state, const Encodings& enc) : state_(state), enc_(enc) {}

    bool has(const std::string& ch) const { return enc_.contains(ch); }

    const EncodingChannel* channel(const std::string& ch) const
    {
        const auto it = enc_.find(ch);
        return it == enc_.end() ? nullptr : &it->second;
    }

    // Slot start for band scales, position otherwise.
    std::optional<double> edge(const std::string& ch, const Row& row) const
    {
        const EncodingChannel* c = channel(ch);
        if (c == nullptr)
        {
            return std::nullopt;
        }
        if (c->is_constant())
        {
            return constant_number(state_, ch, *c->value);
        }
        return scale_apply(scale_of(state_, c->scale), field_of(state_, row, c->field)).position;
    }

    // Slot centre for band scales.
    std::optional<double> centre(const std::string& ch, const Row& row) const
    {
        auto p = edge(ch, row);
        if (p && band_width(ch) > 0.0)
        {
            *p += band_width(ch) / 2.0;
        }
        return p;
    }

    double band_width(const std::string& ch) const
    {
        const EncodingChannel* c = channel(ch);
        if (c == nullptr || c->is_constant())
        {
            return 0.0;
        }
        return bandwidth(scale_of(state_, c->scale));
    }

    std::optional<std::string> symbol(const std::string& ch, const Row& row) const
    {
        const EncodingChannel* c = channel(ch);
        if (c == nullptr)
        {
            return std::nullopt;
        }
        if (c->is_constant())
        {
            return format_value(*c->value);
        }
        const Value& v = field_of(state_, row, c->field);
        if (c->scale.empty())
        {
            return format_value(v);
        }
        const ScaleDef& s = scale_of(state_, c->scale);
        if (s.kind == ScaleKind::ordinal_color || s.kind == ScaleKind::ordinal_shape)
        {
            return scale_apply(s, v).symbol;
        }
        return format_value(v);
    }

private:
    const ComponentState& state_;
    const Encodings& enc_;
};

void span(const Encoder& e, const Row& row, const char* ch, const char* ch2, const char* size, double& pos, double& len)
{
    const auto a = e.edge(ch, row);
    const auto b = e.edge(ch2, row);
    pos = a.value_or(0.0);
    len = 0.0;
    if (a && b)
    {
        pos = std::min(*a, *b);
        len = std::abs(*b - *a);
    }
    else if (const auto l = e.edge(size, row))
    {
        len = *l;
    }
    else if (e.band_width(ch) > 0.0)
    {
        len = e.band_width(ch);
    }
}

SceneElement mark_element(const ComponentState& state, const MarkDef& mark, const KeyedRow& kr)
{
    const Encoder e(state, mark.encodings);
    const Row& row = kr.row;
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;
    std::string shape;
    switch (mark.type)
    {
        case MarkType::symbol:
        {
            const double size = std::max(0.0, e.edge("size", row).value_or(default_symbol_size));
            w = h = std::sqrt(size);
            x = e.centre("x", row).value_or(0.0) - w / 2.0;
            y = e.centre("y", row).value_or(0.0) - h / 2.0;
            shape = e.symbol("shape", row).value_or("circle");
            break;
        }
        case MarkType::rect:
            span(e, row, "x", "x2", "width", x, w);
            span(e, row, "y", "y2", "height", y, h);
            shape = "rect";
            break;
        case MarkType::text:
            x = e.centre("x", row).value_or(0.0);
            y = e.centre("y", row).value_or(0.0);
            shape = "text";
            break;
        case MarkType::line:
            break;
    }
    const char* fallback = mark.type == MarkType::text ? text_fill : default_fill;
    Attrs attrs = box(x, y, w, h, e.symbol("color", row).value_or(fallback), e.symbol("text", row).value_or(""), shape);
    attrs["opacity"] = e.edge("opacity", row).value_or(1.0);
    return SceneElement{mark.name + "/mark/" + kr.key, "mark", std::move(attrs), row};
}

std::vector<SceneElement> line_elements(const ComponentState& state, const MarkDef& mark)
{
    const Encoder e(state, mark.encodings);
    const EncodingChannel* color = e.channel("color");
    const bool grouped = color != nullptr && !color->is_constant();
    std::string order = mark.order_field;
    if (order.empty())
    {
        if (const EncodingChannel* x = e.channel("x"); x != nullptr && !x->is_constant())
        {
            order = x->field;
        }
    }

    struct Group
    {
        Value value;
        std::vector<const Row*> rows;
    };
    std::vector<Group> groups;
    for (const auto& kr : state.rows)
    {
        const Value g = grouped ? field_of(state, kr.row, color->field) : Value{std::string("all")};
        auto it = std::find_if(groups.begin(), groups.end(), [&](const Group& grp) { return grp.value == g; });
        if (it == groups.end())
        {
            groups.push_back({g, {}});
            it = groups.end() - 1;
        }
        it->rows.push_back(&kr.row);
    }
    std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) { return value_less(a.value, b.value); });

    std::vector<SceneElement> out;
    for (auto& grp : groups)
    {
        if (!order.empty())
        {
            std::stable_sort(grp.rows.begin(), grp.rows.end(), [&](const Row* a, const Row* b) {
                return value_less(field_of(state, *a, order), field_of(state, *b, order));
            });
        }
        Points points;
        for (std::size_t i = 0; i < grp.rows.size(); ++i)
        {
            const Row& row = *grp.rows[i];
            const std::string key = order.empty() ? "#" + std::to_string(i) : format_value(field_of(state, row, order));
            points.push_back({key, e.centre("x", row).value_or(0.0), e.centre("y", row).value_or(0.0)});
        }
        const Row& first = *grp.rows.front();
        Attrs attrs{{"points", std::move(points)},
                    {"stroke", e.symbol("color", first).value_or(default_fill)},
                    {"opacity", e.edge("opacity", first).value_or(1.0)}};
        Row datum;
        if (grouped)
        {
            datum.emplace(color->field, grp.value);
        }
        out.push_back({mark.name + "/mark/line:" + format_value(grp.value), "mark", std::move(attrs), std::move(datum)});
    }
    return out;
}

double guide_position(const ScaleDef& scale, const Value& v)
{
    return scale_apply(scale, v).position + bandwidth(scale) / 2.0;
}

std::vector<SceneElement> axis_elements(const ComponentState& state)
{
    const AxisDef& axis = *state.axis;
    const ScaleDef& scale = scale_of(state, axis.scale);
    const double width = state.signals.at("width");
    const double height = state.signals.at("height");
    const double r0 = std::min(scale.pixel_range.first, scale.pixel_range.second);
    const double r1 = std::max(scale.pixel_range.first, scale.pixel_range.second);
    const bool horizontal = axis.orient == AxisOrient::x;
    const std::string base = axis.name + "/";

    std::vector<SceneElement> out;
    if (axis.parts.domain)
    {
        out.push_back({base + "axis-domain/main", "axis-domain",
                       horizontal ? box(r0, height, r1 - r0, 0.0, guide_ink) : box(0.0, r0, 0.0, r1 - r0, guide_ink),
                       {}});
    }
    for (const Value& v : tick_values(scale, axis.tick_count))
    {
        const double p = guide_position(scale, v);
        const std::string key = format_value(v);
        const Row datum{{"value", v}};
        if (axis.parts.grid)
        {
            out.push_back({base + "axis-grid/" + key, "axis-grid",
                           horizontal ? box(p, 0.0, 0.0, height, grid_ink) : box(0.0, p, width, 0.0, grid_ink), datum});
        }
        if (axis.parts.ticks)
        {
            out.push_back({base + "axis-tick/" + key, "axis-tick",
                           horizontal ? box(p, height, 0.0, 5.0, guide_ink) : box(-5.0, p, 5.0, 0.0, guide_ink), datum});
        }
        if (axis.parts.labels)
        {
            out.push_back({base + "axis-label/" + key, "axis-label",
                           horizontal ? box(p, height + 15.0, 0.0, 0.0, guide_ink, key)
                                      : box(-8.0, p, 0.0, 0.0, guide_ink, key),
                           datum});
        }
    }
    if (axis.parts.title)
    {
        out.push_back({base + "axis-title/main", "axis-title",
                       horizontal ? box((r0 + r1) / 2.0, height + 35.0, 0.0, 0.0, guide_ink, axis.title)
                                  : box(-40.0, height / 2.0, 0.0, 0.0, guide_ink, axis.title),
                       {}});
    }
    return out;
}

std::vector<SceneElement> legend_elements(const ComponentState& state)
{
    const LegendDef& legend = *state.legend;
    const ScaleDef& scale = scale_of(state, legend.scale);
    const double left = state.signals.at("width") + 20.0;
    const std::string base = legend.name + "/";

    std::vector<SceneElement> out;
    if (legend.parts.title)
    {
        out.push_back({base + "legend-title/main", "legend-title", box(left, 0.0, 0.0, 0.0, guide_ink, legend.title), {}});
    }
    const std::vector<Value> entries = is_continuous(scale.kind) ? tick_values(scale, 5) : scale.categories;
    for (std::size_t i = 0; i < entries.size(); ++i)
    {
        const Value& v = entries[i];
        const std::string key = format_value(v);
        const double y = 20.0 * static_cast<double>(i + 1);
        const Row datum{{"value", v}};
        if (legend.parts.symbols)
        {
            const ScaledValue sv = scale_apply(scale, v);
            Attrs attrs = box(left, y, 10.0, 10.0, default_fill, "", "circle");
            if (scale.kind == ScaleKind::ordinal_color)
            {
                attrs["fill"] = sv.symbol;
            }
            else if (scale.kind == ScaleKind::ordinal_shape)
            {
                attrs["shape"] = sv.symbol;
            }
            else
            {
                const double side = std::sqrt(std::max(0.0, sv.position));
                attrs["width"] = side;
                attrs["height"] = side;
            }
            out.push_back({base + "legend-symbol/" + key, "legend-symbol", std::move(attrs), datum});
        }
        if (legend.parts.labels)
        {
            out.push_back({base + "legend-label/" + key, "legend-label", box(left + 15.0, y, 0.0, 0.0, guide_ink, key), datum});
        }
    }
    return out;
}

}  // namespace

const SceneElement* SceneGraph::find(std::string_view id) const
{
    for (const auto& e : elements)
    {
        if (e.id == id)
        {
            return &e;
        }
    }
    return nullptr;
}

std::vector<SceneElement> render_component(const ComponentState& state)
{
    if (!state.present)
    {
        return {};
    }
    switch (state.ref.kind)
    {
        case ComponentKind::view:
            return {{"view/view-frame/main", "view-frame",
                     box(0.0, 0.0, state.signals.at("width"), state.signals.at("height"), "#ffffff"), {}}};
        case ComponentKind::mark:
        {
            const MarkDef& mark = *state.mark;
            if (mark.type == MarkType::line)
            {
                return line_elements(state, mark);
            }
            std::vector<SceneElement> out;
            out.reserve(state.rows.size());
            for (const auto& kr : state.rows)
            {
                out.push_back(mark_element(state, mark, kr));
            }
            return out;
        }
        case ComponentKind::axis: return axis_elements(state);
        case ComponentKind::legend: return legend_elements(state);
        case ComponentKind::pause: break;
    }
    return {};
}

std::vector<std::string> overflow_report(const ComponentState& state)
{
    std::vector<std::string> out;
    if (!state.present || !state.mark)
    {
        return out;
    }
    for (const auto& [channel, enc] : state.mark->encodings)
    {
        if (enc.is_constant() || enc.scale.empty())
        {
            continue;
        }
        const auto scale = state.scales.find(enc.scale);
        if (scale == state.scales.end())
        {
            continue;
        }
        for (const auto& kr : state.rows)
        {
            const auto v = kr.row.find(enc.field);
            if (v != kr.row.end() && outside_domain(scale->second, v->second))
            {
                out.push_back(component_label(state.ref) + " " + kr.key + ": " + channel + " value " +
                              format_value(v->second) + " outside scale '" + enc.scale + "'");
            }
        }
    }
    return out;
}

SceneGraph render_scene(const ChartSpec& chart)
{
    return render_scene(chart, {});
}

SceneGraph render_scene(const ChartSpec& chart, const std::map<std::string, std::vector<std::string>>& mark_keys)
{
    SceneGraph scene;
    std::set<std::string> ids;
    for (const auto& ref : chart_components(chart))
    {
        const auto keys = ref.kind == ComponentKind::mark ? mark_keys.find(ref.name) : mark_keys.end();
        const ComponentState state = component_state(chart, ref, keys == mark_keys.end() ? std::vector<std::string>{} : keys->second);
        if (const auto report = overflow_report(state); !report.empty())
        {
            throw Error(ErrorCode::overflow, report.front());
        }
        for (auto& e : render_component(state))
        {
            if (!ids.insert(e.id).second)
            {
                throw Error(ErrorCode::duplicate_key, "duplicate scene element '" + e.id + "'");
            }
            scene.elements.push_back(std::move(e));
        }
    }
    return scene;
}

json attrs_to_json(const Attrs& attrs)
{
    json j = json::object();
    for (const auto& [name, value] : attrs)
    {
        if (const auto* d = std::get_if<double>(&value))
        {
            j[name] = *d;
        }
        else if (const auto* s = std::get_if<std::string>(&value))
        {
            j[name] = *s;
        }
        else
        {
            json pts = json::array();
            for (const auto& p : std::get<Points>(value))
            {
                pts.push_back(json{{"key", p.key}, {"x", p.x}, {"y", p.y}});
            }
            j[name] = pts;
        }
    }
    return j;
}

Attrs attrs_from_json(const json& j)
{
    Attrs attrs;
    for (const auto& [name, value] : j.items())
    {
        if (value.is_number())
        {
            attrs[name] = value.get<double>();
        }
        else if (value.is_string())
        {
            attrs[name] = value.get<std::string>();
        }
        else if (value.is_array())
        {
            Points pts;
            for (const auto& p : value)
            {
                pts.push_back({p.at("key").get<std::string>(), p.at("x").get<double>(), p.at("y").get<double>()});
            }
            attrs[name] = std::move(pts);
        }
        else
        {
            throw Error(ErrorCode::type_mismatch, "attribute '" + name + "' has an unsupported value");
        }
    }
    return attrs;
}

json scene_to_json(const SceneGraph& scene)
{
    json elements = json::array();
    for (const auto& e : scene.elements)
    {
        elements.push_back(json{{"id", e.id}, {"role", e.role}, {"attrs", attrs_to_json(e.attrs)}});
    }
    return json{{"elements", elements}};
}

std::string serialize_scene(const SceneGraph& scene) { return scene_to_json(scene).dump(); }

}  // namespace stagecraft
