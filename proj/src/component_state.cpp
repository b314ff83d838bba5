#include "stagecraft/component_state.hpp"

#include <set>

#include "stagecraft/error.hpp"

namespace stagecraft
{

const char* component_kind_name(ComponentKind kind)
{
    switch (kind)
    {
        case ComponentKind::view: return "view";
        case ComponentKind::mark: return "mark";
        case ComponentKind::axis: return "axis";
        case ComponentKind::legend: return "legend";
        case ComponentKind::pause: return "pause";
    }
    return "?";
}

std::string component_label(const ComponentRef& ref)
{
    if (ref.kind == ComponentKind::view || ref.kind == ComponentKind::pause)
    {
        return component_kind_name(ref.kind);
    }
    return std::string(component_kind_name(ref.kind)) + ":" + ref.name;
}

std::string row_key(const Row& row, const std::vector<std::string>& key_fields, std::size_t index)
{
    if (key_fields.empty())
    {
        return "#" + std::to_string(index);
    }
    std::string key;
    for (const auto& field : key_fields)
    {
        const auto it = row.find(field);
        if (it == row.end())
        {
            throw Error(ErrorCode::unknown_field, "join key field '" + field + "' missing from row");
        }
        if (!key.empty())
        {
            key += ',';
        }
        key += field + "=" + format_value(it->second);
    }
    return key;
}

std::vector<KeyedRow> key_rows(const std::vector<Row>& rows, const std::vector<std::string>& key_fields)
{
    std::vector<KeyedRow> out;
    out.reserve(rows.size());
    std::set<std::string> seen;
    for (std::size_t i = 0; i < rows.size(); ++i)
    {
        std::string key = row_key(rows[i], key_fields, i);
        if (!seen.insert(key).second)
        {
            throw Error(ErrorCode::duplicate_key, "duplicate join key '" + key + "'");
        }
        out.push_back({std::move(key), rows[i]});
    }
    return out;
}

std::vector<std::string> line_key_fields(const MarkDef& mark)
{
    std::vector<std::string> fields;
    const auto color = mark.encodings.find("color");
    if (color != mark.encodings.end() && !color->second.is_constant())
    {
        fields.push_back(color->second.field);
    }
    std::string order = mark.order_field;
    if (order.empty())
    {
        const auto x = mark.encodings.find("x");
        if (x != mark.encodings.end() && !x->second.is_constant())
        {
            order = x->second.field;
        }
    }
    if (!order.empty() && (fields.empty() || fields.front() != order))
    {
        fields.push_back(order);
    }
    return fields;
}

std::vector<ComponentRef> chart_components(const ChartSpec& chart)
{
    std::vector<ComponentRef> refs{view_component};
    for (const auto& m : chart.marks)
    {
        refs.push_back({ComponentKind::mark, m.name});
    }
    for (const auto& a : chart.axes)
    {
        refs.push_back({ComponentKind::axis, a.name});
    }
    for (const auto& l : chart.legends)
    {
        refs.push_back({ComponentKind::legend, l.name});
    }
    return refs;
}

ComponentState component_state(const ChartSpec& chart, const ComponentRef& ref, const std::vector<std::string>& key_fields)
{
    ComponentState state;
    state.ref = ref;
    for (const auto& s : chart.scales)
    {
        state.scales.emplace(s.name, s);
    }
    state.signals = chart.signals();
    switch (ref.kind)
    {
        case ComponentKind::view:
            state.present = true;
            break;
        case ComponentKind::mark:
            if (const MarkDef* mark = chart.find_mark(ref.name))
            {
                const DatasetDef* ds = chart.find_dataset(mark->dataset);
                state.present = true;
                state.mark = *mark;
                state.key_fields = key_fields;
                if (key_fields.empty() && mark->type == MarkType::line)
                {
                    state.key_fields = line_key_fields(*mark);
                }
                state.groupby = grouping_fields(*ds);
                state.rows = key_rows(apply_transforms(*ds), state.key_fields);
            }
            break;
        case ComponentKind::axis:
            if (const AxisDef* axis = chart.find_axis(ref.name))
            {
                state.present = true;
                state.axis = *axis;
            }
            break;
        case ComponentKind::legend:
            if (const LegendDef* legend = chart.find_legend(ref.name))
            {
                state.present = true;
                state.legend = *legend;
            }
            break;
        case ComponentKind::pause:
            break;
    }
    return state;
}

std::vector<std::string> signals_used(const ComponentRef& ref, const ChartSpec& chart)
{
    switch (ref.kind)
    {
        case ComponentKind::view: return {"height", "width"};
        case ComponentKind::axis:
            if (const AxisDef* axis = chart.find_axis(ref.name))
            {
                if (axis->orient == AxisOrient::y && axis->parts.grid)
                {
                    return {"height", "width"};
                }
                return {"height"};
            }
            return {};
        case ComponentKind::legend: return {"width"};
        default: return {};
    }
}

}  // namespace stagecraft
