#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stagecraft/chart.hpp"

namespace stagecraft
{

enum class ComponentKind
{
    view,
    mark,
    axis,
    legend,
    pause,
};

const char* component_kind_name(ComponentKind kind);

struct ComponentRef
{
    ComponentKind kind = ComponentKind::mark;
    std::string name;

    auto operator<=>(const ComponentRef&) const = default;
};

/// "mark:points", "axis:x-axis", "view", "pause".
std::string component_label(const ComponentRef& ref);

inline const ComponentRef view_component{ComponentKind::view, "view"};

/// A data row with its join key.
struct KeyedRow
{
    std::string key;
    Row row;

    bool operator==(const KeyedRow&) const = default;
};

/// The state of one chart component at a point of the transition: data, encodings, scales, signals and
/// mark type. Components absent from a chart have present == false and render nothing.
struct ComponentState
{
    ComponentRef ref;
    bool present = false;

    // Mark components.
    std::vector<KeyedRow> rows;
    std::vector<std::string> key_fields;
    // Grouping fields when the rows come out of an aggregate, empty for raw rows.
    std::vector<std::string> groupby;
    std::optional<MarkDef> mark;

    // Guide components. The definition doubles as the guide's encode state.
    std::optional<AxisDef> axis;
    std::optional<LegendDef> legend;

    // Every scale of the chart the state was taken from, by name.
    std::map<std::string, ScaleDef> scales;
    std::map<std::string, double> signals;

    bool operator==(const ComponentState&) const = default;
};

/// Join key text for a row: "#<index>" without key fields, "f=v,g=w" otherwise.
std::string row_key(const Row& row, const std::vector<std::string>& key_fields, std::size_t index);

/// Keys every row; throws duplicate_key naming the first repeated key.
std::vector<KeyedRow> key_rows(const std::vector<Row>& rows, const std::vector<std::string>& key_fields);

/// Default vertex key fields of a line mark: its color field (when field-bound) then its order field.
std::vector<std::string> line_key_fields(const MarkDef& mark);

/// Components of a chart in canonical order: view, marks, axes, legends.
std::vector<ComponentRef> chart_components(const ChartSpec& chart);

/// Snapshot of one component of a chart, keyed with the given fields.
ComponentState component_state(const ChartSpec& chart, const ComponentRef& ref,
                               const std::vector<std::string>& key_fields = {});

/// Signals a guide or the view depends on.
std::vector<std::string> signals_used(const ComponentRef& ref, const ChartSpec& chart);

}  // namespace stagecraft
