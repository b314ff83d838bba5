#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

#include "stagecraft/chart.hpp"
#include "stagecraft/component_state.hpp"

namespace stagecraft
{

/// One vertex of a line element: the vertex join key and its position.
struct Vertex
{
    std::string key;
    double x = 0.0;
    double y = 0.0;

    bool operator==(const Vertex&) const = default;
};

using Points = std::vector<Vertex>;

/// Attribute values: numbers, text (colors as #rrggbb, shapes, labels) or line vertices.
using AttrValue = std::variant<double, std::string, Points>;
using Attrs = std::map<std::string, AttrValue>;

struct SceneElement
{
    // componentName/role/joinKey
    std::string id;
    std::string role;
    Attrs attrs;
    // The datum behind the element, used for staggering.
    Row datum;
};

struct SceneGraph
{
    std::vector<SceneElement> elements;

    const SceneElement* find(std::string_view id) const;
};

/// Elements of a single component drawn from a component state. Intermediate states may overflow
/// their scales; positions are extrapolated.
std::vector<SceneElement> render_component(const ComponentState& state);

/// One line per field-bound value that falls outside its scale's domain.
std::vector<std::string> overflow_report(const ComponentState& state);

/// Static render of a whole chart. Throws overflow if any datum falls outside its scale's domain.
SceneGraph render_scene(const ChartSpec& chart);

/// Same, with mark rows keyed by the given fields per mark name.
SceneGraph render_scene(const ChartSpec& chart, const std::map<std::string, std::vector<std::string>>& mark_keys);

nlohmann::json attrs_to_json(const Attrs& attrs);
Attrs attrs_from_json(const nlohmann::json& j);
nlohmann::json scene_to_json(const SceneGraph& scene);
std::string serialize_scene(const SceneGraph& scene);

}  // namespace stagecraft
