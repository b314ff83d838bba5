#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stagecraft/value.hpp"

namespace stagecraft
{

inline constexpr std::string_view chart_schema_version = "chart/1";

enum class Comparator
{
    less,
    less_equal,
    equal,
    greater_equal,
    greater,
    in,
};

const char* comparator_name(Comparator op);
Comparator comparator_from_name(std::string_view name);
bool compare_values(const Value& lhs, Comparator op, const Value& rhs);

enum class AggregateOp
{
    mean,
    sum,
    count,
    min,
    max,
};

const char* aggregate_op_name(AggregateOp op);

struct FilterTransform
{
    std::string field;
    Comparator op = Comparator::equal;
    // A scalar, or a list for `in`.
    std::vector<Value> rhs;

    bool operator==(const FilterTransform&) const = default;
};

struct Measure
{
    std::string field;
    AggregateOp op = AggregateOp::count;
    std::string as;

    bool operator==(const Measure&) const = default;
};

struct AggregateTransform
{
    std::vector<std::string> groupby;
    std::vector<Measure> measures;

    bool operator==(const AggregateTransform&) const = default;
};

struct TransformDef
{
    std::variant<FilterTransform, AggregateTransform> op;

    bool operator==(const TransformDef&) const = default;
};

struct DatasetDef
{
    std::string name;
    std::vector<Row> rows;
    std::vector<TransformDef> transforms;

    bool operator==(const DatasetDef&) const = default;
};

enum class ScaleKind
{
    linear,
    time,
    band,
    point,
    ordinal_color,
    ordinal_shape,
};

const char* scale_kind_name(ScaleKind kind);
bool is_continuous(ScaleKind kind);

struct DomainSource
{
    std::string dataset;
    std::string field;

    bool operator==(const DomainSource&) const = default;
};

struct ScaleDef
{
    std::string name;
    ScaleKind kind = ScaleKind::linear;
    // Continuous kinds use numeric_domain; discrete kinds use categories.
    std::pair<double, double> numeric_domain{0.0, 1.0};
    std::vector<Value> categories;
    std::optional<DomainSource> domain_source;
    // Pixel interval for positional kinds; hex colors or shape names for ordinal kinds.
    std::pair<double, double> pixel_range{0.0, 1.0};
    std::vector<std::string> palette;
    double padding = 0.0;

    bool operator==(const ScaleDef&) const = default;
};

enum class MarkType
{
    symbol,
    rect,
    line,
    text,
};

const char* mark_type_name(MarkType type);

/// Channel names are drawn from {x, y, x2, y2, width, height, color, shape, size, opacity, text}.
struct EncodingChannel
{
    // Either a constant or a (field, scale) pair. Text may bind a field without a scale.
    std::optional<Value> value;
    std::string field;
    std::string scale;

    bool is_constant() const { return value.has_value(); }
    bool operator==(const EncodingChannel&) const = default;
};

using Encodings = std::map<std::string, EncodingChannel>;

nlohmann::json scale_def_to_json(const ScaleDef& s);
EncodingChannel encoding_from_json(const nlohmann::json& j);
nlohmann::json encoding_to_json(const EncodingChannel& c);

const std::vector<std::string>& all_channels();
const std::vector<std::string>& channels_for(MarkType type);
bool channel_allowed(MarkType type, std::string_view channel);
bool is_spatial_channel(std::string_view channel);

struct MarkDef
{
    std::string name;
    MarkType type = MarkType::symbol;
    std::string dataset;
    Encodings encodings;
    // Line vertex ordering and vertex join field; defaults to the x field.
    std::string order_field;

    bool operator==(const MarkDef&) const = default;
};

enum class AxisOrient
{
    x,
    y,
};

struct AxisParts
{
    bool domain = true;
    bool ticks = true;
    bool labels = true;
    bool grid = false;
    bool title = true;

    bool operator==(const AxisParts&) const = default;
};

struct AxisDef
{
    std::string name;
    AxisOrient orient = AxisOrient::x;
    std::string scale;
    AxisParts parts;
    std::string title;
    int tick_count = 5;

    bool operator==(const AxisDef&) const = default;
};

struct LegendParts
{
    bool symbols = true;
    bool labels = true;
    bool title = true;

    bool operator==(const LegendParts&) const = default;
};

struct LegendDef
{
    std::string name;
    std::string channel = "color";
    std::string scale;
    LegendParts parts;
    std::string title;

    bool operator==(const LegendDef&) const = default;
};

struct ChartSpec
{
    double width = 0.0;
    double height = 0.0;
    std::vector<DatasetDef> datasets;
    std::vector<ScaleDef> scales;
    std::vector<MarkDef> marks;
    std::vector<AxisDef> axes;
    std::vector<LegendDef> legends;

    /// Layout signals. Only `width` and `height` exist; they mirror the view size.
    std::map<std::string, double> signals() const { return {{"height", height}, {"width", width}}; }

    const DatasetDef* find_dataset(std::string_view name) const;
    const ScaleDef* find_scale(std::string_view name) const;
    const MarkDef* find_mark(std::string_view name) const;
    const AxisDef* find_axis(std::string_view name) const;
    const LegendDef* find_legend(std::string_view name) const;

    bool operator==(const ChartSpec&) const = default;
};

/// Parses a chart document. Throws Error on syntax, reference, naming, or channel problems.
ChartSpec parse_chart(std::string_view text);
ChartSpec chart_from_json(const nlohmann::json& doc);
nlohmann::json chart_to_json(const ChartSpec& chart);
std::string serialize_chart(const ChartSpec& chart);

/// Checks every ChartSpec invariant; throws on the first violation.
void validate_chart(const ChartSpec& chart);

/// Runs the dataset's transforms in order over its source rows.
std::vector<Row> apply_transforms(const DatasetDef& dataset);

/// Groupby fields of the dataset's last aggregate transform, empty when not aggregated.
std::vector<std::string> grouping_fields(const DatasetDef& dataset);

}  // namespace stagecraft
