#include "stagecraft/chart.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stagecraft/error.hpp"
#include "stagecraft/json_util.hpp"

namespace stagecraft
{

using nlohmann::json;

const char* comparator_name(Comparator op)
{
    switch (op)
    {
        case Comparator::less: return "<";
        case Comparator::less_equal: return "<=";
        case Comparator::equal: return "==";
        case Comparator::greater_equal: return ">=";
        case Comparator::greater: return ">";
        case Comparator::in: return "in";
    }
    return "?";
}

Comparator comparator_from_name(std::string_view name)
{
    if (name == "<") return Comparator::less;
    if (name == "<=") return Comparator::less_equal;
    if (name == "==" || name == "=") return Comparator::equal;
    if (name == ">=") return Comparator::greater_equal;
    if (name == ">") return Comparator::greater;
    if (name == "in") return Comparator::in;
    throw Error(ErrorCode::invalid_value, "unknown comparator '" + std::string(name) + "'");
}

bool compare_values(const Value& lhs, Comparator op, const Value& rhs)
{
    if (op == Comparator::equal)
    {
        return lhs == rhs;
    }
    if (lhs.index() != rhs.index())
    {
        throw Error(ErrorCode::type_mismatch,
                    "cannot compare " + format_value(lhs) + " with " + format_value(rhs));
    }
    const bool lt = value_less(lhs, rhs);
    const bool gt = value_less(rhs, lhs);
    switch (op)
    {
        case Comparator::less: return lt;
        case Comparator::less_equal: return !gt;
        case Comparator::greater_equal: return !lt;
        case Comparator::greater: return gt;
        default: break;
    }
    return false;
}

const char* aggregate_op_name(AggregateOp op)
{
    switch (op)
    {
        case AggregateOp::mean: return "mean";
        case AggregateOp::sum: return "sum";
        case AggregateOp::count: return "count";
        case AggregateOp::min: return "min";
        case AggregateOp::max: return "max";
    }
    return "?";
}

static AggregateOp aggregate_op_from_name(std::string_view name)
{
    if (name == "mean") return AggregateOp::mean;
    if (name == "sum") return AggregateOp::sum;
    if (name == "count") return AggregateOp::count;
    if (name == "min") return AggregateOp::min;
    if (name == "max") return AggregateOp::max;
    throw Error(ErrorCode::invalid_value, "unknown aggregate op '" + std::string(name) + "'");
}

const char* scale_kind_name(ScaleKind kind)
{
    switch (kind)
    {
        case ScaleKind::linear: return "linear";
        case ScaleKind::time: return "time";
        case ScaleKind::band: return "band";
        case ScaleKind::point: return "point";
        case ScaleKind::ordinal_color: return "ordinal-color";
        case ScaleKind::ordinal_shape: return "ordinal-shape";
    }
    return "?";
}

static ScaleKind scale_kind_from_name(std::string_view name)
{
    if (name == "linear") return ScaleKind::linear;
    if (name == "time") return ScaleKind::time;
    if (name == "band") return ScaleKind::band;
    if (name == "point") return ScaleKind::point;
    if (name == "ordinal-color") return ScaleKind::ordinal_color;
    if (name == "ordinal-shape") return ScaleKind::ordinal_shape;
    throw Error(ErrorCode::invalid_value, "unknown scale type '" + std::string(name) + "'");
}

bool is_continuous(ScaleKind kind) { return kind == ScaleKind::linear || kind == ScaleKind::time; }

const char* mark_type_name(MarkType type)
{
    switch (type)
    {
        case MarkType::symbol: return "symbol";
        case MarkType::rect: return "rect";
        case MarkType::line: return "line";
        case MarkType::text: return "text";
    }
    return "?";
}

static MarkType mark_type_from_name(std::string_view name)
{
    if (name == "symbol") return MarkType::symbol;
    if (name == "rect") return MarkType::rect;
    if (name == "line") return MarkType::line;
    if (name == "text") return MarkType::text;
    throw Error(ErrorCode::invalid_value, "unknown mark type '" + std::string(name) + "'");
}

const std::vector<std::string>& all_channels()
{
    static const std::vector<std::string> channels{"x",     "y",     "x2",   "y2",      "width", "height",
                                                   "color", "shape", "size", "opacity", "text"};
    return channels;
}

const std::vector<std::string>& channels_for(MarkType type)
{
    static const std::vector<std::string> symbol{"x", "y", "color", "shape", "size", "opacity"};
    static const std::vector<std::string> rect{"x", "y", "x2", "y2", "width", "height", "color", "opacity"};
    static const std::vector<std::string> line{"x", "y", "color", "opacity"};
    static const std::vector<std::string> text{"x", "y", "text", "color", "opacity"};
    switch (type)
    {
        case MarkType::symbol: return symbol;
        case MarkType::rect: return rect;
        case MarkType::line: return line;
        case MarkType::text: return text;
    }
    return symbol;
}

bool channel_allowed(MarkType type, std::string_view channel)
{
    const auto& allowed = channels_for(type);
    return std::find(allowed.begin(), allowed.end(), channel) != allowed.end();
}

bool is_spatial_channel(std::string_view channel)
{
    return channel == "x" || channel == "y" || channel == "x2" || channel == "y2" || channel == "width" ||
           channel == "height";
}

template <typename T>
static const T* find_named(const std::vector<T>& items, std::string_view name)
{
    for (const auto& item : items)
    {
        if (item.name == name)
        {
            return &item;
        }
    }
    return nullptr;
}

const DatasetDef* ChartSpec::find_dataset(std::string_view name) const { return find_named(datasets, name); }
const ScaleDef* ChartSpec::find_scale(std::string_view name) const { return find_named(scales, name); }
const MarkDef* ChartSpec::find_mark(std::string_view name) const { return find_named(marks, name); }
const AxisDef* ChartSpec::find_axis(std::string_view name) const { return find_named(axes, name); }
const LegendDef* ChartSpec::find_legend(std::string_view name) const { return find_named(legends, name); }

// ---------------------------------------------------------------------------------------------------
// Document reading

static FilterTransform filter_from_json(const json& j)
{
    FilterTransform f;
    f.field = json_util::require_string(j, "field");
    f.op = comparator_from_name(json_util::get_string(j, "op", "=="));
    const json& rhs = json_util::require(j, "value");
    if (f.op == Comparator::in)
    {
        if (!rhs.is_array())
        {
            throw Error(ErrorCode::type_mismatch, "filter 'in' expects a list value");
        }
        for (const auto& v : rhs)
        {
            f.rhs.push_back(value_from_json(v));
        }
    }
    else
    {
        f.rhs.push_back(value_from_json(rhs));
    }
    return f;
}

static json filter_to_json(const FilterTransform& f)
{
    json j{{"field", f.field}, {"op", comparator_name(f.op)}};
    if (f.op == Comparator::in)
    {
        json list = json::array();
        for (const auto& v : f.rhs)
        {
            list.push_back(value_to_json(v));
        }
        j["value"] = list;
    }
    else
    {
        j["value"] = value_to_json(f.rhs.at(0));
    }
    return j;
}

static TransformDef transform_from_json(const json& j)
{
    if (j.contains("filter"))
    {
        return TransformDef{filter_from_json(j.at("filter"))};
    }
    if (j.contains("aggregate"))
    {
        const json& a = j.at("aggregate");
        AggregateTransform agg;
        agg.groupby = json_util::get_string_list(a, "groupby");
        for (const auto& m : json_util::require(a, "measures"))
        {
            Measure measure;
            measure.op = aggregate_op_from_name(json_util::require_string(m, "op"));
            measure.field = json_util::get_string(m, "field", "");
            measure.as = json_util::get_string(m, "as", std::string(aggregate_op_name(measure.op)) + "_" + measure.field);
            agg.measures.push_back(std::move(measure));
        }
        return TransformDef{std::move(agg)};
    }
    throw Error(ErrorCode::invalid_value, "transform must be 'filter' or 'aggregate': " + j.dump());
}

static json transform_to_json(const TransformDef& t)
{
    if (const auto* f = std::get_if<FilterTransform>(&t.op))
    {
        return json{{"filter", filter_to_json(*f)}};
    }
    const auto& agg = std::get<AggregateTransform>(t.op);
    json measures = json::array();
    for (const auto& m : agg.measures)
    {
        measures.push_back(json{{"field", m.field}, {"op", aggregate_op_name(m.op)}, {"as", m.as}});
    }
    return json{{"aggregate", json{{"groupby", agg.groupby}, {"measures", measures}}}};
}

static ScaleDef scale_from_json(const json& j)
{
    ScaleDef s;
    s.name = json_util::require_string(j, "name");
    s.kind = scale_kind_from_name(json_util::get_string(j, "type", "linear"));
    const json& domain = json_util::require(j, "domain");
    if (!domain.is_array())
    {
        throw Error(ErrorCode::type_mismatch, "scale '" + s.name + "' domain must be a list");
    }
    if (is_continuous(s.kind))
    {
        if (domain.size() != 2 || !domain[0].is_number() || !domain[1].is_number())
        {
            throw Error(ErrorCode::type_mismatch, "scale '" + s.name + "' needs a numeric [lo, hi] domain");
        }
        s.numeric_domain = {domain[0].get<double>(), domain[1].get<double>()};
    }
    else
    {
        for (const auto& v : domain)
        {
            s.categories.push_back(value_from_json(v));
        }
    }
    const json& range = json_util::require(j, "range");
    if (!range.is_array())
    {
        throw Error(ErrorCode::type_mismatch, "scale '" + s.name + "' range must be a list");
    }
    if (s.kind == ScaleKind::ordinal_color || s.kind == ScaleKind::ordinal_shape)
    {
        for (const auto& v : range)
        {
            if (!v.is_string())
            {
                throw Error(ErrorCode::type_mismatch, "scale '" + s.name + "' range entries must be strings");
            }
            s.palette.push_back(v.get<std::string>());
        }
    }
    else
    {
        if (range.size() != 2 || !range[0].is_number() || !range[1].is_number())
        {
            throw Error(ErrorCode::type_mismatch, "scale '" + s.name + "' needs a numeric [lo, hi] pixel range");
        }
        s.pixel_range = {range[0].get<double>(), range[1].get<double>()};
    }
    if (j.contains("domainSource"))
    {
        const json& src = j.at("domainSource");
        s.domain_source = DomainSource{json_util::require_string(src, "data"), json_util::require_string(src, "field")};
    }
    s.padding = json_util::get_number(j, "padding", 0.0);
    return s;
}

json scale_def_to_json(const ScaleDef& s)
{
    json j{{"name", s.name}, {"type", scale_kind_name(s.kind)}};
    if (is_continuous(s.kind))
    {
        j["domain"] = json::array({s.numeric_domain.first, s.numeric_domain.second});
    }
    else
    {
        json d = json::array();
        for (const auto& v : s.categories)
        {
            d.push_back(value_to_json(v));
        }
        j["domain"] = d;
    }
    if (s.kind == ScaleKind::ordinal_color || s.kind == ScaleKind::ordinal_shape)
    {
        j["range"] = s.palette;
    }
    else
    {
        j["range"] = json::array({s.pixel_range.first, s.pixel_range.second});
    }
    if (s.domain_source)
    {
        j["domainSource"] = json{{"data", s.domain_source->dataset}, {"field", s.domain_source->field}};
    }
    if (s.padding != 0.0)
    {
        j["padding"] = s.padding;
    }
    return j;
}

EncodingChannel encoding_from_json(const json& j)
{
    EncodingChannel c;
    if (j.contains("value"))
    {
        c.value = value_from_json(j.at("value"));
        return c;
    }
    c.field = json_util::require_string(j, "field");
    c.scale = json_util::get_string(j, "scale", "");
    return c;
}

json encoding_to_json(const EncodingChannel& c)
{
    if (c.value)
    {
        return json{{"value", value_to_json(*c.value)}};
    }
    json j{{"field", c.field}};
    if (!c.scale.empty())
    {
        j["scale"] = c.scale;
    }
    return j;
}

static MarkDef mark_from_json(const json& j)
{
    MarkDef m;
    m.name = json_util::require_string(j, "name");
    m.type = mark_type_from_name(json_util::require_string(j, "type"));
    m.dataset = json_util::require_string(j, "from");
    if (j.contains("encode"))
    {
        for (const auto& [channel, enc] : j.at("encode").items())
        {
            m.encodings.emplace(channel, encoding_from_json(enc));
        }
    }
    m.order_field = json_util::get_string(j, "order", "");
    return m;
}

static json mark_to_json(const MarkDef& m)
{
    json enc = json::object();
    for (const auto& [channel, c] : m.encodings)
    {
        enc[channel] = encoding_to_json(c);
    }
    json j{{"name", m.name}, {"type", mark_type_name(m.type)}, {"from", m.dataset}, {"encode", enc}};
    if (!m.order_field.empty())
    {
        j["order"] = m.order_field;
    }
    return j;
}

static AxisDef axis_from_json(const json& j)
{
    AxisDef a;
    a.name = json_util::require_string(j, "name");
    const std::string orient = json_util::require_string(j, "orient");
    if (orient == "x")
    {
        a.orient = AxisOrient::x;
    }
    else if (orient == "y")
    {
        a.orient = AxisOrient::y;
    }
    else
    {
        throw Error(ErrorCode::invalid_value, "axis orient must be x or y, got '" + orient + "'");
    }
    a.scale = json_util::require_string(j, "scale");
    a.title = json_util::get_string(j, "title", "");
    a.tick_count = static_cast<int>(json_util::get_number(j, "tickCount", 5));
    if (j.contains("parts"))
    {
        const json& p = j.at("parts");
        a.parts.domain = json_util::get_bool(p, "domain", a.parts.domain);
        a.parts.ticks = json_util::get_bool(p, "ticks", a.parts.ticks);
        a.parts.labels = json_util::get_bool(p, "labels", a.parts.labels);
        a.parts.grid = json_util::get_bool(p, "grid", a.parts.grid);
        a.parts.title = json_util::get_bool(p, "title", a.parts.title);
    }
    return a;
}

static json axis_to_json(const AxisDef& a)
{
    return json{{"name", a.name},
                {"orient", a.orient == AxisOrient::x ? "x" : "y"},
                {"scale", a.scale},
                {"title", a.title},
                {"tickCount", a.tick_count},
                {"parts",
                 {{"domain", a.parts.domain},
                  {"ticks", a.parts.ticks},
                  {"labels", a.parts.labels},
                  {"grid", a.parts.grid},
                  {"title", a.parts.title}}}};
}

static LegendDef legend_from_json(const json& j)
{
    LegendDef l;
    l.name = json_util::require_string(j, "name");
    l.channel = json_util::get_string(j, "channel", "color");
    l.scale = json_util::require_string(j, "scale");
    l.title = json_util::get_string(j, "title", "");
    if (j.contains("parts"))
    {
        const json& p = j.at("parts");
        l.parts.symbols = json_util::get_bool(p, "symbols", true);
        l.parts.labels = json_util::get_bool(p, "labels", true);
        l.parts.title = json_util::get_bool(p, "title", true);
    }
    return l;
}

static json legend_to_json(const LegendDef& l)
{
    return json{{"name", l.name},
                {"channel", l.channel},
                {"scale", l.scale},
                {"title", l.title},
                {"parts", {{"symbols", l.parts.symbols}, {"labels", l.parts.labels}, {"title", l.parts.title}}}};
}

ChartSpec chart_from_json(const json& doc)
{
    if (!doc.is_object())
    {
        throw Error(ErrorCode::syntax, "chart document must be an object");
    }
    json_util::check_version(doc, chart_schema_version);
    ChartSpec chart;
    chart.width = json_util::require_number(doc, "width");
    chart.height = json_util::require_number(doc, "height");
    if (doc.contains("data"))
    {
        for (const auto& d : doc.at("data"))
        {
            DatasetDef ds;
            ds.name = json_util::require_string(d, "name");
            if (d.contains("values"))
            {
                for (const auto& r : d.at("values"))
                {
                    ds.rows.push_back(row_from_json(r));
                }
            }
            if (d.contains("transform"))
            {
                for (const auto& t : d.at("transform"))
                {
                    ds.transforms.push_back(transform_from_json(t));
                }
            }
            chart.datasets.push_back(std::move(ds));
        }
    }
    for (const auto& s : json_util::get_array(doc, "scales"))
    {
        chart.scales.push_back(scale_from_json(s));
    }
    for (const auto& m : json_util::get_array(doc, "marks"))
    {
        chart.marks.push_back(mark_from_json(m));
    }
    for (const auto& a : json_util::get_array(doc, "axes"))
    {
        chart.axes.push_back(axis_from_json(a));
    }
    for (const auto& l : json_util::get_array(doc, "legends"))
    {
        chart.legends.push_back(legend_from_json(l));
    }
    if (doc.contains("signals"))
    {
        for (const auto& [name, value] : doc.at("signals").items())
        {
            if (name != "width" && name != "height")
            {
                throw Error(ErrorCode::invalid_value, "only width and height signals are supported, got '" + name + "'");
            }
            if (!value.is_number())
            {
                throw Error(ErrorCode::type_mismatch, "signal '" + name + "' must be a number");
            }
            (name == "width" ? chart.width : chart.height) = value.get<double>();
        }
    }
    validate_chart(chart);
    return chart;
}

ChartSpec parse_chart(std::string_view text) { return chart_from_json(json_util::parse_document(text)); }

json chart_to_json(const ChartSpec& chart)
{
    json data = json::array();
    for (const auto& ds : chart.datasets)
    {
        json rows = json::array();
        for (const auto& r : ds.rows)
        {
            rows.push_back(row_to_json(r));
        }
        json transforms = json::array();
        for (const auto& t : ds.transforms)
        {
            transforms.push_back(transform_to_json(t));
        }
        data.push_back(json{{"name", ds.name}, {"values", rows}, {"transform", transforms}});
    }
    json scales = json::array();
    for (const auto& s : chart.scales)
    {
        scales.push_back(scale_def_to_json(s));
    }
    json marks = json::array();
    for (const auto& m : chart.marks)
    {
        marks.push_back(mark_to_json(m));
    }
    json axes = json::array();
    for (const auto& a : chart.axes)
    {
        axes.push_back(axis_to_json(a));
    }
    json legends = json::array();
    for (const auto& l : chart.legends)
    {
        legends.push_back(legend_to_json(l));
    }
    return json{{"version", chart_schema_version},
                {"width", chart.width},
                {"height", chart.height},
                {"data", data},
                {"scales", scales},
                {"marks", marks},
                {"axes", axes},
                {"legends", legends}};
}

std::string serialize_chart(const ChartSpec& chart) { return chart_to_json(chart).dump(2); }

// ---------------------------------------------------------------------------------------------------
// Validation

static std::set<std::string> schema_of(const std::vector<Row>& rows)
{
    std::set<std::string> fields;
    if (!rows.empty())
    {
        for (const auto& [k, v] : rows.front())
        {
            fields.insert(k);
        }
    }
    return fields;
}

static bool scale_fits_channel(ScaleKind kind, std::string_view channel)
{
    if (channel == "color")
    {
        return kind == ScaleKind::ordinal_color;
    }
    if (channel == "shape")
    {
        return kind == ScaleKind::ordinal_shape;
    }
    if (channel == "size" || channel == "opacity")
    {
        return kind == ScaleKind::linear;
    }
    if (channel == "text")
    {
        return false;
    }
    return kind == ScaleKind::linear || kind == ScaleKind::time || kind == ScaleKind::band || kind == ScaleKind::point;
}

void validate_chart(const ChartSpec& chart)
{
    if (!(chart.width > 0.0) || !(chart.height > 0.0) || !std::isfinite(chart.width) || !std::isfinite(chart.height))
    {
        throw Error(ErrorCode::invalid_value, "chart width and height must be positive");
    }

    auto check_unique = [](const auto& items, const char* what) {
        std::set<std::string> seen;
        for (const auto& item : items)
        {
            if (!seen.insert(item.name).second)
            {
                throw Error(ErrorCode::duplicate_name, std::string("duplicate ") + what + " name '" + item.name + "'");
            }
        }
    };
    check_unique(chart.datasets, "dataset");
    check_unique(chart.scales, "scale");

    std::set<std::string> components{"view"};
    auto claim = [&](const std::string& name) {
        if (name.empty() || name == "pause" || !components.insert(name).second)
        {
            throw Error(ErrorCode::duplicate_name, "duplicate or reserved component name '" + name + "'");
        }
    };
    for (const auto& m : chart.marks) claim(m.name);
    for (const auto& a : chart.axes) claim(a.name);
    for (const auto& l : chart.legends) claim(l.name);

    for (const auto& ds : chart.datasets)
    {
        const auto fields = schema_of(ds.rows);
        for (const auto& r : ds.rows)
        {
            if (schema_of({r}) != fields)
            {
                throw Error(ErrorCode::invalid_value, "rows of dataset '" + ds.name + "' do not share one field set");
            }
        }
        // Transforms are checked by running them.
        (void)apply_transforms(ds);
    }

    for (const auto& s : chart.scales)
    {
        if (is_continuous(s.kind))
        {
            if (!std::isfinite(s.numeric_domain.first) || !std::isfinite(s.numeric_domain.second) ||
                s.numeric_domain.first > s.numeric_domain.second)
            {
                throw Error(ErrorCode::invalid_value, "scale '" + s.name + "' domain must satisfy lo <= hi");
            }
        }
        else
        {
            if (s.categories.empty())
            {
                throw Error(ErrorCode::invalid_value, "scale '" + s.name + "' has an empty domain");
            }
            std::vector<Value> sorted = s.categories;
            std::sort(sorted.begin(), sorted.end(), value_less);
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            {
                throw Error(ErrorCode::invalid_value, "scale '" + s.name + "' domain has duplicates");
            }
        }
        if ((s.kind == ScaleKind::ordinal_color || s.kind == ScaleKind::ordinal_shape) && s.palette.empty())
        {
            throw Error(ErrorCode::invalid_value, "scale '" + s.name + "' has an empty range");
        }
        if (s.padding < 0.0 || s.padding >= 1.0)
        {
            throw Error(ErrorCode::invalid_value, "scale '" + s.name + "' padding must be in [0, 1)");
        }
        if (s.domain_source)
        {
            const DatasetDef* ds = chart.find_dataset(s.domain_source->dataset);
            if (ds == nullptr)
            {
                throw Error(ErrorCode::dangling_reference,
                            "scale '" + s.name + "' domainSource references unknown dataset '" + s.domain_source->dataset + "'");
            }
        }
    }

    for (const auto& m : chart.marks)
    {
        const DatasetDef* ds = chart.find_dataset(m.dataset);
        if (ds == nullptr)
        {
            throw Error(ErrorCode::dangling_reference, "mark '" + m.name + "' references unknown dataset '" + m.dataset + "'");
        }
        const auto fields = schema_of(apply_transforms(*ds));
        for (const auto& [channel, enc] : m.encodings)
        {
            if (!channel_allowed(m.type, channel))
            {
                throw Error(ErrorCode::illegal_channel, "channel '" + channel + "' is not legal for " +
                                                            mark_type_name(m.type) + " mark '" + m.name + "'");
            }
            if (enc.is_constant())
            {
                continue;
            }
            if (enc.scale.empty())
            {
                if (channel != "text")
                {
                    throw Error(ErrorCode::dangling_reference,
                                "mark '" + m.name + "' channel '" + channel + "' needs a scale");
                }
                if (!fields.empty() && !fields.contains(enc.field))
                {
                    throw Error(ErrorCode::unknown_field, "mark '" + m.name + "' channel '" + channel +
                                                              "' references unknown field '" + enc.field + "'");
                }
                continue;
            }
            const ScaleDef* scale = chart.find_scale(enc.scale);
            if (scale == nullptr)
            {
                throw Error(ErrorCode::dangling_reference,
                            "mark '" + m.name + "' channel '" + channel + "' references unknown scale '" + enc.scale + "'");
            }
            if (!scale_fits_channel(scale->kind, channel))
            {
                throw Error(ErrorCode::illegal_channel, "scale '" + scale->name + "' of type " + scale_kind_name(scale->kind) +
                                                            " cannot drive channel '" + channel + "'");
            }
            if (!fields.empty() && !fields.contains(enc.field))
            {
                throw Error(ErrorCode::unknown_field,
                            "mark '" + m.name + "' channel '" + channel + "' references unknown field '" + enc.field + "'");
            }
        }
        if (!m.order_field.empty() && !fields.empty() && !fields.contains(m.order_field))
        {
            throw Error(ErrorCode::unknown_field, "mark '" + m.name + "' order field '" + m.order_field + "' is unknown");
        }
    }

    for (const auto& a : chart.axes)
    {
        const ScaleDef* scale = chart.find_scale(a.scale);
        if (scale == nullptr)
        {
            throw Error(ErrorCode::dangling_reference, "axis '" + a.name + "' references unknown scale '" + a.scale + "'");
        }
        if (!scale_fits_channel(scale->kind, "x"))
        {
            throw Error(ErrorCode::illegal_channel, "axis '" + a.name + "' needs a positional scale");
        }
        if (a.tick_count < 2)
        {
            throw Error(ErrorCode::invalid_value, "axis '" + a.name + "' tickCount must be at least 2");
        }
    }

    for (const auto& l : chart.legends)
    {
        if (l.channel != "color" && l.channel != "size" && l.channel != "shape")
        {
            throw Error(ErrorCode::invalid_value, "legend '" + l.name + "' channel must be color, size or shape");
        }
        const ScaleDef* scale = chart.find_scale(l.scale);
        if (scale == nullptr)
        {
            throw Error(ErrorCode::dangling_reference, "legend '" + l.name + "' references unknown scale '" + l.scale + "'");
        }
        if (!scale_fits_channel(scale->kind, l.channel))
        {
            throw Error(ErrorCode::illegal_channel,
                        "legend '" + l.name + "' scale kind does not match channel '" + l.channel + "'");
        }
    }
}

// ---------------------------------------------------------------------------------------------------
// Transforms

static void require_field(const std::set<std::string>& schema, const std::string& field, const std::string& dataset)
{
    if (!schema.empty() && !schema.contains(field))
    {
        throw Error(ErrorCode::unknown_field, "dataset '" + dataset + "' has no field '" + field + "'");
    }
}

static std::vector<Row> run_filter(const std::vector<Row>& rows, const FilterTransform& f, const std::string& dataset)
{
    require_field(schema_of(rows), f.field, dataset);
    std::vector<Row> out;
    for (const auto& r : rows)
    {
        const Value& lhs = r.at(f.field);
        bool keep = false;
        if (f.op == Comparator::in)
        {
            keep = std::find(f.rhs.begin(), f.rhs.end(), lhs) != f.rhs.end();
        }
        else
        {
            keep = compare_values(lhs, f.op, f.rhs.at(0));
        }
        if (keep)
        {
            out.push_back(r);
        }
    }
    return out;
}

static std::vector<Row> run_aggregate(const std::vector<Row>& rows, const AggregateTransform& agg, const std::string& dataset)
{
    const auto schema = schema_of(rows);
    for (const auto& g : agg.groupby)
    {
        require_field(schema, g, dataset);
    }
    for (const auto& m : agg.measures)
    {
        if (m.op != AggregateOp::count || !m.field.empty())
        {
            require_field(schema, m.field, dataset);
        }
    }

    std::vector<Row> keys;
    std::vector<std::vector<const Row*>> groups;
    for (const auto& r : rows)
    {
        Row key;
        for (const auto& g : agg.groupby)
        {
            key.emplace(g, r.at(g));
        }
        auto it = std::find(keys.begin(), keys.end(), key);
        if (it == keys.end())
        {
            keys.push_back(key);
            groups.emplace_back();
            it = keys.end() - 1;
        }
        groups[static_cast<std::size_t>(it - keys.begin())].push_back(&r);
    }

    std::vector<Row> out;
    for (std::size_t i = 0; i < keys.size(); ++i)
    {
        Row row = keys[i];
        for (const auto& m : agg.measures)
        {
            if (m.op == AggregateOp::count)
            {
                row[m.as] = static_cast<double>(groups[i].size());
                continue;
            }
            double acc = 0.0;
            bool first = true;
            for (const Row* r : groups[i])
            {
                const Value& v = r->at(m.field);
                if (!is_number(v))
                {
                    throw Error(ErrorCode::type_mismatch, std::string(aggregate_op_name(m.op)) + " over non-numeric field '" +
                                                              m.field + "' in dataset '" + dataset + "'");
                }
                const double x = as_number(v);
                switch (m.op)
                {
                    case AggregateOp::mean:
                    case AggregateOp::sum: acc += x; break;
                    case AggregateOp::min: acc = first ? x : std::min(acc, x); break;
                    case AggregateOp::max: acc = first ? x : std::max(acc, x); break;
                    default: break;
                }
                first = false;
            }
            if (m.op == AggregateOp::mean)
            {
                acc /= static_cast<double>(groups[i].size());
            }
            row[m.as] = acc;
        }
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<Row> apply_transforms(const DatasetDef& dataset)
{
    std::vector<Row> rows = dataset.rows;
    for (const auto& t : dataset.transforms)
    {
        if (const auto* f = std::get_if<FilterTransform>(&t.op))
        {
            rows = run_filter(rows, *f, dataset.name);
        }
        else
        {
            rows = run_aggregate(rows, std::get<AggregateTransform>(t.op), dataset.name);
        }
    }
    return rows;
}

std::vector<std::string> grouping_fields(const DatasetDef& dataset)
{
    for (auto it = dataset.transforms.rbegin(); it != dataset.transforms.rend(); ++it)
    {
        if (const auto* agg = std::get_if<AggregateTransform>(&it->op))
        {
            return agg->groupby;
        }
    }
    return {};
}

}  // namespace stagecraft
