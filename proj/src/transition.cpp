#include "stagecraft/transition.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "stagecraft/error.hpp"
#include "stagecraft/json_util.hpp"
#include "stagecraft/scene.hpp"
#include "stagecraft/schedule.hpp"

namespace stagecraft
{

using nlohmann::json;

bool Selection::includes(std::string_view name) const
{
    switch (mode)
    {
        case Mode::all: return true;
        case Mode::none: return false;
        case Mode::list: return std::find(names.begin(), names.end(), name) != names.end();
    }
    return false;
}

bool Sync::operator==(const Sync& other) const { return blocks == other.blocks && at == other.at; }

bool Concat::operator==(const Concat& other) const
{
    return blocks == other.blocks && enumerator == other.enumerator && auto_scale_order == other.auto_scale_order;
}

bool Block::operator==(const Block& other) const
{
    return node == other.node && fit_ms == other.fit_ms && binding == other.binding;
}

const StaggeringSpec* TransitionSpec::find_staggering(std::string_view name) const
{
    for (const auto& s : staggerings)
    {
        if (s.name == name)
        {
            return &s;
        }
    }
    return nullptr;
}

namespace
{

const std::vector<std::string> axis_parts{"domain", "ticks", "labels", "grid", "title"};
const std::vector<std::string> legend_parts{"symbols", "labels", "title"};

bool is_guide(ComponentKind kind) { return kind == ComponentKind::axis || kind == ComponentKind::legend; }

// ---------------------------------------------------------------------------------------------------
// Reading

ComponentRef component_from_json(const json& j)
{
    if (j.is_string())
    {
        const auto s = j.get<std::string>();
        if (s == "view")
        {
            return view_component;
        }
        if (s == "pause")
        {
            return {ComponentKind::pause, "pause"};
        }
        throw Error(ErrorCode::invalid_value, "component must be \"view\", \"pause\" or an object, got \"" + s + "\"");
    }
    if (j.is_object() && j.size() == 1)
    {
        const auto& [kind, name] = *j.items().begin();
        if (!name.is_string())
        {
            throw Error(ErrorCode::type_mismatch, "component name must be a string");
        }
        if (kind == "mark") return {ComponentKind::mark, name.get<std::string>()};
        if (kind == "axis") return {ComponentKind::axis, name.get<std::string>()};
        if (kind == "legend") return {ComponentKind::legend, name.get<std::string>()};
    }
    throw Error(ErrorCode::invalid_value, "bad component selector " + j.dump());
}

json component_to_json(const ComponentRef& ref)
{
    if (ref.kind == ComponentKind::view || ref.kind == ComponentKind::pause)
    {
        return component_kind_name(ref.kind);
    }
    return json{{component_kind_name(ref.kind), ref.name}};
}

Selection selection_from_json(const json& j, const char* what)
{
    Selection s;
    if (j.is_boolean())
    {
        s.mode = j.get<bool>() ? Selection::Mode::all : Selection::Mode::none;
        return s;
    }
    s.mode = Selection::Mode::list;
    s.names = json_util::as_string_list(j, what);
    return s;
}

json selection_to_json(const Selection& s)
{
    switch (s.mode)
    {
        case Selection::Mode::all: return true;
        case Selection::Mode::none: return false;
        case Selection::Mode::list: return s.names;
    }
    return true;
}

TimeValue time_from_json(const json& j, const char* what)
{
    if (j.is_number())
    {
        return TimeValue::ms(j.get<double>());
    }
    if (j.is_object() && j.contains("ratio") && j.at("ratio").is_number())
    {
        return TimeValue::ratio(j.at("ratio").get<double>());
    }
    throw Error(ErrorCode::type_mismatch, std::string(what) + " must be milliseconds or {\"ratio\": r}");
}

json time_to_json(const TimeValue& t)
{
    if (t.is_ratio)
    {
        return json{{"ratio", t.value}};
    }
    return t.value;
}

Ease ease_from_json(const json& j)
{
    if (!j.is_string())
    {
        throw Error(ErrorCode::type_mismatch, "ease must be a name");
    }
    const auto e = ease_from_name(j.get<std::string>());
    if (!e)
    {
        throw Error(ErrorCode::unknown_ease, "unknown ease '" + j.get<std::string>() + "'");
    }
    return *e;
}

DataChange data_from_json(const json& j)
{
    DataChange d;
    if (j.is_boolean())
    {
        d.apply = j.get<bool>();
        return d;
    }
    if (j.is_array())
    {
        d.keys = json_util::as_string_list(j, "data keys");
        return d;
    }
    if (!j.is_object())
    {
        throw Error(ErrorCode::type_mismatch, "change.data must be a boolean, key list or object");
    }
    d.keys = json_util::get_string_list(j, "keys");
    d.enter = json_util::get_bool(j, "enter", true);
    d.exit = json_util::get_bool(j, "exit", true);
    d.update = json_util::get_bool(j, "update", true);
    d.enter_from_initial = json_util::get_bool(j, "enterFromInitialEncoding", false);
    return d;
}

json data_to_json(const DataChange& d)
{
    if (!d.apply)
    {
        return false;
    }
    if (d.enter && d.exit && d.update && !d.enter_from_initial)
    {
        return d.keys.empty() ? json(true) : json(d.keys);
    }
    return json{{"keys", d.keys},
                {"enter", d.enter},
                {"exit", d.exit},
                {"update", d.update},
                {"enterFromInitialEncoding", d.enter_from_initial}};
}

EncodeChange encode_from_json(const json& j, ComponentKind kind)
{
    EncodeChange e;
    if (j.is_boolean())
    {
        e.mode = j.get<bool>() ? EncodeChange::Mode::all : EncodeChange::Mode::none;
        return e;
    }
    if (j.is_array())
    {
        e.mode = EncodeChange::Mode::channels;
        e.channels = json_util::as_string_list(j, "change.encode");
        return e;
    }
    if (!j.is_object())
    {
        throw Error(ErrorCode::type_mismatch, "change.encode must be a boolean, list or object");
    }
    e.mode = EncodeChange::Mode::explicit_encoding;
    for (const auto& [key, value] : j.items())
    {
        if (kind == ComponentKind::mark)
        {
            if (value.is_null())
            {
                e.mark_channels[key] = std::nullopt;
            }
            else
            {
                e.mark_channels[key] = encoding_from_json(value);
            }
        }
        else if (key == "titleText")
        {
            if (!value.is_string())
            {
                throw Error(ErrorCode::type_mismatch, "titleText must be a string");
            }
            e.guide.title = value.get<std::string>();
        }
        else
        {
            if (!value.is_boolean())
            {
                throw Error(ErrorCode::type_mismatch, "guide part '" + key + "' must be a boolean");
            }
            e.guide.parts[key] = value.get<bool>();
        }
    }
    return e;
}

json encode_to_json(const EncodeChange& e, ComponentKind kind)
{
    switch (e.mode)
    {
        case EncodeChange::Mode::all: return true;
        case EncodeChange::Mode::none: return false;
        case EncodeChange::Mode::channels: return e.channels;
        case EncodeChange::Mode::explicit_encoding: break;
    }
    json j = json::object();
    if (kind == ComponentKind::mark)
    {
        for (const auto& [ch, enc] : e.mark_channels)
        {
            j[ch] = enc ? encoding_to_json(*enc) : json(nullptr);
        }
        return j;
    }
    for (const auto& [part, on] : e.guide.parts)
    {
        j[part] = on;
    }
    if (e.guide.title)
    {
        j["titleText"] = *e.guide.title;
    }
    return j;
}

DomainDimension dimension_from_name(const std::string& s)
{
    if (s == "same") return DomainDimension::same;
    if (s == "different") return DomainDimension::different;
    throw Error(ErrorCode::invalid_value, "domainDimension must be same or different, got '" + s + "'");
}

ScaleChange scale_from_json(const json& j)
{
    ScaleChange s;
    if (j.is_object())
    {
        if (j.contains("select"))
        {
            s.selection = selection_from_json(j.at("select"), "change.scale.select");
        }
        if (j.contains("domainDimension"))
        {
            s.dimension = dimension_from_name(json_util::require_string(j, "domainDimension"));
        }
        return s;
    }
    s.selection = selection_from_json(j, "change.scale");
    return s;
}

json scale_to_json(const ScaleChange& s)
{
    if (!s.dimension)
    {
        return selection_to_json(s.selection);
    }
    return json{{"select", selection_to_json(s.selection)},
                {"domainDimension", *s.dimension == DomainDimension::same ? "same" : "different"}};
}

ChangeSpec change_from_json(const json& j, ComponentKind kind)
{
    ChangeSpec c;
    if (!j.is_object())
    {
        throw Error(ErrorCode::type_mismatch, "change must be an object");
    }
    for (const auto& [key, value] : j.items())
    {
        if (key == "data") c.data = data_from_json(value);
        else if (key == "encode") c.encode = encode_from_json(value, kind);
        else if (key == "scale") c.scale = scale_from_json(value);
        else if (key == "signal") c.signal = selection_from_json(value, "change.signal");
        else if (key == "markType")
        {
            if (!value.is_boolean())
            {
                throw Error(ErrorCode::type_mismatch, "change.markType must be a boolean");
            }
            c.mark_type = value.get<bool>();
        }
        else
        {
            throw Error(ErrorCode::invalid_value, "unknown change entry '" + key + "'");
        }
    }
    return c;
}

json change_to_json(const ChangeSpec& c, ComponentKind kind)
{
    return json{{"data", data_to_json(c.data)},
                {"encode", encode_to_json(c.encode, kind)},
                {"scale", scale_to_json(c.scale)},
                {"signal", selection_to_json(c.signal)},
                {"markType", c.mark_type}};
}

TimingSpec timing_from_json(const json& j)
{
    TimingSpec t;
    if (!j.is_object())
    {
        throw Error(ErrorCode::type_mismatch, "timing must be an object");
    }
    if (j.contains("duration")) t.duration = time_from_json(j.at("duration"), "duration");
    if (j.contains("delay")) t.delay = time_from_json(j.at("delay"), "delay");
    if (j.contains("ease")) t.ease = ease_from_json(j.at("ease"));
    t.staggering = json_util::get_string(j, "staggering", "");

    auto check = [](const TimeValue& v, const char* what, bool allow_zero) {
        if (v.is_ratio)
        {
            if (!(v.value > 0.0 && v.value <= 1.0) && !(allow_zero && v.value == 0.0))
            {
                throw Error(ErrorCode::invalid_value, std::string(what) + " ratio must be in (0, 1]");
            }
        }
        else if (!(allow_zero ? v.value >= 0.0 : v.value > 0.0) || !std::isfinite(v.value))
        {
            throw Error(ErrorCode::invalid_value, std::string(what) + (allow_zero ? " must be >= 0" : " must be > 0"));
        }
    };
    check(t.duration, "duration", false);
    check(t.delay, "delay", true);
    return t;
}

json timing_to_json(const TimingSpec& t)
{
    json j{{"duration", time_to_json(t.duration)}, {"delay", time_to_json(t.delay)}, {"ease", ease_name(t.ease)}};
    if (!t.staggering.empty())
    {
        j["staggering"] = t.staggering;
    }
    return j;
}

EnumeratorSpec enumerator_from_json(const json& j)
{
    EnumeratorSpec e;
    const json& f = json_util::require(j, "filter");
    e.filter.field = json_util::require_string(f, "field");
    e.filter.op = comparator_from_name(json_util::get_string(f, "op", "<="));
    e.filter.dataset = json_util::get_string(f, "data", "");
    const bool has_values = j.contains("values");
    const bool has_step = j.contains("stepSize");
    if (has_values == has_step)
    {
        throw Error(ErrorCode::invalid_value, "enumerator needs exactly one of values or stepSize");
    }
    if (has_values)
    {
        const json& vs = j.at("values");
        if (!vs.is_array() || vs.empty())
        {
            throw Error(ErrorCode::invalid_value, "enumerator values must be a non-empty list");
        }
        for (const auto& v : vs)
        {
            e.values.push_back(value_from_json(v));
        }
    }
    else
    {
        e.step_size = json_util::require_number(j, "stepSize");
        if (*e.step_size == 0.0)
        {
            throw Error(ErrorCode::invalid_value, "enumerator stepSize must be non-zero");
        }
    }
    return e;
}

json enumerator_to_json(const EnumeratorSpec& e)
{
    json filter{{"field", e.filter.field}, {"op", comparator_name(e.filter.op)}};
    if (!e.filter.dataset.empty())
    {
        filter["data"] = e.filter.dataset;
    }
    json j{{"filter", filter}};
    if (e.step_size)
    {
        j["stepSize"] = *e.step_size;
    }
    else
    {
        json vs = json::array();
        for (const auto& v : e.values)
        {
            vs.push_back(value_to_json(v));
        }
        j["values"] = vs;
    }
    return j;
}

Step step_from_json(const json& j)
{
    Step s;
    s.component = component_from_json(json_util::require(j, "component"));
    if (j.contains("change"))
    {
        if (s.component.kind == ComponentKind::pause)
        {
            throw Error(ErrorCode::invalid_value, "pause steps carry no change");
        }
        s.change = change_from_json(j.at("change"), s.component.kind);
    }
    if (j.contains("timing"))
    {
        s.timing = timing_from_json(j.at("timing"));
    }
    if (j.contains("enumerator"))
    {
        s.enumerator = enumerator_from_json(j.at("enumerator"));
    }
    return s;
}

json step_to_json(const Step& s)
{
    json j{{"component", component_to_json(s.component)}, {"timing", timing_to_json(s.timing)}};
    if (s.component.kind != ComponentKind::pause)
    {
        j["change"] = change_to_json(s.change, s.component.kind);
    }
    if (s.enumerator)
    {
        j["enumerator"] = enumerator_to_json(*s.enumerator);
    }
    return j;
}

std::vector<Block> blocks_from_json(const json& j, const char* what);

Block block_from_json(const json& j)
{
    if (!j.is_object())
    {
        throw Error(ErrorCode::type_mismatch, "timeline block must be an object");
    }
    if (j.contains("sync"))
    {
        Sync s;
        s.blocks = blocks_from_json(j.at("sync"), "sync");
        const std::string at = json_util::get_string(j, "at", "start");
        if (at == "start")
        {
            s.at = SyncAt::start;
        }
        else if (at == "end")
        {
            s.at = SyncAt::end;
        }
        else
        {
            throw Error(ErrorCode::invalid_value, "sync.at must be start or end, got '" + at + "'");
        }
        return Block{std::move(s)};
    }
    if (j.contains("concat"))
    {
        Concat c;
        c.blocks = blocks_from_json(j.at("concat"), "concat");
        if (j.contains("enumerator"))
        {
            c.enumerator = enumerator_from_json(j.at("enumerator"));
        }
        c.auto_scale_order = json_util::get_string_list(j, "autoScaleOrder");
        return Block{std::move(c)};
    }
    return Block{step_from_json(j)};
}

std::vector<Block> blocks_from_json(const json& j, const char* what)
{
    if (!j.is_array() || j.empty())
    {
        throw Error(ErrorCode::invalid_value, std::string(what) + " needs a non-empty block list");
    }
    std::vector<Block> out;
    for (const auto& b : j)
    {
        out.push_back(block_from_json(b));
    }
    return out;
}

json block_to_json(const Block& b)
{
    json j;
    if (const auto* step = std::get_if<Step>(&b.node))
    {
        j = step_to_json(*step);
    }
    else if (const auto* sync = std::get_if<Sync>(&b.node))
    {
        json children = json::array();
        for (const auto& c : sync->blocks)
        {
            children.push_back(block_to_json(c));
        }
        j = json{{"sync", children}, {"at", sync->at == SyncAt::start ? "start" : "end"}};
    }
    else
    {
        const auto& concat = std::get<Concat>(b.node);
        json children = json::array();
        for (const auto& c : concat.blocks)
        {
            children.push_back(block_to_json(c));
        }
        j = json{{"concat", children}};
        if (concat.enumerator)
        {
            j["enumerator"] = enumerator_to_json(*concat.enumerator);
        }
        if (!concat.auto_scale_order.empty())
        {
            j["autoScaleOrder"] = concat.auto_scale_order;
        }
    }
    return j;
}

StaggeringSpec staggering_from_json(const json& j)
{
    StaggeringSpec s;
    s.name = json_util::require_string(j, "name");
    s.field = json_util::require_string(j, "by");
    if (j.contains("order"))
    {
        const json& o = j.at("order");
        if (o.is_array())
        {
            s.order = StaggeringSpec::Order::explicit_list;
            for (const auto& v : o)
            {
                s.explicit_order.push_back(value_from_json(v));
            }
        }
        else if (o == "ascending")
        {
            s.order = StaggeringSpec::Order::ascending;
        }
        else if (o == "descending")
        {
            s.order = StaggeringSpec::Order::descending;
        }
        else
        {
            throw Error(ErrorCode::invalid_value, "staggering order must be ascending, descending or a value list");
        }
    }
    s.overlap = json_util::get_number(j, "overlap", 0.0);
    if (!(s.overlap >= 0.0 && s.overlap <= 1.0))
    {
        throw Error(ErrorCode::invalid_value,
                    "staggering '" + s.name + "' overlap " + format_number(s.overlap) + " is outside [0, 1]");
    }
    s.ease = Ease::linear;
    if (j.contains("ease"))
    {
        s.ease = ease_from_json(j.at("ease"));
    }
    s.nested = json_util::get_string(j, "staggering", "");
    return s;
}

json staggering_to_json(const StaggeringSpec& s)
{
    json j{{"name", s.name}, {"by", s.field}, {"overlap", s.overlap}, {"ease", ease_name(s.ease)}};
    switch (s.order)
    {
        case StaggeringSpec::Order::ascending: j["order"] = "ascending"; break;
        case StaggeringSpec::Order::descending: j["order"] = "descending"; break;
        case StaggeringSpec::Order::explicit_list:
        {
            json vs = json::array();
            for (const auto& v : s.explicit_order)
            {
                vs.push_back(value_to_json(v));
            }
            j["order"] = vs;
            break;
        }
    }
    if (!s.nested.empty())
    {
        j["staggering"] = s.nested;
    }
    return j;
}

void walk(const Block& block, std::vector<std::size_t>& path,
          const std::function<void(const Step&, const std::vector<std::size_t>&)>& fn)
{
    if (const auto* step = std::get_if<Step>(&block.node))
    {
        fn(*step, path);
        return;
    }
    const auto& children = std::holds_alternative<Sync>(block.node) ? std::get<Sync>(block.node).blocks
                                                                     : std::get<Concat>(block.node).blocks;
    for (std::size_t i = 0; i < children.size(); ++i)
    {
        path.push_back(i);
        walk(children[i], path, fn);
        path.pop_back();
    }
}

void check_staggerings(const TransitionSpec& spec)
{
    std::set<std::string> names;
    for (const auto& s : spec.staggerings)
    {
        if (!names.insert(s.name).second)
        {
            throw Error(ErrorCode::duplicate_name, "duplicate staggering '" + s.name + "'");
        }
    }
    for (const auto& s : spec.staggerings)
    {
        std::set<std::string> seen{s.name};
        const StaggeringSpec* cur = &s;
        while (!cur->nested.empty())
        {
            const StaggeringSpec* next = spec.find_staggering(cur->nested);
            if (next == nullptr)
            {
                throw Error(ErrorCode::dangling_reference, "staggering '" + cur->name + "' nests unknown staggering '" +
                                                               cur->nested + "'");
            }
            if (!seen.insert(next->name).second)
            {
                throw Error(ErrorCode::invalid_value, "staggering '" + s.name + "' nests itself");
            }
            cur = next;
        }
    }
    for_each_step(spec.timeline, [&](const Step& step, const std::vector<std::size_t>&) {
        if (!step.timing.staggering.empty() && spec.find_staggering(step.timing.staggering) == nullptr)
        {
            throw Error(ErrorCode::dangling_reference, "step on " + component_label(step.component) +
                                                           " references unknown staggering '" + step.timing.staggering + "'");
        }
    });
}

}  // namespace

void for_each_step(const Block& block, const std::function<void(const Step&, const std::vector<std::size_t>&)>& fn)
{
    std::vector<std::size_t> path;
    walk(block, path, fn);
}

TransitionSpec transition_from_json(const json& doc)
{
    if (!doc.is_object())
    {
        throw Error(ErrorCode::syntax, "transition document must be an object");
    }
    json_util::check_version(doc, transition_schema_version);
    TransitionSpec spec;
    if (doc.contains("totalDuration"))
    {
        spec.total_duration = json_util::require_number(doc, "totalDuration");
        if (!(*spec.total_duration > 0.0))
        {
            throw Error(ErrorCode::invalid_value, "totalDuration must be > 0");
        }
    }
    for (const auto& s : json_util::get_array(doc, "staggerings"))
    {
        spec.staggerings.push_back(staggering_from_json(s));
    }
    spec.timeline = block_from_json(json_util::require(doc, "timeline"));
    check_staggerings(spec);
    return spec;
}

TransitionSpec parse_transition(std::string_view text) { return transition_from_json(json_util::parse_document(text)); }

json transition_to_json(const TransitionSpec& spec)
{
    json staggerings = json::array();
    for (const auto& s : spec.staggerings)
    {
        staggerings.push_back(staggering_to_json(s));
    }
    json j{{"version", transition_schema_version}, {"staggerings", staggerings}, {"timeline", block_to_json(spec.timeline)}};
    if (spec.total_duration)
    {
        j["totalDuration"] = *spec.total_duration;
    }
    return j;
}

std::string serialize_transition(const TransitionSpec& spec) { return transition_to_json(spec).dump(2); }

json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics)
{
    json out = json::array();
    for (const auto& d : diagnostics)
    {
        out.push_back(json{{"code", d.code}, {"path", d.path}, {"message", d.message}});
    }
    return out;
}

// ---------------------------------------------------------------------------------------------------
// Validation

namespace
{

std::string path_text(const std::vector<std::size_t>& path)
{
    std::string out = "timeline";
    for (auto i : path)
    {
        out += "/" + std::to_string(i);
    }
    return out;
}

std::set<std::string> dataset_fields(const ChartSpec& chart, const std::string& dataset, bool transformed)
{
    std::set<std::string> fields;
    if (const DatasetDef* ds = chart.find_dataset(dataset))
    {
        const std::vector<Row> rows = transformed ? apply_transforms(*ds) : ds->rows;
        if (!rows.empty())
        {
            for (const auto& [k, v] : rows.front())
            {
                fields.insert(k);
            }
        }
    }
    return fields;
}

class Validator
{
public:
    Validator(const TransitionSpec& spec, const ChartSpec& start, const ChartSpec& end) : spec_(spec), start_(start), end_(end) {}

    std::vector<Diagnostic> run()
    {
        std::vector<std::size_t> path;
        visit(spec_.timeline, path);
        if (diagnostics_.empty())
        {
            check_schedule();
        }
        check_endpoints();
        return std::move(diagnostics_);
    }

private:
    void add(std::string code, const std::vector<std::size_t>& path, std::string message)
    {
        diagnostics_.push_back({std::move(code), path_text(path), std::move(message)});
    }

    bool exists(const ComponentRef& ref) const
    {
        auto in = [&](const ChartSpec& c) {
            switch (ref.kind)
            {
                case ComponentKind::mark: return c.find_mark(ref.name) != nullptr;
                case ComponentKind::axis: return c.find_axis(ref.name) != nullptr;
                case ComponentKind::legend: return c.find_legend(ref.name) != nullptr;
                default: return true;
            }
        };
        return in(start_) || in(end_);
    }

    const MarkDef* mark_of(const std::string& name) const
    {
        const MarkDef* m = end_.find_mark(name);
        return m != nullptr ? m : start_.find_mark(name);
    }

    std::set<std::string> mark_fields(const std::string& mark, bool transformed) const
    {
        std::set<std::string> fields;
        for (const ChartSpec* c : {&start_, &end_})
        {
            if (const MarkDef* m = c->find_mark(mark))
            {
                const auto f = dataset_fields(*c, m->dataset, transformed);
                fields.insert(f.begin(), f.end());
            }
        }
        return fields;
    }

    bool scale_known(const std::string& name) const
    {
        return start_.find_scale(name) != nullptr || end_.find_scale(name) != nullptr;
    }

    void check_time(const TimeValue& t, const std::vector<std::size_t>& path, const char* what)
    {
        if (t.is_ratio && !spec_.total_duration)
        {
            add("missing-total", path, std::string(what) + " is a ratio but the root has no totalDuration");
        }
    }

    void check_enumerator(const EnumeratorSpec& e, const std::string& mark, const std::vector<std::size_t>& path)
    {
        std::string dataset = e.filter.dataset;
        std::set<std::string> fields;
        if (dataset.empty())
        {
            if (mark.empty())
            {
                add("unknown-dataset", path, "enumerator filter names no dataset and no mark step infers one");
                return;
            }
            fields = mark_fields(mark, false);
            if (const MarkDef* m = mark_of(mark))
            {
                dataset = m->dataset;
            }
        }
        else
        {
            if (start_.find_dataset(dataset) == nullptr && end_.find_dataset(dataset) == nullptr)
            {
                add("unknown-dataset", path, "enumerator references unknown dataset '" + dataset + "'");
                return;
            }
            fields = dataset_fields(start_, dataset, false);
            const auto f = dataset_fields(end_, dataset, false);
            fields.insert(f.begin(), f.end());
        }
        if (!fields.contains(e.filter.field))
        {
            add("unknown-field", path, "enumerator filter field '" + e.filter.field + "' is not in dataset '" + dataset + "'");
            return;
        }
        if (e.step_size)
        {
            try
            {
                (void)resolve_enumerator_values(e, start_, end_, dataset);
            }
            catch (const Error& err)
            {
                add("enumerator", path, err.what());
            }
        }
    }

    void check_step(const Step& step, const std::vector<std::size_t>& path, const std::string& enum_mark)
    {
        check_time(step.timing.duration, path, "duration");
        check_time(step.timing.delay, path, "delay");
        const ComponentRef& ref = step.component;
        if (ref.kind == ComponentKind::pause)
        {
            return;
        }
        if (!exists(ref))
        {
            add("unknown-component", path, component_label(ref) + " is in neither chart");
            return;
        }
        const ChangeSpec& c = step.change;
        if (ref.kind != ComponentKind::mark)
        {
            if (!step.timing.staggering.empty())
            {
                add("invalid-staggering", path, "staggering applies to mark steps only");
            }
            if (step.enumerator)
            {
                add("invalid-enumerator", path, "step enumerators apply to mark steps only");
            }
        }
        if (c.scale.selection.mode == Selection::Mode::list)
        {
            for (const auto& s : c.scale.selection.names)
            {
                if (!scale_known(s))
                {
                    add("unknown-scale", path, "scale '" + s + "' is in neither chart");
                }
            }
        }
        if (c.signal.mode == Selection::Mode::list)
        {
            for (const auto& s : c.signal.names)
            {
                if (s != "width" && s != "height")
                {
                    add("unknown-signal", path, "signal '" + s + "' does not exist");
                }
            }
        }
        if (ref.kind == ComponentKind::mark)
        {
            check_mark_step(step, path);
        }
        else if (is_guide(ref.kind))
        {
            const auto& parts = ref.kind == ComponentKind::axis ? axis_parts : legend_parts;
            auto check_part = [&](const std::string& p) {
                if (std::find(parts.begin(), parts.end(), p) == parts.end())
                {
                    add("unknown-part", path, "'" + p + "' is not a sub-element of " + component_label(ref));
                }
            };
            if (c.encode.mode == EncodeChange::Mode::channels)
            {
                std::for_each(c.encode.channels.begin(), c.encode.channels.end(), check_part);
            }
            for (const auto& [p, on] : c.encode.guide.parts)
            {
                check_part(p);
            }
        }
        if (step.enumerator)
        {
            check_enumerator(*step.enumerator, ref.kind == ComponentKind::mark ? ref.name : "", path);
        }
        (void)enum_mark;
    }

    void check_mark_step(const Step& step, const std::vector<std::size_t>& path)
    {
        const ChangeSpec& c = step.change;
        const std::string& name = step.component.name;
        const auto fields = mark_fields(name, true);
        for (const auto& k : c.data.keys)
        {
            for (const ChartSpec* chart : {&start_, &end_})
            {
                const MarkDef* m = chart->find_mark(name);
                if (m == nullptr)
                {
                    continue;
                }
                const auto rows = apply_transforms(*chart->find_dataset(m->dataset));
                if (!rows.empty() && !rows.front().contains(k))
                {
                    add("unknown-field", path, "join key '" + k + "' is not a field of mark '" + name + "'");
                    return;
                }
            }
        }
        if (!c.data.keys.empty())
        {
            for (const ChartSpec* chart : {&start_, &end_})
            {
                if (const MarkDef* m = chart->find_mark(name))
                {
                    try
                    {
                        (void)key_rows(apply_transforms(*chart->find_dataset(m->dataset)), c.data.keys);
                    }
                    catch (const Error& err)
                    {
                        add("duplicate-key", path, err.what());
                    }
                }
            }
        }
        if (c.encode.mode == EncodeChange::Mode::channels)
        {
            for (const auto& ch : c.encode.channels)
            {
                const auto& all = all_channels();
                if (std::find(all.begin(), all.end(), ch) == all.end())
                {
                    add("illegal-channel", path, "'" + ch + "' is not a channel");
                }
            }
        }
        if (c.encode.mode == EncodeChange::Mode::explicit_encoding)
        {
            for (const auto& [ch, enc] : c.encode.mark_channels)
            {
                const MarkDef* start_mark = start_.find_mark(name);
                const MarkDef* end_mark = end_.find_mark(name);
                const bool legal = (start_mark != nullptr && channel_allowed(start_mark->type, ch)) ||
                                   (end_mark != nullptr && channel_allowed(end_mark->type, ch));
                if (!legal)
                {
                    add("illegal-channel", path, "channel '" + ch + "' is not legal for mark '" + name + "'");
                }
                if (!enc || enc->is_constant())
                {
                    continue;
                }
                if (!enc->scale.empty() && !scale_known(enc->scale))
                {
                    add("unknown-scale", path, "explicit encoding of '" + ch + "' references unknown scale '" + enc->scale + "'");
                }
                if (!fields.empty() && !fields.contains(enc->field))
                {
                    add("unknown-field", path, "explicit encoding of '" + ch + "' references unknown field '" + enc->field + "'");
                }
            }
        }
        if (!step.timing.staggering.empty())
        {
            for (const StaggeringSpec* s = spec_.find_staggering(step.timing.staggering); s != nullptr;
                 s = s->nested.empty() ? nullptr : spec_.find_staggering(s->nested))
            {
                if (!fields.empty() && !fields.contains(s->field))
                {
                    add("unknown-field", path, "staggering field '" + s->field + "' is not a field of mark '" + name + "'");
                }
            }
        }
    }

    static std::string first_mark(const Block& block)
    {
        std::string found;
        for_each_step(block, [&](const Step& s, const std::vector<std::size_t>&) {
            if (found.empty() && s.component.kind == ComponentKind::mark)
            {
                found = s.component.name;
            }
        });
        return found;
    }

    void visit(const Block& block, std::vector<std::size_t>& path)
    {
        if (const auto* step = std::get_if<Step>(&block.node))
        {
            check_step(*step, path, "");
            return;
        }
        const std::vector<Block>* children = nullptr;
        if (const auto* sync = std::get_if<Sync>(&block.node))
        {
            children = &sync->blocks;
        }
        else
        {
            const auto& concat = std::get<Concat>(block.node);
            children = &concat.blocks;
            if (concat.enumerator)
            {
                check_enumerator(*concat.enumerator, first_mark(block), path);
            }
            for (const auto& name : concat.auto_scale_order)
            {
                if (start_.find_mark(name) == nullptr && end_.find_mark(name) == nullptr)
                {
                    add("unknown-mark", path, "autoScaleOrder names '" + name + "' which is not a mark component");
                }
            }
        }
        for (std::size_t i = 0; i < children->size(); ++i)
        {
            path.push_back(i);
            visit((*children)[i], path);
            path.pop_back();
        }
    }

    void check_schedule()
    {
        try
        {
            const Block timeline = expand_concat_enumerators(spec_.timeline, start_, end_, spec_.total_duration);
            const Schedule schedule = schedule_timeline(timeline, 0, spec_.total_duration);
            if (const auto clash = find_overlapping_steps(schedule))
            {
                add("overlapping-steps", {}, *clash);
            }
        }
        catch (const Error& err)
        {
            add("schedule", {}, err.what());
        }
    }

    void check_endpoints()
    {
        for (const auto& [chart, label] : {std::pair{&start_, "start"}, std::pair{&end_, "end"}})
        {
            try
            {
                (void)render_scene(*chart);
            }
            catch (const Error& err)
            {
                add("endpoint", {}, std::string(label) + " chart does not render: " + err.what());
            }
        }
    }

    const TransitionSpec& spec_;
    const ChartSpec& start_;
    const ChartSpec& end_;
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace

std::vector<Diagnostic> validate_transition(const TransitionSpec& spec, const ChartSpec& start, const ChartSpec& end)
{
    return Validator(spec, start, end).run();
}

}  // namespace stagecraft
