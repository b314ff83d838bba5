#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stagecraft/chart.hpp"
#include "stagecraft/component_state.hpp"
#include "stagecraft/easing.hpp"

namespace stagecraft
{

inline constexpr std::string_view transition_schema_version = "transition/1";

/// A duration or delay, absolute or as a fraction of the root total duration.
struct TimeValue
{
    bool is_ratio = false;
    double value = 0.0;

    static TimeValue ms(double v) { return {false, v}; }
    static TimeValue ratio(double r) { return {true, r}; }
    bool operator==(const TimeValue&) const = default;
};

/// all / none / an explicit list of names.
struct Selection
{
    enum class Mode
    {
        all,
        none,
        list,
    };
    Mode mode = Mode::all;
    std::vector<std::string> names;

    bool includes(std::string_view name) const;
    bool operator==(const Selection&) const = default;
};

struct DataChange
{
    bool apply = true;
    std::vector<std::string> keys;
    bool enter = true;
    bool exit = true;
    bool update = true;
    // Entering rows start from the step's initial encoding instead of their final position.
    bool enter_from_initial = false;

    bool operator==(const DataChange&) const = default;
};

/// Temporary guide encoding: sub-element visibility and title text.
struct GuideOverride
{
    std::map<std::string, bool> parts;
    std::optional<std::string> title;

    bool operator==(const GuideOverride&) const = default;
};

struct EncodeChange
{
    enum class Mode
    {
        all,
        none,
        channels,
        explicit_encoding,
    };
    Mode mode = Mode::all;
    // Channel names (marks) or sub-element names (guides) for Mode::channels.
    std::vector<std::string> channels;
    // Mode::explicit_encoding on marks: channel replacements; nullopt removes the channel.
    std::map<std::string, std::optional<EncodingChannel>> mark_channels;
    // Mode::explicit_encoding on guides.
    GuideOverride guide;

    bool operator==(const EncodeChange&) const = default;
};

enum class DomainDimension
{
    same,
    different,
};

struct ScaleChange
{
    Selection selection;
    std::optional<DomainDimension> dimension;

    bool operator==(const ScaleChange&) const = default;
};

struct ChangeSpec
{
    DataChange data;
    EncodeChange encode;
    ScaleChange scale;
    Selection signal;
    bool mark_type = true;

    bool operator==(const ChangeSpec&) const = default;
};

struct TimingSpec
{
    TimeValue duration = TimeValue::ms(500);
    TimeValue delay = TimeValue::ms(0);
    Ease ease = Ease::cubic_in_out;
    std::string staggering;

    bool operator==(const TimingSpec&) const = default;
};

struct StaggeringSpec
{
    enum class Order
    {
        ascending,
        descending,
        explicit_list,
    };

    std::string name;
    std::string field;
    Order order = Order::ascending;
    std::vector<Value> explicit_order;
    double overlap = 0.0;
    Ease ease = Ease::linear;
    std::string nested;

    bool operator==(const StaggeringSpec&) const = default;
};

struct FilterRef
{
    std::string field;
    Comparator op = Comparator::less_equal;
    // Dataset whose filter is swept; inferred from the enclosing mark step when empty.
    std::string dataset;

    bool operator==(const FilterRef&) const = default;
};

struct EnumeratorSpec
{
    FilterRef filter;
    std::vector<Value> values;
    std::optional<double> step_size;

    bool operator==(const EnumeratorSpec&) const = default;
};

struct Step
{
    ComponentRef component;
    ChangeSpec change;
    TimingSpec timing;
    std::optional<EnumeratorSpec> enumerator;

    bool operator==(const Step&) const = default;
};

struct Block;

enum class SyncAt
{
    start,
    end,
};

struct Sync
{
    std::vector<Block> blocks;
    SyncAt at = SyncAt::start;

    bool operator==(const Sync&) const;
};

struct Concat
{
    std::vector<Block> blocks;
    std::optional<EnumeratorSpec> enumerator;
    std::vector<std::string> auto_scale_order;

    bool operator==(const Concat&) const;
};

/// Filter value bound to one iteration of an expanded concat enumerator.
struct EnumeratorBinding
{
    FilterRef filter;
    Value value;
    std::size_t iteration = 0;
    std::size_t count = 1;

    bool operator==(const EnumeratorBinding&) const = default;
};

struct Block
{
    Block() = default;
    Block(Step s) : node(std::move(s)) {}
    Block(Sync s) : node(std::move(s)) {}
    Block(Concat c) : node(std::move(c)) {}

    std::variant<Step, Sync, Concat> node;

    // Set only on blocks produced by concat-enumerator expansion: the block is stretched or squeezed
    // to last exactly fit_ms, and its mark data changes are filtered at the bound value.
    std::optional<std::int64_t> fit_ms;
    std::optional<EnumeratorBinding> binding;

    bool operator==(const Block&) const;
};

struct TransitionSpec
{
    Block timeline;
    std::optional<double> total_duration;
    std::vector<StaggeringSpec> staggerings;

    const StaggeringSpec* find_staggering(std::string_view name) const;
    bool operator==(const TransitionSpec&) const = default;
};

struct Diagnostic
{
    std::string code;
    std::string path;
    std::string message;

    bool operator==(const Diagnostic&) const = default;
};

/// Parses and normalizes a transition document; every step comes back with fully populated change
/// and timing. Throws on syntax, unknown ease, dangling or cyclic staggering, bad overlap.
TransitionSpec parse_transition(std::string_view text);
TransitionSpec transition_from_json(const nlohmann::json& doc);
nlohmann::json transition_to_json(const TransitionSpec& spec);
std::string serialize_transition(const TransitionSpec& spec);

/// Checks the spec against the chart pair. Returns an empty list when the spec is usable.
std::vector<Diagnostic> validate_transition(const TransitionSpec& spec, const ChartSpec& start, const ChartSpec& end);

nlohmann::json diagnostics_to_json(const std::vector<Diagnostic>& diagnostics);

/// Visits every step of a block tree in document order together with its index path.
void for_each_step(const Block& block, const std::function<void(const Step&, const std::vector<std::size_t>&)>& fn);

}  // namespace stagecraft
