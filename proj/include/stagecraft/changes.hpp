#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stagecraft/chart.hpp"
#include "stagecraft/component_state.hpp"
#include "stagecraft/schedule.hpp"
#include "stagecraft/transition.hpp"

namespace stagecraft
{

struct JoinResult
{
    std::vector<std::string> key_fields;
    std::vector<KeyedRow> enter;
    // (start row, end row)
    std::vector<std::pair<KeyedRow, KeyedRow>> update;
    std::vector<KeyedRow> exit;
};

/// Partitions keyed rows. Update and exit follow start order, enter follows end order.
JoinResult join_keyed(const std::vector<KeyedRow>& start, const std::vector<KeyedRow>& end);

/// Keys both row lists (index keys when key_fields is empty) and partitions them. Throws duplicate_key.
JoinResult join_data(const std::vector<Row>& start, const std::vector<Row>& end, const std::vector<std::string>& key_fields);

/// For each raw row, the index of the aggregate row of its group. Throws when a group is missing.
std::vector<std::size_t> join_aggregate(const std::vector<Row>& raw, const std::vector<Row>& agg,
                                        const std::vector<std::string>& groupby);

/// Join key fields of a mark on each side: shared grouping fields, then user keys, then the line
/// vertex keys, then row index. A side that is aggregated while the other is not keeps its groupby.
struct MarkKeys
{
    std::vector<std::string> start;
    std::vector<std::string> end;
};
MarkKeys resolve_join_keys(const ChartSpec& start, const ChartSpec& end, const std::string& mark,
                           const std::vector<std::string>& user_keys);

enum class SizeEffect
{
    neutral,
    expands,
    shrinks,
};

const char* size_effect_name(SizeEffect e);

struct AtomicChange
{
    ComponentRef component;
    // data, scale.<channel>, encode.<channel or part>, encode (guide presence), markType, signal.<name>,
    // view.width, view.height
    std::string kind;
    // data: filter | aggregate | enter | exit; encode: enter | exit
    std::string detail;
    std::string scale_name;
    std::optional<DomainDimension> dimension;
    nlohmann::json initial;
    nlohmann::json final;
    SizeEffect width = SizeEffect::neutral;
    SizeEffect height = SizeEffect::neutral;

    bool operator==(const AtomicChange&) const = default;
};

struct ComponentChanges
{
    ComponentRef component;
    std::vector<AtomicChange> changes;
};

struct ChangeSet
{
    // Canonical component order: view, marks, axes, legends; start-chart order then end-only.
    std::vector<ComponentChanges> components;

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    const std::vector<AtomicChange>* find(const ComponentRef& ref) const;
};

struct DetectOptions
{
    // Domain dimension overrides by scale name.
    std::map<std::string, DomainDimension> dimensions;
};

/// Data field behind a scale: its domainSource field, else the field of the first mark channel using it.
std::string scale_field(const ChartSpec& chart, const std::string& scale);

ChangeSet detect_changes(const ChartSpec& start, const ChartSpec& end, const DetectOptions& options = {});

nlohmann::json changes_to_json(const ChangeSet& changes);

/// The change selection that applies exactly the given atomic changes of one component.
ChangeSpec change_spec_for(const std::vector<AtomicChange>& subset, ComponentKind kind);

/// Final state of one step: `target` where the change applies, `initial` where it is suppressed, the
/// explicit encoding where one is given. A binding re-filters the target data at the bound value.
ComponentState apply_change(const ComponentState& initial, const ComponentState& target, const ChangeSpec& change,
                            const ChartSpec& end, const std::optional<EnumeratorBinding>& binding = std::nullopt);

/// Rows of the end chart's dataset for a mark with every filter on the bound field set to the bound value.
std::optional<std::vector<Row>> bound_rows(const ChartSpec& end, const std::string& mark, const EnumeratorBinding& binding);

struct StepStates
{
    ComponentState initial;
    ComponentState final;
};

/// Keys used for every mark component of a transition, from user keys found in its steps.
std::map<std::string, MarkKeys> transition_keys(const Schedule& schedule, const ChartSpec& start, const ChartSpec& end);

/// (initial, final) component state per scheduled step, threaded per component in schedule order.
/// Throws contradiction when two steps on one component overlap in time.
std::vector<StepStates> thread_step_states(const Schedule& schedule, const ChartSpec& start, const ChartSpec& end);

/// Guide sub-element join between two scales.
struct GuideJoin
{
    std::vector<Value> enter;
    std::vector<Value> update;
    std::vector<Value> exit;
    // Dimension change: nothing is joined, old entries fade out and new ones fade in.
    bool crossfade = false;
};

GuideJoin diff_guide_data(const ComponentState& initial, const ComponentState& final, DomainDimension dimension);

/// Domain dimension of a guide or mark scale change between two states.
DomainDimension scale_change_dimension(const ScaleDef& a, const std::string& field_a, const ScaleDef& b,
                                       const std::string& field_b);

}  // namespace stagecraft
