#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "stagecraft/transition.hpp"

namespace stagecraft
{

struct ScheduledStep
{
    // Child indices from the timeline root down to the step.
    std::vector<std::size_t> path;
    Step step;
    std::optional<EnumeratorBinding> binding;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    std::int64_t delay_ms = 0;
    std::int64_t duration_ms = 0;
    // Document order, the tie-break for equal start times.
    std::size_t order = 0;
};

struct Schedule
{
    std::vector<ScheduledStep> steps;
    std::int64_t total_end_ms = 0;
    std::vector<std::string> warnings;
};

/// "0/2/1" style label for a block path.
std::string path_label(const std::vector<std::size_t>& path);

/// Milliseconds for a duration or delay. Ratios need a total; missing_total otherwise.
std::int64_t resolve_ms(const TimeValue& t, std::optional<double> total);

/// Length of a block in ms, including step delays.
std::int64_t block_duration(const Block& block, std::optional<double> total);

/// Absolute step windows. Concat enumerators must already be expanded.
Schedule schedule_timeline(const Block& block, std::int64_t clock_start, std::optional<double> total);

/// Sweep values of an enumerator. `dataset` names the dataset whose filter is swept; empty searches
/// every dataset for a filter on the enumerator's field.
std::vector<Value> resolve_enumerator_values(const EnumeratorSpec& e, const ChartSpec& start, const ChartSpec& end,
                                             const std::string& dataset = "");

/// k copies of the concat body, copy i bound to values[i] and fitted to body/k ms; the remainder goes to
/// the last copy. Without a dataset on the enumerator filter, the binding applies to every mark whose
/// data filters on the field.
Concat expand_concat_enumerator(const Concat& concat, const std::vector<Value>& values, std::optional<double> total);

/// Expands every concat enumerator in the tree.
Block expand_concat_enumerators(const Block& block, const ChartSpec& start, const ChartSpec& end,
                                std::optional<double> total);

struct AutoOrder
{
    std::vector<std::size_t> order;
    std::optional<std::string> warning;
};

/// Children of the concat that contain a step on one of its autoScaleOrder marks.
std::vector<std::size_t> auto_order_children(const Concat& concat);

/// Tries permutations of the auto-order children in lexicographic order (identity first) and returns the
/// first one `overflow_free` accepts; otherwise the original order and a warning.
AutoOrder resolve_auto_scale_order(const Concat& concat,
                                   const std::function<bool(const std::vector<std::size_t>&)>& overflow_free);

/// The concat with its children permuted.
Concat reorder_concat(const Concat& concat, const std::vector<std::size_t>& order);

/// Description of the first pair of steps on one component whose windows overlap.
std::optional<std::string> find_overlapping_steps(const Schedule& schedule);

}  // namespace stagecraft
