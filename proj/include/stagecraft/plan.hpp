#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stagecraft/chart.hpp"
#include "stagecraft/easing.hpp"
#include "stagecraft/scene.hpp"
#include "stagecraft/schedule.hpp"
#include "stagecraft/transition.hpp"

namespace stagecraft
{

inline constexpr std::string_view plan_schema_version = "plan/1";

enum class SegmentRole
{
    enter,
    update,
    exit,
};

const char* segment_role_name(SegmentRole role);

struct Segment
{
    double t0 = 0.0;
    double t1 = 0.0;
    Attrs from;
    Attrs to;
    Ease ease = Ease::linear;
    SegmentRole role = SegmentRole::update;

    bool operator==(const Segment&) const = default;
};

struct Track
{
    // Element role in the scene graph (mark, axis-tick, legend-label, ...).
    std::string role;
    std::vector<Segment> segments;

    bool operator==(const Track&) const = default;
};

struct PlanStep
{
    std::string component;
    std::string path;
    std::int64_t start_ms = 0;
    std::int64_t end_ms = 0;
    std::int64_t delay_ms = 0;
    std::int64_t duration_ms = 0;

    bool operator==(const PlanStep&) const = default;
};

struct AnimationPlan
{
    double total_duration = 0.0;
    // Keyed by element id.
    std::map<std::string, Track> tracks;
    std::vector<PlanStep> schedule;
    std::vector<std::string> warnings;

    bool operator==(const AnimationPlan&) const = default;
};

/// Element windows of a staggered step, in element order.
struct StaggerWindow
{
    double start = 0.0;
    double end = 0.0;
};

/// Windows of n consecutive groups: durations proportional to the increments of `ease` over n equal
/// slices, each group starting (1 - overlap) of its predecessor's duration after it, scaled so the
/// last end falls on start + duration.
std::vector<StaggerWindow> stagger_windows(std::size_t n, double overlap, Ease ease, double start, double duration);

/// Per-element windows for a staggered step. Elements are grouped by the value of the staggering field
/// in their datum; nested staggerings subdivide each group window. Throws unknown_field when a datum
/// lacks the field.
std::vector<StaggerWindow> resolve_stagger(const std::vector<Row>& datums, const TransitionSpec& spec,
                                           const StaggeringSpec& staggering, double start, double duration);

/// Blends two attribute sets at eased progress p.
Attrs interpolate_attrs(const Attrs& from, const Attrs& to, double p);

/// Blends #rrggbb colors channel-wise, rounding half up.
std::string blend_color(std::string_view a, std::string_view b, double p);

/// Applies concat enumerators and autoScaleOrder and schedules the timeline from 0.
Schedule plan_schedule(const TransitionSpec& spec, const ChartSpec& start, const ChartSpec& end);

/// Compiles the transition. Throws validation errors as Error(schedule) with the first diagnostic.
AnimationPlan compile_plan(const ChartSpec& start, const ChartSpec& end, const TransitionSpec& spec);

/// Element attributes at time t; elements that are absent at t are omitted.
std::map<std::string, Attrs> sample_plan(const AnimationPlan& plan, double t);

/// Mark join keys the plan uses, for keyed endpoint renders.
std::map<std::string, std::vector<std::string>> plan_mark_keys(const TransitionSpec& spec, const ChartSpec& start,
                                                               const ChartSpec& end, bool at_start);

nlohmann::json plan_to_json(const AnimationPlan& plan);
AnimationPlan plan_from_json(const nlohmann::json& doc);
std::string serialize_plan(const AnimationPlan& plan);
AnimationPlan parse_plan(std::string_view text);

}  // namespace stagecraft
