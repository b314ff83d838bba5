#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "stagecraft/changes.hpp"
#include "stagecraft/chart.hpp"
#include "stagecraft/transition.hpp"

namespace stagecraft
{

inline constexpr std::string_view cost_model_schema_version = "cost-model/1";

struct CapacityParams
{
    double ceiling = 1.4;
    double midpoint_ms = 1200.0;
    double slope_ms = 300.0;
    double intercept = 0.0;

    bool operator==(const CapacityParams&) const = default;
};

/// "initial" or "tuned". Throws invalid_value for other names.
CapacityParams capacity_preset(std::string_view name);

/// intercept + ceiling / (1 + exp(-(t - midpoint) / slope))
double capacity(double t_ms, const CapacityParams& params);

struct CostModel
{
    // Keys: view, signal, encode, markType, scale, guide, data.filter, data.aggregate.
    std::map<std::string, double> weights;
    CapacityParams capacity;
    double discount = -0.2;
    double penalty = 0.4;

    bool operator==(const CostModel&) const = default;
};

CostModel default_cost_model(std::string_view preset = "tuned");

/// Throws invalid_value on a non-positive weight, ceiling or slope, a non-negative discount, a
/// non-positive penalty, or markType not cheaper than both data kinds.
void validate_cost_model(const CostModel& model);

/// Reads a cost-model/1 document; `preset` picks one of its capacity presets.
CostModel cost_model_from_json(const nlohmann::json& doc, std::string_view preset);
CostModel parse_cost_model(std::string_view text, std::string_view preset);
nlohmann::json cost_model_to_json(const CostModel& model, std::string_view preset_name = "tuned");

using Stage = std::vector<AtomicChange>;

/// Weight table key of a change.
std::string weight_key(const AtomicChange& change);

double stage_cost(const Stage& stage, const CostModel& model);

struct BundlingMatch
{
    std::string rule;
    double effect = 0.0;
    std::string detail;
};

/// Every bundling rule instance the stage matches.
std::vector<BundlingMatch> bundling_matches(const Stage& stage, const CostModel& model);
double bundling_adjustment(const Stage& stage, const CostModel& model);

/// Sum over stages of max(0, W - C(duration) + B).
double complexity(const std::vector<Stage>& stages, const std::vector<double>& durations_ms, const CostModel& model);

/// total / n per stage with the remainder on the last stage.
std::vector<std::int64_t> stage_durations(std::int64_t total_ms, std::size_t n);

/// Stage index per change.
using Assignment = std::vector<std::size_t>;

/// All n^k assignments of k changes to n stages, in lexicographic order.
std::vector<Assignment> enumerate_component_sequences(std::size_t k, std::size_t n);

struct Violation
{
    // Unavailable Scale | Unavailable Data Field | Unavailable Encoding | Overflow
    std::string rule;
    std::string component;
    std::string detail;
};

std::vector<Violation> check_constraints(const ComponentState& state);

struct PruneResult
{
    std::vector<Assignment> surviving;
    std::size_t raw = 0;
    std::size_t pruned = 0;
    std::vector<std::string> explanations;
};

/// Drops assignments whose state after any stage but the last violates a constraint.
PruneResult prune_sequences(const ComponentRef& component, const std::vector<AtomicChange>& changes, std::size_t n,
                            const ChartSpec& start, const ChartSpec& end, const MarkKeys& keys = {});

/// Cross product of per-component assignments without a globally empty stage. Each result holds the
/// chosen assignment index per component.
std::vector<std::vector<std::size_t>> combine_candidates(const std::vector<std::vector<Assignment>>& per_component,
                                                         std::size_t n);

struct Candidate
{
    std::vector<Stage> stages;
    std::vector<std::int64_t> durations;
    double score = 0.0;
    std::string signature;
    TransitionSpec spec;
};

/// Stage list to transition: a root concat of stages, each a sync of one step per component.
TransitionSpec candidate_spec(const std::vector<Stage>& stages, const std::vector<std::int64_t>& durations);

struct RecommendOptions
{
    // Candidates are enumerated for every stage count 1..max_stages.
    std::size_t max_stages = 3;
    std::int64_t total_ms = 2000;
    std::size_t top = 5;
    CostModel model = default_cost_model();
    DetectOptions detect;
};

struct ComponentReport
{
    ComponentRef component;
    std::size_t changes = 0;
    std::size_t raw = 0;
    std::size_t pruned = 0;
    std::size_t surviving = 0;
    std::vector<std::string> explanations;
};

struct StageCountReport
{
    std::size_t stages = 0;
    std::vector<ComponentReport> components;
    std::size_t combined = 0;
};

struct Recommendation
{
    ChangeSet changes;
    std::vector<StageCountReport> enumeration;
    // Ranked, best first.
    std::vector<Candidate> candidates;
    std::vector<std::string> warnings;
};

/// Throws invalid_value for max_stages outside [1, 4] or total_ms <= 0.
Recommendation recommend(const ChartSpec& start, const ChartSpec& end, const RecommendOptions& options = {});

nlohmann::json recommendation_to_json(const Recommendation& rec, std::size_t top);

}  // namespace stagecraft
