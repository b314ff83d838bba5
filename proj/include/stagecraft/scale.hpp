#pragma once

#include <string>
#include <vector>

#include "stagecraft/chart.hpp"

namespace stagecraft
{

struct ScaledValue
{
    // Pixel position for positional kinds (slot start for band).
    double position = 0.0;
    // Palette entry for ordinal kinds.
    std::string symbol;
    bool overflow = false;
};

/// Maps a data value through the scale. Values outside the domain are extrapolated (continuous) or
/// placed one slot past the end (discrete) and flagged. With report_overflow == false a category that
/// is not in a discrete domain throws instead.
ScaledValue scale_apply(const ScaleDef& scale, const Value& value, bool report_overflow = true);

/// True iff value lies outside the scale's domain.
bool outside_domain(const ScaleDef& scale, const Value& value);

/// Slot width of a band scale; zero for every other kind.
double bandwidth(const ScaleDef& scale);

/// Tick values for an axis or size legend over the scale.
///
/// Continuous domains: the step is the smallest of {1, 2, 2.5, 5} x 10^k that lands on both domain
/// ends and gives at most `target` ticks; if no candidate lands on both ends, the smallest step giving
/// at most `target` ticks inside the domain. Discrete domains: the categories in order.
std::vector<Value> tick_values(const ScaleDef& scale, int target);

/// Step size chosen by tick_values for a continuous domain.
double tick_step(double lo, double hi, int target);

}  // namespace stagecraft
