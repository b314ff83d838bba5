#include "stagecraft/scale.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "stagecraft/error.hpp"

namespace stagecraft
{

static std::size_t category_index(const ScaleDef& scale, const Value& value)
{
    const auto it = std::find(scale.categories.begin(), scale.categories.end(), value);
    return static_cast<std::size_t>(it - scale.categories.begin());
}

bool outside_domain(const ScaleDef& scale, const Value& value)
{
    if (is_continuous(scale.kind))
    {
        if (!is_number(value))
        {
            return true;
        }
        const double v = as_number(value);
        return v < scale.numeric_domain.first || v > scale.numeric_domain.second;
    }
    return category_index(scale, value) == scale.categories.size();
}

double bandwidth(const ScaleDef& scale)
{
    if (scale.kind != ScaleKind::band || scale.categories.empty())
    {
        return 0.0;
    }
    const double step = (scale.pixel_range.second - scale.pixel_range.first) / static_cast<double>(scale.categories.size());
    return step * (1.0 - scale.padding);
}

ScaledValue scale_apply(const ScaleDef& scale, const Value& value, bool report_overflow)
{
    ScaledValue out;
    const auto [r0, r1] = scale.pixel_range;
    if (is_continuous(scale.kind))
    {
        if (!is_number(value))
        {
            throw Error(ErrorCode::type_mismatch,
                        "scale '" + scale.name + "' expects a number, got '" + format_value(value) + "'");
        }
        const double v = as_number(value);
        const auto [lo, hi] = scale.numeric_domain;
        out.position = hi == lo ? r0 : r0 + (v - lo) / (hi - lo) * (r1 - r0);
        out.overflow = v < lo || v > hi;
        return out;
    }

    const std::size_t n = scale.categories.size();
    const std::size_t i = category_index(scale, value);
    out.overflow = i == n;
    if (out.overflow && !report_overflow)
    {
        throw Error(ErrorCode::overflow, "'" + format_value(value) + "' is not in the domain of scale '" + scale.name + "'");
    }
    const double slot = (r1 - r0) / static_cast<double>(n);
    switch (scale.kind)
    {
        case ScaleKind::band:
            out.position = r0 + static_cast<double>(i) * slot + slot * scale.padding / 2.0;
            break;
        case ScaleKind::point:
            out.position = r0 + (static_cast<double>(i) + 0.5) * slot;
            break;
        default:
            out.symbol = scale.palette[i % scale.palette.size()];
            break;
    }
    return out;
}

namespace
{

constexpr std::array<double, 4> nice_mantissas{1.0, 2.0, 2.5, 5.0};
constexpr double grid_eps = 1e-9;

bool on_grid(double v, double step) { return std::abs(v / step - std::round(v / step)) < grid_eps; }

long long ticks_inside(double lo, double hi, double step)
{
    const double first = std::ceil(lo / step - grid_eps);
    const double last = std::floor(hi / step + grid_eps);
    return static_cast<long long>(last - first) + 1;
}

}  // namespace

double tick_step(double lo, double hi, int target)
{
    const double span = hi - lo;
    if (!(span > 0.0))
    {
        return 1.0;
    }
    const int top = static_cast<int>(std::floor(std::log10(span))) + 1;
    std::vector<double> steps;
    for (int k = top - 4; k <= top; ++k)
    {
        for (double m : nice_mantissas)
        {
            steps.push_back(m * std::pow(10.0, k));
        }
    }
    std::sort(steps.begin(), steps.end());
    for (double step : steps)
    {
        if (on_grid(lo, step) && on_grid(hi, step) && ticks_inside(lo, hi, step) <= target)
        {
            return step;
        }
    }
    for (double step : steps)
    {
        if (ticks_inside(lo, hi, step) <= target)
        {
            return step;
        }
    }
    return steps.back();
}

std::vector<Value> tick_values(const ScaleDef& scale, int target)
{
    if (!is_continuous(scale.kind))
    {
        return scale.categories;
    }
    const auto [lo, hi] = scale.numeric_domain;
    if (!(hi > lo))
    {
        return {Value{lo}};
    }
    const double step = tick_step(lo, hi, target);
    const auto first = static_cast<long long>(std::ceil(lo / step - grid_eps));
    const auto last = static_cast<long long>(std::floor(hi / step + grid_eps));
    std::vector<Value> ticks;
    for (long long k = first; k <= last; ++k)
    {
        double v = static_cast<double>(k) * step;
        // Snap away binary noise such as 0.30000000000000004.
        const double snapped = std::round(v * 1e9) / 1e9;
        if (std::abs(snapped - v) < 1e-12 * std::max(1.0, std::abs(v)))
        {
            v = snapped;
        }
        ticks.emplace_back(v == 0.0 ? 0.0 : v);
    }
    return ticks;
}

}  // namespace stagecraft
