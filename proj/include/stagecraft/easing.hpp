#pragma once

#include <optional>
#include <string_view>

namespace stagecraft
{

enum class Ease
{
    linear,
    quad_in,
    quad_out,
    quad_in_out,
    cubic_in,
    cubic_out,
    cubic_in_out,
};

const char* ease_name(Ease ease);
std::optional<Ease> ease_from_name(std::string_view name);

/// Eased progress for u in [0, 1]. Monotone with f(0) = 0 and f(1) = 1.
double ease_value(Ease ease, double u);

/// Name-based lookup; throws unknown_ease.
double ease_value(std::string_view name, double u);

}  // namespace stagecraft
