#include "stagecraft/easing.hpp"

#include <algorithm>
#include <string>

#include "stagecraft/error.hpp"

namespace stagecraft
{

const char* ease_name(Ease ease)
{
    switch (ease)
    {
        case Ease::linear: return "linear";
        case Ease::quad_in: return "quad-in";
        case Ease::quad_out: return "quad-out";
        case Ease::quad_in_out: return "quad-in-out";
        case Ease::cubic_in: return "cubic-in";
        case Ease::cubic_out: return "cubic-out";
        case Ease::cubic_in_out: return "cubic-in-out";
    }
    return "linear";
}

std::optional<Ease> ease_from_name(std::string_view name)
{
    for (Ease e : {Ease::linear, Ease::quad_in, Ease::quad_out, Ease::quad_in_out, Ease::cubic_in, Ease::cubic_out,
                   Ease::cubic_in_out})
    {
        if (name == ease_name(e))
        {
            return e;
        }
    }
    return std::nullopt;
}

double ease_value(Ease ease, double u)
{
    u = std::clamp(u, 0.0, 1.0);
    const double v = 1.0 - u;
    switch (ease)
    {
        case Ease::linear: return u;
        case Ease::quad_in: return u * u;
        case Ease::quad_out: return 1.0 - v * v;
        case Ease::quad_in_out: return u < 0.5 ? 2.0 * u * u : 1.0 - 2.0 * v * v;
        case Ease::cubic_in: return u * u * u;
        case Ease::cubic_out: return 1.0 - v * v * v;
        case Ease::cubic_in_out: return u < 0.5 ? 4.0 * u * u * u : 1.0 - 4.0 * v * v * v;
    }
    return u;
}

double ease_value(std::string_view name, double u)
{
    const auto ease = ease_from_name(name);
    if (!ease)
    {
        throw Error(ErrorCode::unknown_ease, "unknown ease '" + std::string(name) + "'");
    }
    return ease_value(*ease, u);
}

}  // namespace stagecraft
