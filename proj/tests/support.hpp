#pragma once

#include <string>

#include "stagecraft/chart.hpp"
#include "stagecraft/service.hpp"
#include "stagecraft/transition.hpp"

namespace test
{

inline std::string fixture_path(const std::string& name, const std::string& file)
{
    return std::string(STAGECRAFT_FIXTURE_DIR) + "/" + name + "/" + file;
}

inline stagecraft::ChartSpec fixture_chart(const std::string& name, const std::string& which)
{
    return stagecraft::parse_chart(stagecraft::read_file(fixture_path(name, which + ".json")));
}

inline stagecraft::TransitionSpec fixture_spec(const std::string& name)
{
    return stagecraft::parse_transition(stagecraft::read_file(fixture_path(name, "transition.json")));
}

struct Fixture
{
    stagecraft::ChartSpec start;
    stagecraft::ChartSpec end;
    stagecraft::TransitionSpec spec;
};

inline Fixture load(const std::string& name)
{
    return {fixture_chart(name, "start"), fixture_chart(name, "end"), fixture_spec(name)};
}

}  // namespace test
