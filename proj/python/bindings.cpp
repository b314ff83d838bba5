#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "stagecraft/chart.hpp"
#include "stagecraft/easing.hpp"
#include "stagecraft/error.hpp"
#include "stagecraft/plan.hpp"
#include "stagecraft/recommend.hpp"
#include "stagecraft/scene.hpp"
#include "stagecraft/transition.hpp"

namespace py = pybind11;
using namespace stagecraft;
using nlohmann::json;

namespace
{

std::string compile(const std::string& start, const std::string& end, const std::string& spec)
{
    return serialize_plan(compile_plan(parse_chart(start), parse_chart(end), parse_transition(spec)));
}

std::string validate(const std::string& spec, const std::string& start, const std::string& end)
{
    const auto diags = validate_transition(parse_transition(spec), parse_chart(start), parse_chart(end));
    return diagnostics_to_json(diags).dump();
}

std::string run_recommend(const std::string& start, const std::string& end, std::size_t stages, std::int64_t total_ms,
                          std::size_t top, const std::string& preset)
{
    RecommendOptions opts;
    opts.max_stages = stages;
    opts.total_ms = total_ms;
    opts.top = top;
    opts.model = default_cost_model(preset);
    const Recommendation rec = recommend(parse_chart(start), parse_chart(end), opts);
    return recommendation_to_json(rec, top).dump();
}

std::string render(const std::string& chart)
{
    return serialize_scene(render_scene(parse_chart(chart)));
}

std::string sample(const std::string& plan, double t)
{
    json out = json::object();
    for (const auto& [id, attrs] : sample_plan(parse_plan(plan), t))
    {
        out[id] = attrs_to_json(attrs);
    }
    return out.dump();
}

}  // namespace

PYBIND11_MODULE(_stagecraft, m)
{
    static py::exception<Error> error_type(m, "StagecraftError", PyExc_ValueError);
    py::register_exception_translator([](std::exception_ptr p) {
        try
        {
            if (p)
            {
                std::rethrow_exception(p);
            }
        }
        catch (const Error& e)
        {
            py::object offset = e.offset() ? py::cast(*e.offset()) : py::none();
            py::tuple args = py::make_tuple(e.what(), error_code_name(e.code()), offset);
            PyErr_SetObject(error_type.ptr(), args.ptr());
        }
    });

    m.def("compile_plan", &compile, py::arg("start"), py::arg("end"), py::arg("spec"),
          py::call_guard<py::gil_scoped_release>());
    m.def("validate", &validate, py::arg("spec"), py::arg("start"), py::arg("end"));
    m.def("recommend", &run_recommend, py::arg("start"), py::arg("end"), py::arg("stages") = 3,
          py::arg("total_ms") = 2000, py::arg("top") = 5, py::arg("preset") = "tuned",
          py::call_guard<py::gil_scoped_release>());
    m.def("render_scene", &render, py::arg("chart"));
    m.def("sample_plan", &sample, py::arg("plan"), py::arg("t"));
    m.def(
        "capacity", [](double t, const std::string& preset) { return capacity(t, capacity_preset(preset)); },
        py::arg("t_ms"), py::arg("preset") = "tuned");
    m.def(
        "ease", [](const std::string& name, double u) { return ease_value(name, u); }, py::arg("name"), py::arg("u"));
}
