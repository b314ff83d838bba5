// stagecraft command-line tool: compile, recommend, validate, serve.
//
// Exit codes: 0 ok, 1 I/O, 2 validation, 3 empty recommendation.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "stagecraft/chart.hpp"
#include "stagecraft/error.hpp"
#include "stagecraft/plan.hpp"
#include "stagecraft/recommend.hpp"
#include "stagecraft/service.hpp"
#include "stagecraft/transition.hpp"

namespace
{

using namespace stagecraft;
namespace fs = std::filesystem;

constexpr int exit_ok = 0;
constexpr int exit_io = 1;
constexpr int exit_validation = 2;
constexpr int exit_empty = 3;

int default_port()
{
    if (const char* env = std::getenv("STAGECRAFT_PORT"))
    {
        try
        {
            return std::stoi(env);
        }
        catch (const std::exception&)
        {
        }
    }
    return 8080;
}

CostModel load_model(const std::string& choice, const std::string& preset)
{
    if (choice == "initial" || choice == "tuned")
    {
        return default_cost_model(choice);
    }
    return parse_cost_model(read_file(choice), preset);
}

void emit(const std::string& out, const std::string& text)
{
    if (out.empty() || out == "-")
    {
        std::cout << text;
    }
    else
    {
        write_file(out, text);
    }
}

bool report_diagnostics(const std::vector<Diagnostic>& diagnostics)
{
    for (const auto& d : diagnostics)
    {
        std::cerr << d.code << " at " << d.path << ": " << d.message << "\n";
    }
    return diagnostics.empty();
}

struct Paths
{
    std::string start;
    std::string end;
    std::string spec;
    std::string out;
};

int run_compile(const Paths& p)
{
    const ChartSpec start = parse_chart(read_file(p.start));
    const ChartSpec end = parse_chart(read_file(p.end));
    const TransitionSpec spec = parse_transition(read_file(p.spec));
    if (!report_diagnostics(validate_transition(spec, start, end)))
    {
        return exit_validation;
    }
    const AnimationPlan plan = compile_plan(start, end, spec);
    for (const auto& w : plan.warnings)
    {
        std::cerr << "warning: " << w << "\n";
    }
    emit(p.out, serialize_plan(plan));
    return exit_ok;
}

int run_validate(const Paths& p)
{
    const ChartSpec start = parse_chart(read_file(p.start));
    const ChartSpec end = parse_chart(read_file(p.end));
    const TransitionSpec spec = parse_transition(read_file(p.spec));
    if (!report_diagnostics(validate_transition(spec, start, end)))
    {
        return exit_validation;
    }
    std::cout << "ok\n";
    return exit_ok;
}

int run_recommend(const Paths& p, const RecommendOptions& options)
{
    const ChartSpec start = parse_chart(read_file(p.start));
    const ChartSpec end = parse_chart(read_file(p.end));
    const Recommendation rec = recommend(start, end, options);
    const auto report = recommendation_to_json(rec, options.top);

    for (const auto& w : rec.warnings)
    {
        std::cerr << "warning: " << w << "\n";
    }
    for (const auto& e : rec.enumeration)
    {
        std::cout << e.stages << " stage(s):";
        for (const auto& c : e.components)
        {
            std::cout << " " << component_label(c.component) << " raw " << c.raw << " / pruned " << c.pruned << ";";
        }
        std::cout << " candidates " << e.combined << "\n";
    }
    for (std::size_t i = 0; i < rec.candidates.size() && i < options.top; ++i)
    {
        std::cout << "#" << i + 1 << " score " << format_number(rec.candidates[i].score) << "  "
                  << rec.candidates[i].signature << "\n";
    }

    if (!p.out.empty())
    {
        fs::create_directories(p.out);
        write_file((fs::path(p.out) / "report.json").string(), report.dump(2) + "\n");
        for (std::size_t i = 0; i < rec.candidates.size() && i < options.top; ++i)
        {
            const auto name = "candidate-" + std::to_string(i + 1) + ".json";
            write_file((fs::path(p.out) / name).string(), serialize_transition(rec.candidates[i].spec));
        }
    }
    if (rec.candidates.empty())
    {
        for (const auto& e : rec.enumeration)
        {
            for (const auto& c : e.components)
            {
                for (const auto& why : c.explanations)
                {
                    std::cerr << "pruned " << why << "\n";
                }
            }
        }
        return exit_empty;
    }
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Compile and recommend animated chart transitions"};
    app.require_subcommand(1);

    Paths paths;
    RecommendOptions options;
    std::size_t stages = 3;
    double total = 2000;
    std::size_t top = 5;
    std::string cost_model = "tuned";
    std::string preset = "tuned";
    int port = default_port();
    std::string host = "127.0.0.1";
    std::string assets;
    std::string examples = STAGECRAFT_FIXTURE_DIR;

    auto* compile = app.add_subcommand("compile", "Compile a transition into an animation plan");
    compile->add_option("--start", paths.start, "Start chart")->required();
    compile->add_option("--end", paths.end, "End chart")->required();
    compile->add_option("--spec", paths.spec, "Transition spec")->required();
    compile->add_option("--out", paths.out, "Plan output path (stdout when omitted)");

    auto* validate = app.add_subcommand("validate", "Check a transition against its charts");
    validate->add_option("--start", paths.start, "Start chart")->required();
    validate->add_option("--end", paths.end, "End chart")->required();
    validate->add_option("--spec", paths.spec, "Transition spec")->required();

    auto* rec = app.add_subcommand("recommend", "Enumerate and rank staged transitions");
    rec->add_option("--start", paths.start, "Start chart")->required();
    rec->add_option("--end", paths.end, "End chart")->required();
    rec->add_option("--stages", stages, "Largest stage count")->check(CLI::Range(1, 4));
    rec->add_option("--total-duration", total, "Total duration in ms")->check(CLI::PositiveNumber);
    rec->add_option("--top", top, "Candidates to write")->check(CLI::PositiveNumber);
    rec->add_option("--cost-model", cost_model, "initial, tuned, or a cost-model file");
    rec->add_option("--preset", preset, "Capacity preset read from a cost-model file");
    rec->add_option("--out", paths.out, "Directory for report.json and candidate specs");

    auto* serve_cmd = app.add_subcommand("serve", "Run the local HTTP service");
    serve_cmd->add_option("--port", port, "Port (default $STAGECRAFT_PORT or 8080)");
    serve_cmd->add_option("--host", host, "Bind address");
    serve_cmd->add_option("--assets", assets, "Player static assets directory");
    serve_cmd->add_option("--examples", examples, "Example fixtures directory");
    serve_cmd->add_option("--cost-model", cost_model, "initial, tuned, or a cost-model file");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (compile->parsed())
        {
            return run_compile(paths);
        }
        if (validate->parsed())
        {
            return run_validate(paths);
        }
        if (rec->parsed())
        {
            options.max_stages = stages;
            options.total_ms = static_cast<std::int64_t>(total);
            options.top = top;
            options.model = load_model(cost_model, preset);
            return run_recommend(paths, options);
        }
        ServiceConfig config;
        config.fixture_dir = examples;
        config.assets_dir = assets;
        config.model = load_model(cost_model, preset);
        return serve(config, host, port) ? exit_ok : exit_io;
    }
    catch (const Error& e)
    {
        std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what();
        if (e.offset())
        {
            std::cerr << " at byte " << *e.offset();
        }
        std::cerr << "\n";
        return e.code() == ErrorCode::io ? exit_io : exit_validation;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return exit_io;
    }
}
