#include "stagecraft/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stagecraft/error.hpp"

namespace stagecraft
{

std::string path_label(const std::vector<std::size_t>& path)
{
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i)
    {
        if (i > 0)
        {
            out += '/';
        }
        out += std::to_string(path[i]);
    }
    return out.empty() ? "root" : out;
}

std::int64_t resolve_ms(const TimeValue& t, std::optional<double> total)
{
    if (!t.is_ratio)
    {
        return std::llround(t.value);
    }
    if (!total)
    {
        throw Error(ErrorCode::missing_total, "ratio timing needs a root totalDuration");
    }
    return std::llround(t.value * *total);
}

namespace
{

const std::vector<Block>& children_of(const Block& b)
{
    if (const auto* s = std::get_if<Sync>(&b.node))
    {
        return s->blocks;
    }
    return std::get<Concat>(b.node).blocks;
}

std::int64_t node_duration(const Block& b, std::optional<double> total)
{
    if (const auto* step = std::get_if<Step>(&b.node))
    {
        return resolve_ms(step->timing.delay, total) + resolve_ms(step->timing.duration, total);
    }
    std::int64_t acc = 0;
    const bool parallel = std::holds_alternative<Sync>(b.node);
    for (const auto& c : children_of(b))
    {
        const std::int64_t d = block_duration(c, total);
        acc = parallel ? std::max(acc, d) : acc + d;
    }
    return acc;
}

// Maps t in [0, natural] onto [0, fit], rounding half up.
std::int64_t fit_time(std::int64_t t, std::int64_t natural, std::int64_t fit)
{
    if (natural == 0)
    {
        return 0;
    }
    return (2 * t * fit + natural) / (2 * natural);
}

class Placer
{
public:
    Placer(std::optional<double> total, std::vector<ScheduledStep>& out) : total_(total), out_(out) {}

    void place(const Block& b, std::int64_t start, std::vector<std::size_t>& path,
               const std::optional<EnumeratorBinding>& binding)
    {
        const std::optional<EnumeratorBinding> bound = b.binding ? b.binding : binding;
        if (b.fit_ms)
        {
            const std::size_t first = out_.size();
            Block inner;
            inner.node = b.node;
            place(inner, 0, path, bound);
            const std::int64_t natural = node_duration(inner, total_);
            for (std::size_t i = first; i < out_.size(); ++i)
            {
                ScheduledStep& s = out_[i];
                const std::int64_t window_start = s.start_ms - s.delay_ms;
                const std::int64_t a = fit_time(window_start, natural, *b.fit_ms);
                s.start_ms = start + fit_time(s.start_ms, natural, *b.fit_ms);
                s.end_ms = start + fit_time(s.end_ms, natural, *b.fit_ms);
                s.delay_ms = s.start_ms - start - a;
                s.duration_ms = s.end_ms - s.start_ms;
            }
            return;
        }
        if (const auto* step = std::get_if<Step>(&b.node))
        {
            ScheduledStep s;
            s.path = path;
            s.step = *step;
            s.binding = bound;
            s.delay_ms = resolve_ms(step->timing.delay, total_);
            s.duration_ms = resolve_ms(step->timing.duration, total_);
            s.start_ms = start + s.delay_ms;
            s.end_ms = s.start_ms + s.duration_ms;
            s.order = out_.size();
            out_.push_back(std::move(s));
            return;
        }
        if (const auto* sync = std::get_if<Sync>(&b.node))
        {
            const std::int64_t length = node_duration(b, total_);
            for (std::size_t i = 0; i < sync->blocks.size(); ++i)
            {
                const Block& c = sync->blocks[i];
                const std::int64_t offset = sync->at == SyncAt::start ? 0 : length - block_duration(c, total_);
                path.push_back(i);
                place(c, start + offset, path, bound);
                path.pop_back();
            }
            return;
        }
        const auto& concat = std::get<Concat>(b.node);
        if (concat.enumerator)
        {
            throw Error(ErrorCode::schedule, "concat enumerator at " + path_label(path) + " was not expanded");
        }
        std::int64_t cursor = start;
        for (std::size_t i = 0; i < concat.blocks.size(); ++i)
        {
            path.push_back(i);
            place(concat.blocks[i], cursor, path, bound);
            path.pop_back();
            cursor += block_duration(concat.blocks[i], total_);
        }
    }

private:
    std::optional<double> total_;
    std::vector<ScheduledStep>& out_;
};

const FilterTransform* find_filter(const ChartSpec& chart, const std::string& dataset, const FilterRef& ref)
{
    const FilterTransform* fallback = nullptr;
    for (const auto& ds : chart.datasets)
    {
        if (!dataset.empty() && ds.name != dataset)
        {
            continue;
        }
        for (const auto& t : ds.transforms)
        {
            if (const auto* f = std::get_if<FilterTransform>(&t.op); f != nullptr && f->field == ref.field)
            {
                if (f->op == ref.op)
                {
                    return f;
                }
                if (fallback == nullptr)
                {
                    fallback = f;
                }
            }
        }
    }
    return fallback;
}

bool contains_mark(const Block& b, const std::vector<std::string>& marks)
{
    bool found = false;
    for_each_step(b, [&](const Step& s, const std::vector<std::size_t>&) {
        if (s.component.kind == ComponentKind::mark &&
            std::find(marks.begin(), marks.end(), s.component.name) != marks.end())
        {
            found = true;
        }
    });
    return found;
}

std::string first_mark_dataset(const Block& b, const ChartSpec& start, const ChartSpec& end)
{
    std::string found;
    for_each_step(b, [&](const Step& s, const std::vector<std::size_t>&) {
        if (!found.empty() || s.component.kind != ComponentKind::mark)
        {
            return;
        }
        const MarkDef* m = end.find_mark(s.component.name);
        if (m == nullptr)
        {
            m = start.find_mark(s.component.name);
        }
        if (m != nullptr)
        {
            found = m->dataset;
        }
    });
    return found;
}

}  // namespace

std::int64_t block_duration(const Block& block, std::optional<double> total)
{
    if (block.fit_ms)
    {
        return *block.fit_ms;
    }
    return node_duration(block, total);
}

Schedule schedule_timeline(const Block& block, std::int64_t clock_start, std::optional<double> total)
{
    Schedule schedule;
    std::vector<std::size_t> path;
    Placer(total, schedule.steps).place(block, clock_start, path, std::nullopt);
    std::stable_sort(schedule.steps.begin(), schedule.steps.end(), [](const ScheduledStep& a, const ScheduledStep& b) {
        return a.start_ms != b.start_ms ? a.start_ms < b.start_ms : a.order < b.order;
    });
    schedule.total_end_ms = clock_start;
    for (const auto& s : schedule.steps)
    {
        schedule.total_end_ms = std::max(schedule.total_end_ms, s.end_ms);
    }
    return schedule;
}

std::vector<Value> resolve_enumerator_values(const EnumeratorSpec& e, const ChartSpec& start, const ChartSpec& end,
                                             const std::string& dataset)
{
    if (!e.step_size)
    {
        if (e.values.empty())
        {
            throw Error(ErrorCode::invalid_value, "enumerator has no values");
        }
        return e.values;
    }
    const std::string ds = e.filter.dataset.empty() ? dataset : e.filter.dataset;
    const FilterTransform* a = find_filter(start, ds, e.filter);
    const FilterTransform* b = find_filter(end, ds, e.filter);
    if (a == nullptr || b == nullptr)
    {
        throw Error(ErrorCode::unknown_field, "no filter on '" + e.filter.field + "' in both charts to sweep");
    }
    if (a->rhs.size() != 1 || b->rhs.size() != 1 || !is_number(a->rhs[0]) || !is_number(b->rhs[0]))
    {
        throw Error(ErrorCode::type_mismatch, "stepSize enumeration needs numeric filter values on '" + e.filter.field + "'");
    }
    const double from = as_number(a->rhs[0]);
    const double to = as_number(b->rhs[0]);
    const double step = *e.step_size;
    if (from == to)
    {
        return {Value{from}};
    }
    if ((to - from) * step < 0.0)
    {
        throw Error(ErrorCode::invalid_value, "stepSize " + format_number(step) + " does not move from " +
                                                  format_number(from) + " toward " + format_number(to));
    }
    const auto count = static_cast<long long>(std::floor((to - from) / step + 1e-9));
    std::vector<Value> values;
    for (long long i = 0; i <= count; ++i)
    {
        values.emplace_back(from + static_cast<double>(i) * step);
    }
    if (std::abs(as_number(values.back()) - to) > 1e-9 * std::max(1.0, std::abs(to)))
    {
        values.emplace_back(to);
    }
    else
    {
        values.back() = Value{to};
    }
    return values;
}

Concat expand_concat_enumerator(const Concat& concat, const std::vector<Value>& values, std::optional<double> total)
{
    if (values.empty())
    {
        throw Error(ErrorCode::invalid_value, "concat enumerator has no values");
    }
    if (!concat.enumerator)
    {
        throw Error(ErrorCode::internal, "concat has no enumerator");
    }
    Concat body;
    body.blocks = concat.blocks;
    body.auto_scale_order = concat.auto_scale_order;
    const std::int64_t length = block_duration(Block{body}, total);
    const auto k = static_cast<std::int64_t>(values.size());
    const std::int64_t share = length / k;

    const FilterRef filter = concat.enumerator->filter;
    Concat out;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        Block copy{body};
        const bool last = i + 1 == values.size();
        copy.fit_ms = last ? length - share * (k - 1) : share;
        copy.binding = EnumeratorBinding{filter, values[i], i, values.size()};
        out.blocks.push_back(std::move(copy));
    }
    return out;
}

Block expand_concat_enumerators(const Block& block, const ChartSpec& start, const ChartSpec& end,
                                std::optional<double> total)
{
    Block out = block;
    if (auto* sync = std::get_if<Sync>(&out.node))
    {
        for (auto& c : sync->blocks)
        {
            c = expand_concat_enumerators(c, start, end, total);
        }
    }
    else if (auto* concat = std::get_if<Concat>(&out.node))
    {
        for (auto& c : concat->blocks)
        {
            c = expand_concat_enumerators(c, start, end, total);
        }
        if (concat->enumerator)
        {
            const std::string dataset = concat->enumerator->filter.dataset.empty() ? first_mark_dataset(block, start, end)
                                                                                   : concat->enumerator->filter.dataset;
            const auto values = resolve_enumerator_values(*concat->enumerator, start, end, dataset);
            *concat = expand_concat_enumerator(*concat, values, total);
        }
    }
    return out;
}

std::vector<std::size_t> auto_order_children(const Concat& concat)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < concat.blocks.size(); ++i)
    {
        if (contains_mark(concat.blocks[i], concat.auto_scale_order))
        {
            out.push_back(i);
        }
    }
    return out;
}

AutoOrder resolve_auto_scale_order(const Concat& concat,
                                   const std::function<bool(const std::vector<std::size_t>&)>& overflow_free)
{
    std::vector<std::size_t> identity(concat.blocks.size());
    for (std::size_t i = 0; i < identity.size(); ++i)
    {
        identity[i] = i;
    }
    const std::vector<std::size_t> slots = auto_order_children(concat);
    std::vector<std::size_t> perm = slots;
    do
    {
        std::vector<std::size_t> order = identity;
        for (std::size_t i = 0; i < slots.size(); ++i)
        {
            order[slots[i]] = perm[i];
        }
        if (overflow_free(order))
        {
            return {order, std::nullopt};
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::string names;
    for (const auto& n : concat.auto_scale_order)
    {
        names += (names.empty() ? "" : ", ") + n;
    }
    return {identity, "autoScaleOrder found no order without scale overflow for " + names + "; keeping the original order"};
}

Concat reorder_concat(const Concat& concat, const std::vector<std::size_t>& order)
{
    Concat out = concat;
    for (std::size_t i = 0; i < order.size(); ++i)
    {
        out.blocks[i] = concat.blocks[order[i]];
    }
    return out;
}

std::optional<std::string> find_overlapping_steps(const Schedule& schedule)
{
    std::map<ComponentRef, const ScheduledStep*> last;
    for (const auto& s : schedule.steps)
    {
        if (s.step.component.kind == ComponentKind::pause)
        {
            continue;
        }
        const auto it = last.find(s.step.component);
        if (it != last.end() && s.start_ms < it->second->end_ms && s.duration_ms > 0 && it->second->duration_ms > 0)
        {
            return "steps " + path_label(it->second->path) + " and " + path_label(s.path) + " on " +
                   component_label(s.step.component) + " overlap in time";
        }
        if (it == last.end() || s.end_ms >= it->second->end_ms)
        {
            last[s.step.component] = &s;
        }
    }
    return std::nullopt;
}

}  // namespace stagecraft
