#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace dynq {

/// Elementary-step statistics of one routine. Hash operations count as one step each.
struct OpStats
{
    std::uint64_t calls = 0;
    std::uint64_t total_steps = 0;
    std::uint64_t max_steps = 0;
    std::uint64_t last_steps = 0;
    double total_ns = 0;

    void record(std::uint64_t steps, double ns = 0)
    {
        ++calls;
        total_steps += steps;
        last_steps = steps;
        total_ns += ns;
        if (steps > max_steps)
            max_steps = steps;
    }

    double mean_steps() const { return calls ? static_cast<double>(total_steps) / static_cast<double>(calls) : 0.0; }
    double mean_ns() const { return calls ? total_ns / static_cast<double>(calls) : 0.0; }

    void merge(const OpStats &o)
    {
        calls += o.calls;
        total_steps += o.total_steps;
        total_ns += o.total_ns;
        if (o.max_steps > max_steps)
            max_steps = o.max_steps;
    }
};

/// Named step counters: "update", "count", "test", "answer", "start", "next", "build".
struct EngineReport
{
    std::map<std::string, OpStats> ops;

    OpStats &operator[](const std::string &name) { return ops[name]; }
    const OpStats *find(const std::string &name) const
    {
        auto it = ops.find(name);
        return it == ops.end() ? nullptr : &it->second;
    }
    void clear() { ops.clear(); }
};

}
