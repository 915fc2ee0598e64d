// Wall-clock companions to the instrumented step counts: per-update and per-answer latency as the active
// domain grows. Flat curves for the dynamic engine, growing ones for the naive baseline.

#include <dynq/constraints.hpp>
#include <dynq/engine.hpp>
#include <dynq/parser.hpp>
#include <dynq/skip_set.hpp>
#include <dynq/union_enumerator.hpp>
#include <dynq/workload.hpp>

#include <benchmark/benchmark.h>

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace {

constexpr std::string_view schema_text = "rel S/1\nrel T/1\nrel E/2\nrel F/2\n";

struct Setup
{
    dynq::Schema schema = dynq::parse_schema(schema_text);
    dynq::ConstantPool pool;
    dynq::UCQ query;
    std::vector<dynq::Value> domain;
    std::unique_ptr<dynq::QueryEngine> engine;
    std::vector<dynq::UpdateCommand> stream;

    Setup(std::string_view text, dynq::EngineKind kind, std::size_t adom, std::size_t stream_length = 4096)
    {
        query = dynq::parse_query(text, schema, pool);
        domain = dynq::int_domain(pool, adom);
        engine = dynq::make_engine(query, schema, kind);
        engine->load(dynq::random_db(schema, domain, 2 * adom, 7));
        stream = dynq::random_stream(schema, domain, stream_length, 11);
    }
};

void update_latency(benchmark::State &state, std::string_view text, dynq::EngineKind kind)
{
    Setup s(text, kind, static_cast<std::size_t>(state.range(0)));
    std::size_t i = 0;
    for (auto _ : state) {
        s.engine->update(s.stream[i]);
        i = (i + 1) % s.stream.size();
    }
    state.SetLabel(s.engine->description());
}

void count_latency(benchmark::State &state, std::string_view text, dynq::EngineKind kind)
{
    Setup s(text, kind, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(s.engine->count());
    state.SetLabel(s.engine->description());
}

void enumerate_all(benchmark::State &state, std::string_view text, dynq::EngineKind kind)
{
    Setup s(text, kind, static_cast<std::size_t>(state.range(0)));
    std::size_t emitted = 0;
    for (auto _ : state) {
        s.engine->enumerate([&](const dynq::Tuple &t) {
            benchmark::DoNotOptimize(t.data());
            ++emitted;
            return true;
        });
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(emitted));
    state.SetLabel(s.engine->description());
}

void BM_DynamicUpdate_ExistsEdge(benchmark::State &state)
{
    update_latency(state, "Q(x) :- E(x,y).", dynq::EngineKind::dynamic);
}
BENCHMARK(BM_DynamicUpdate_ExistsEdge)->RangeMultiplier(4)->Range(1 << 8, 1 << 14);

void BM_DynamicUpdate_Star(benchmark::State &state)
{
    update_latency(state, "Q(x) :- E(x,y), F(x,z), S(x).", dynq::EngineKind::dynamic);
}
BENCHMARK(BM_DynamicUpdate_Star)->RangeMultiplier(4)->Range(1 << 8, 1 << 14);

void BM_DynamicUpdate_TestOnlyPSet(benchmark::State &state)
{
    update_latency(state, "Q(x,y) :- S(x), E(x,y), T(y).", dynq::EngineKind::dynamic);
}
BENCHMARK(BM_DynamicUpdate_TestOnlyPSet)->RangeMultiplier(4)->Range(1 << 8, 1 << 14);

void BM_DynamicCount_Union(benchmark::State &state)
{
    count_latency(state, "Q(x) :- S(x).\nQ(x) :- T(x).\nQ(x) :- E(x,y).", dynq::EngineKind::dynamic);
}
BENCHMARK(BM_DynamicCount_Union)->RangeMultiplier(4)->Range(1 << 8, 1 << 14);

void BM_NaiveCount_ExistsEdge(benchmark::State &state)
{
    count_latency(state, "Q(x) :- E(x,y).", dynq::EngineKind::naive);
}
BENCHMARK(BM_NaiveCount_ExistsEdge)->RangeMultiplier(4)->Range(1 << 8, 1 << 12);

void BM_DynamicEnumerate_ExistsEdge(benchmark::State &state)
{
    enumerate_all(state, "Q(x) :- E(x,y).", dynq::EngineKind::dynamic);
}
BENCHMARK(BM_DynamicEnumerate_ExistsEdge)->RangeMultiplier(4)->Range(1 << 8, 1 << 14);

/// Three overlapping integer lists; the union enumerator's cost per emitted element.
void BM_UnionEnumerator(benchmark::State &state)
{
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(5);
    std::vector<dynq::ListSkipSet<std::uint64_t>> lists;
    for (int j = 0; j < 3; ++j) {
        std::vector<std::uint64_t> items;
        for (std::uint64_t v = 0; v < 2 * n; ++v)
            if (rng() % 2)
                items.push_back(v);
        lists.emplace_back(std::move(items));
    }
    std::vector<const dynq::SkipSet<std::uint64_t> *> sets;
    for (const auto &l : lists)
        sets.push_back(&l);
    std::size_t emitted = 0;
    for (auto _ : state) {
        dynq::UnionEnumerator<std::uint64_t> e(sets);
        while (auto t = e.next()) {
            benchmark::DoNotOptimize(*t);
            ++emitted;
        }
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(emitted));
}
BENCHMARK(BM_UnionEnumerator)->RangeMultiplier(10)->Range(1000, 100000);

void BM_FdQsetUpdate(benchmark::State &state)
{
    const dynq::Schema schema = dynq::parse_schema("rel S/1\nrel E/2\nrel T/1\n");
    dynq::ConstantPool pool;
    const std::vector<dynq::Value> domain = dynq::int_domain(pool, static_cast<std::size_t>(state.range(0)));
    dynq::FdQsetEngine engine(schema);
    const std::vector<dynq::UpdateCommand> stream = dynq::random_stream(schema, domain, 4096, 3);
    std::size_t i = 0;
    for (auto _ : state) {
        try {
            engine.update(stream[i]);
        } catch (const dynq::constraint_violation &) {
        }
        i = (i + 1) % stream.size();
    }
}
BENCHMARK(BM_FdQsetUpdate)->RangeMultiplier(4)->Range(1 << 8, 1 << 14);

}

BENCHMARK_MAIN();
