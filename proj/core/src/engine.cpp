#include "dynq/engine.hpp"

#include "dynq/errors.hpp"
#include "dynq/workload.hpp"

#include <chrono>

namespace dynq {

namespace {

using clock_type = std::chrono::steady_clock;

double since(clock_type::time_point t0)
{
    return std::chrono::duration<double, std::nano>(clock_type::now() - t0).count();
}

}

DynamicEngine::DynamicEngine(const UCQ &q, const Schema &schema, std::size_t budget)
    : DynamicEngine(q, classify(q, budget), schema, budget)
{ }

DynamicEngine::DynamicEngine(const UCQ &q, const ClassReport &classes, const Schema &schema, std::size_t budget)
    : arity_(q.arity), classes_(classes)
{
    const UCQ &core = classes_.core;
    if (core.is_empty_query()) {
        empty_query_ = true;
        caps_ = {true, true, true, true};
        return;
    }
    if (classes_.t_hierarchical) {
        tester_ = std::make_unique<UcqTestEngine>(core, schema);
        caps_.test = true;
    }
    if (classes_.q_hierarchical) {
        enumer_ = std::make_unique<UcqEnumEngine>(core, schema);
        caps_.enumerate = caps_.answer = caps_.test = true;
    }
    if (classes_.exhaustively_q_hierarchical) {
        counter_ = std::make_unique<UcqCountEngine>(core, schema, budget);
        caps_.count = caps_.answer = true;
    }
}

std::string DynamicEngine::description() const
{
    std::string out = "dynamic[";
    bool first = true;
    for (auto [flag, name] : {std::pair{caps_.count, "count"}, std::pair{caps_.test, "test"},
                              std::pair{caps_.enumerate, "enum"}, std::pair{caps_.answer, "answer"}})
        if (flag) {
            out += first ? "" : ",";
            out += name;
            first = false;
        }
    return out + "]";
}

void DynamicEngine::unsupported(const std::string &routine) const
{
    std::string why;
    if (routine == "count")
        why = "counting needs an exhaustively q-hierarchical core";
    else if (routine == "test")
        why = "testing needs a t-hierarchical core";
    else if (routine == "enum")
        why = "enumeration needs a q-hierarchical core";
    else
        why = "answering needs a q-hierarchical core";
    throw unsupported_routine(routine + ": " + why);
}

std::uint64_t DynamicEngine::steps() const
{
    std::uint64_t s = 0;
    if (tester_)
        s += tester_->steps();
    if (enumer_)
        s += enumer_->steps();
    if (counter_)
        s += counter_->steps();
    return s;
}

void DynamicEngine::update(const UpdateCommand &cmd)
{
    const auto t0 = clock_type::now();
    const std::uint64_t before = steps();
    if (tester_)
        tester_->update(cmd);
    if (enumer_)
        enumer_->update(cmd);
    if (counter_)
        counter_->update(cmd);
    report_["update"].record(steps() - before, since(t0));
}

std::uint64_t DynamicEngine::count()
{
    if (not caps_.count)
        unsupported("count");
    const auto t0 = clock_type::now();
    const std::uint64_t before = steps();
    const std::uint64_t c = empty_query_ ? 0 : counter_->count();
    report_["count"].record(steps() - before, since(t0));
    return c;
}

bool DynamicEngine::test(const Tuple &t)
{
    if (not caps_.test)
        unsupported("test");
    if (t.size() != arity_)
        throw precondition_error("test tuple has arity " + std::to_string(t.size()) + ", expected " +
                                 std::to_string(arity_));
    const auto t0 = clock_type::now();
    const std::uint64_t before = steps();
    const bool r = empty_query_ ? false : tester_ ? tester_->test(t) : enumer_->test(t);
    report_["test"].record(steps() - before, since(t0));
    return r;
}

bool DynamicEngine::answer()
{
    if (not caps_.answer)
        unsupported("answer");
    const auto t0 = clock_type::now();
    const std::uint64_t before = steps();
    const bool r = empty_query_ ? false : enumer_ ? enumer_->answer() : counter_->count() > 0;
    report_["answer"].record(steps() - before, since(t0));
    return r;
}

void DynamicEngine::enumerate(const std::function<bool(const Tuple &)> &emit)
{
    if (not caps_.enumerate)
        unsupported("enum");
    if (empty_query_)
        return;
    auto e = enumer_->enumerator();
    OpStats &delay = report_["delay"];
    for (;;) {
        const auto t0 = clock_type::now();
        const std::uint64_t before = steps() + e.steps();
        auto t = e.next();
        delay.record(steps() + e.steps() - before, since(t0));
        if (not t or not emit(*t))
            break;
    }
}

EngineKind parse_engine_kind(const std::string &name)
{
    if (name == "auto")
        return EngineKind::automatic;
    if (name == "dynamic")
        return EngineKind::dynamic;
    if (name == "naive")
        return EngineKind::naive;
    throw std::invalid_argument("unknown engine '" + name + "' (expected auto, dynamic or naive)");
}

std::unique_ptr<QueryEngine> make_engine(const UCQ &q, const Schema &schema, EngineKind kind, std::size_t budget)
{
    if (kind == EngineKind::naive)
        return std::make_unique<NaiveEngine>(q, schema);
    ClassReport classes = classify(q, budget);
    if (kind == EngineKind::automatic and not classes.t_hierarchical)
        return std::make_unique<NaiveEngine>(q, schema);
    return std::make_unique<DynamicEngine>(q, classes, schema, budget);
}

}
