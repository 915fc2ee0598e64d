#include "dynq/ucq_engine.hpp"

#include "dynq/errors.hpp"
#include "dynq/homomorphism.hpp"

#include <bit>

namespace dynq {

UcqTestEngine::UcqTestEngine(const UCQ &q, const Schema &schema) : arity_(q.arity), mirror_(schema)
{
    for (const CQ &d : q.disjuncts) {
        GeneralizedCQ g = t_decompose(d);
        Disjunct dj{d, std::move(g.phi0), {}};
        for (auto &c : g.components)
            dj.components.push_back({c.free, std::make_unique<CqEvaluator>(c.query, schema)});
        disjuncts_.push_back(std::move(dj));
    }
}

void UcqTestEngine::load(const Database &db)
{
    for (const UpdateCommand &cmd : db.as_insertions())
        update(cmd);
}

void UcqTestEngine::update(const UpdateCommand &cmd)
{
    ++steps_;
    mirror_.apply(cmd);
    for (Disjunct &d : disjuncts_)
        for (Component &c : d.components)
            c.engine->update(cmd);
}

bool UcqTestEngine::test_disjunct(const Disjunct &d, const Tuple &t) const
{
    binding_.assign(d.source.num_vars(), std::nullopt);
    for (std::size_t i = 0; i < t.size(); ++i) {
        ++steps_;
        const dynq::Term &h = d.source.head[i];
        if (h.is_const()) {
            if (h.id != t[i])
                return false;
        } else if (binding_[h.id]) {
            if (*binding_[h.id] != t[i])
                return false;
        } else {
            binding_[h.id] = t[i];
        }
    }
    for (const Atom &a : d.phi0) {
        ++steps_;
        scratch_.clear();
        for (const dynq::Term &x : a.args)
            scratch_.push_back(x.is_const() ? x.id : *binding_[x.id]);
        if (not mirror_.contains(a.relation, scratch_))
            return false;
    }
    for (const Component &c : d.components) {
        ++steps_;
        Tuple proj;
        proj.reserve(c.free.size());
        for (VarId v : c.free)
            proj.push_back(*binding_[v]);
        if (not c.engine->test(proj))
            return false;
    }
    return true;
}

bool UcqTestEngine::test(const Tuple &t) const
{
    if (t.size() != arity_)
        throw precondition_error("test tuple has arity " + std::to_string(t.size()) + ", expected " +
                                 std::to_string(arity_));
    for (const Disjunct &d : disjuncts_)
        if (test_disjunct(d, t))
            return true;
    return false;
}

std::uint64_t UcqTestEngine::steps() const
{
    std::uint64_t s = steps_;
    for (const Disjunct &d : disjuncts_)
        for (const Component &c : d.components)
            s += c.engine->steps();
    return s;
}

UcqEnumEngine::UcqEnumEngine(const UCQ &q, const Schema &schema) : arity_(q.arity)
{
    for (const CQ &d : q.disjuncts)
        disjuncts_.push_back(std::make_unique<CqEvaluator>(d, schema));
}

void UcqEnumEngine::load(const Database &db)
{
    for (const UpdateCommand &cmd : db.as_insertions())
        update(cmd);
}

void UcqEnumEngine::update(const UpdateCommand &cmd)
{
    ++steps_;
    for (auto &d : disjuncts_)
        d->update(cmd);
}

bool UcqEnumEngine::test(const Tuple &t) const
{
    if (t.size() != arity_)
        throw precondition_error("test tuple has arity " + std::to_string(t.size()) + ", expected " +
                                 std::to_string(arity_));
    for (const auto &d : disjuncts_) {
        ++steps_;
        if (d->test(t))
            return true;
    }
    return false;
}

bool UcqEnumEngine::answer() const
{
    for (const auto &d : disjuncts_) {
        ++steps_;
        if (d->answer())
            return true;
    }
    return false;
}

UnionEnumerator<Tuple, TupleHash> UcqEnumEngine::enumerator() const
{
    std::vector<const SkipSet<Tuple> *> sets;
    for (const auto &d : disjuncts_)
        sets.push_back(d.get());
    return UnionEnumerator<Tuple, TupleHash>(std::move(sets));
}

void UcqEnumEngine::enumerate(const std::function<void(const Tuple &)> &emit) const
{
    auto e = enumerator();
    while (auto t = e.next())
        emit(*t);
}

std::uint64_t UcqEnumEngine::steps() const
{
    std::uint64_t s = steps_;
    for (const auto &d : disjuncts_)
        s += d->steps();
    return s;
}

UcqCountEngine::UcqCountEngine(const UCQ &q, const Schema &schema, std::size_t budget)
{
    if (not is_exhaustively_q_hierarchical(q, budget))
        throw precondition_error("inclusion-exclusion counting requires an exhaustively q-hierarchical union");
    const std::size_t d = q.disjuncts.size();
    std::vector<std::optional<CQ>> inter(std::size_t{1} << d);
    for (std::size_t mask = 1; mask < inter.size(); ++mask) {
        const auto top = static_cast<std::size_t>(std::bit_width(mask) - 1);
        const std::size_t rest = mask & ~(std::size_t{1} << top);
        if (rest == 0)
            inter[mask] = q.disjuncts[top];
        else if (inter[rest])
            inter[mask] = intersect(*inter[rest], q.disjuncts[top]);
        Summand t;
        t.sign = std::popcount(mask) % 2 == 1 ? 1 : -1;
        for (std::size_t i = 0; i < d; ++i)
            if (mask >> i & 1U)
                t.subset.push_back(i);
        if (inter[mask])
            t.engine = std::make_unique<CqEvaluator>(core_of_cq(*inter[mask], budget), schema);
        terms_.push_back(std::move(t));
    }
    refresh();
}

void UcqCountEngine::load(const Database &db)
{
    for (const UpdateCommand &cmd : db.as_insertions())
        update(cmd);
}

void UcqCountEngine::update(const UpdateCommand &cmd)
{
    ++steps_;
    for (Summand &t : terms_)
        if (t.engine)
            t.engine->update(cmd);
    refresh();
}

void UcqCountEngine::refresh()
{
    std::int64_t total = 0;
    for (const Summand &t : terms_) {
        ++steps_;
        if (t.engine)
            total += t.sign * static_cast<std::int64_t>(t.engine->count());
    }
    total_ = total;
}

std::uint64_t UcqCountEngine::count() const
{
    ++steps_;
    return static_cast<std::uint64_t>(total_);
}

std::size_t UcqCountEngine::sub_engines() const
{
    std::size_t n = 0;
    for (const Summand &t : terms_)
        n += t.engine ? 1 : 0;
    return n;
}

std::uint64_t UcqCountEngine::steps() const
{
    std::uint64_t s = steps_;
    for (const Summand &t : terms_)
        if (t.engine)
            s += t.engine->steps();
    return s;
}

}
