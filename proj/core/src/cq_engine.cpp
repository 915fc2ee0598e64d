#include "dynq/cq_engine.hpp"

#include "dynq/atom_set.hpp"
#include "dynq/errors.hpp"
#include "dynq/hierarchy.hpp"

#include <algorithm>
#include <bit>

namespace dynq {

struct CqEngine::ChildSet
{
    std::unordered_map<Value, std::unique_ptr<Slot>> slots;
    std::uint64_t sum = 0;  ///< sum of slot weights
    std::size_t live_count = 0;
    Slot *head = nullptr;
    Slot *tail = nullptr;
};

struct CqEngine::Slot
{
    Value value = 0;
    std::size_t node = 0;
    Slot *parent = nullptr;
    ChildSet *owner = nullptr;
    std::uint64_t mask = 0;  ///< atoms ending here whose tuple is present
    std::uint64_t weight = 0;  ///< free extensions below; 0/1 at quantified nodes
    std::size_t refs = 0;  ///< present atom tuples routed through this slot
    bool live = false;  ///< weight > 0, linked into owner's list
    Slot *prev = nullptr;
    Slot *next = nullptr;
    std::vector<ChildSet> children;
};

CqEngine::~CqEngine() = default;

CqEngine::CqEngine(const CQ &q, const Schema &schema) : arity_(q.arity())
{
    if (q.has_constants())
        throw precondition_error("the dynamic index requires a constant-free query");
    if (q.body.empty())
        throw precondition_error("the dynamic index requires a nonempty body");
    for (std::size_t i = 0; i < q.head.size(); ++i)
        for (std::size_t j = i + 1; j < q.head.size(); ++j)
            if (q.head[i] == q.head[j])
                throw precondition_error("the dynamic index requires pairwise distinct head variables");
    if (not is_q_hierarchical(q))
        throw precondition_error("the dynamic index requires a q-hierarchical query");

    std::vector<AtomSet> sets(q.num_vars(), AtomSet(q.body.size()));
    std::vector<VarId> vars;
    for (std::size_t i = 0; i < q.body.size(); ++i)
        for (const Term &t : q.body[i].args) {
            if (sets[t.id].empty())
                vars.push_back(t.id);
            sets[t.id].set(i);
        }
    std::sort(vars.begin(), vars.end(), [&](VarId a, VarId b) {
        const auto ca = sets[a].count(), cb = sets[b].count();
        if (ca != cb)
            return ca > cb;
        if (q.is_free(a) != q.is_free(b))
            return q.is_free(a);
        return a < b;
    });

    std::vector<std::ptrdiff_t> node_of(q.num_vars(), -1);
    for (std::size_t i = 0; i < vars.size(); ++i) {
        Node n;
        n.var = vars[i];
        n.free = q.is_free(vars[i]);
        for (std::size_t j = i; j-- > 0;)
            if (sets[vars[i]].subset_of(sets[vars[j]])) {
                n.parent = static_cast<std::ptrdiff_t>(j);
                break;
            }
        if (n.parent < 0) {
            n.child_index = roots_.size();
            roots_.push_back(i);
        } else {
            auto &siblings = nodes_[static_cast<std::size_t>(n.parent)].children;
            n.child_index = siblings.size();
            siblings.push_back(i);
        }
        node_of[vars[i]] = static_cast<std::ptrdiff_t>(i);
        nodes_.push_back(n);
    }
    for (std::size_t p = 0; p < q.head.size(); ++p)
        nodes_[static_cast<std::size_t>(node_of[q.head[p].id])].head_position = static_cast<std::ptrdiff_t>(p);

    plans_by_relation_.resize(schema.size());
    for (std::size_t i = 0; i < q.body.size(); ++i) {
        const Atom &a = q.body[i];
        if (a.args.empty()) {
            plans_by_relation_[a.relation].push_back(plans_.size());
            plans_.push_back(AtomPlan{});
            nullary_atoms_.push_back(plans_.size() - 1);
            continue;
        }
        std::size_t deepest = 0;
        for (const Term &t : a.args)
            deepest = std::max(deepest, static_cast<std::size_t>(node_of[t.id]));
        AtomPlan plan;
        for (auto n = static_cast<std::ptrdiff_t>(deepest); n >= 0; n = nodes_[static_cast<std::size_t>(n)].parent)
            plan.chain.push_back(static_cast<std::size_t>(n));
        std::reverse(plan.chain.begin(), plan.chain.end());
        for (std::size_t n : plan.chain) {
            const VarId v = nodes_[n].var;
            auto pos = std::find(a.args.begin(), a.args.end(), Term::var(v));
            if (pos == a.args.end())
                throw precondition_error("atom variables do not form a path of the variable forest");
            plan.arg_of_depth.push_back(static_cast<std::size_t>(pos - a.args.begin()));
        }
        for (std::size_t p = 0; p < a.args.size(); ++p) {
            const auto first = static_cast<std::size_t>(std::find(a.args.begin(), a.args.end(), a.args[p]) - a.args.begin());
            if (first != p)
                plan.equal_args.emplace_back(first, p);
        }
        Node &end = nodes_[deepest];
        if (std::popcount(end.full_mask) >= 64)
            throw precondition_error("too many atoms end at one variable");
        plan.bit = std::uint64_t{1} << std::popcount(end.full_mask);
        end.full_mask |= plan.bit;
        plans_by_relation_[a.relation].push_back(plans_.size());
        plans_.push_back(std::move(plan));
    }
    nullary_present_.assign(plans_.size(), false);
    nullary_missing_ = nullary_atoms_.size();

    std::vector<std::size_t> stack(roots_.rbegin(), roots_.rend());
    while (not stack.empty()) {
        const std::size_t n = stack.back();
        stack.pop_back();
        if (not nodes_[n].free)
            continue;
        free_order_.push_back(n);
        for (auto it = nodes_[n].children.rbegin(); it != nodes_[n].children.rend(); ++it)
            stack.push_back(*it);
    }
    free_pos_.assign(nodes_.size(), -1);
    for (std::size_t i = 0; i < free_order_.size(); ++i)
        free_pos_[free_order_[i]] = static_cast<std::ptrdiff_t>(i);

    for (std::size_t r = 0; r < roots_.size(); ++r)
        root_sets_.push_back(std::make_unique<ChildSet>());
    recompute_total();
}

CqEngine::ChildSet &CqEngine::set_for(std::size_t node, Slot *parent) const
{
    const Node &n = nodes_[node];
    return parent ? parent->children[n.child_index] : *root_sets_[n.child_index];
}

void CqEngine::load(const Database &db)
{
    for (const UpdateCommand &cmd : db.as_insertions())
        update(cmd);
}

void CqEngine::update(const UpdateCommand &cmd)
{
    const std::uint64_t before = steps_;
    ++steps_;
    if (cmd.relation < plans_by_relation_.size())
        for (std::size_t p : plans_by_relation_[cmd.relation])
            apply_atom(plans_[p], cmd.kind, cmd.tuple);
    update_stats_.record(steps_ - before);
}

void CqEngine::apply_atom(const AtomPlan &plan, UpdateKind kind, const Tuple &t)
{
    ++steps_;
    if (plan.chain.empty()) {
        const auto idx = static_cast<std::size_t>(&plan - plans_.data());
        const bool want = kind == UpdateKind::insert;
        if (nullary_present_[idx] == want)
            return;
        nullary_present_[idx] = want;
        if (want)
            --nullary_missing_;
        else
            ++nullary_missing_;
        ++version_;
        recompute_total();
        return;
    }
    for (auto [a, b] : plan.equal_args)
        if (t[a] != t[b])
            return;

    Slot *path[64];
    const std::size_t depth = plan.chain.size();
    if (depth > 64)
        throw precondition_error("variable forest deeper than 64");
    Slot *p = nullptr;
    for (std::size_t d = 0; d < depth; ++d) {
        ++steps_;
        const std::size_t node = plan.chain[d];
        ChildSet &cs = set_for(node, p);
        const Value v = t[plan.arg_of_depth[d]];
        auto it = cs.slots.find(v);
        if (it == cs.slots.end()) {
            if (kind == UpdateKind::remove)
                return;
            auto s = std::make_unique<Slot>();
            s->value = v;
            s->node = node;
            s->parent = p;
            s->owner = &cs;
            s->children.resize(nodes_[node].children.size());
            it = cs.slots.emplace(v, std::move(s)).first;
        }
        p = it->second.get();
        path[d] = p;
    }
    Slot *end = path[depth - 1];
    if (kind == UpdateKind::insert) {
        if (end->mask & plan.bit)
            return;
        end->mask |= plan.bit;
        for (std::size_t d = 0; d < depth; ++d)
            ++path[d]->refs;
    } else {
        if (not(end->mask & plan.bit))
            return;
        end->mask &= ~plan.bit;
        for (std::size_t d = 0; d < depth; ++d)
            --path[d]->refs;
    }
    ++version_;
    for (std::size_t d = depth; d-- > 0;)
        recompute(path[d]);
    recompute_total();
    for (std::size_t d = depth; d-- > 0;) {
        Slot *s = path[d];
        if (s->refs != 0)
            break;
        ++steps_;
        s->owner->slots.erase(s->value);
    }
}

void CqEngine::recompute(Slot *s)
{
    const Node &n = nodes_[s->node];
    std::uint64_t w = s->mask == n.full_mask ? 1 : 0;
    for (std::size_t k = 0; k < n.children.size(); ++k) {
        ++steps_;
        const ChildSet &cs = s->children[k];
        w *= nodes_[n.children[k]].free ? cs.sum : static_cast<std::uint64_t>(cs.live_count > 0);
    }
    set_weight(s, w);
}

void CqEngine::set_weight(Slot *s, std::uint64_t w)
{
    ++steps_;
    ChildSet &o = *s->owner;
    o.sum = o.sum - s->weight + w;
    s->weight = w;
    const bool live = w > 0;
    if (live == s->live)
        return;
    s->live = live;
    if (live) {
        s->prev = o.tail;
        s->next = nullptr;
        (o.tail ? o.tail->next : o.head) = s;
        o.tail = s;
        ++o.live_count;
    } else {
        (s->prev ? s->prev->next : o.head) = s->next;
        (s->next ? s->next->prev : o.tail) = s->prev;
        s->prev = s->next = nullptr;
        --o.live_count;
    }
}

void CqEngine::recompute_total()
{
    std::uint64_t t = nullary_missing_ == 0 ? 1 : 0;
    for (std::size_t r = 0; r < roots_.size(); ++r) {
        ++steps_;
        const ChildSet &cs = *root_sets_[r];
        t *= nodes_[roots_[r]].free ? cs.sum : static_cast<std::uint64_t>(cs.live_count > 0);
    }
    total_ = t;
}

std::uint64_t CqEngine::count() const
{
    ++steps_;
    count_stats_.record(1);
    return total_;
}

bool CqEngine::locate(const Tuple &t, std::vector<Slot *> &chosen) const
{
    chosen.assign(free_order_.size(), nullptr);
    if (total_ == 0)
        return false;
    for (std::size_t i = 0; i < free_order_.size(); ++i) {
        ++steps_;
        const Node &n = nodes_[free_order_[i]];
        Slot *parent = n.parent < 0 ? nullptr : chosen[static_cast<std::size_t>(free_pos_[static_cast<std::size_t>(n.parent)])];
        const ChildSet &cs = set_for(free_order_[i], parent);
        auto it = cs.slots.find(t[static_cast<std::size_t>(n.head_position)]);
        if (it == cs.slots.end() or not it->second->live)
            return false;
        chosen[i] = it->second.get();
    }
    return true;
}

bool CqEngine::test(const Tuple &t) const
{
    if (t.size() != arity_)
        throw precondition_error("test tuple has arity " + std::to_string(t.size()) + ", expected " +
                                 std::to_string(arity_));
    const std::uint64_t before = steps_;
    ++steps_;
    std::vector<Slot *> chosen;
    const bool ok = locate(t, chosen);
    test_stats_.record(steps_ - before);
    return ok;
}

Tuple CqEngine::emit(const std::vector<Slot *> &chosen) const
{
    Tuple out(arity_);
    for (std::size_t i = 0; i < free_order_.size(); ++i)
        out[static_cast<std::size_t>(nodes_[free_order_[i]].head_position)] = chosen[i]->value;
    return out;
}

std::optional<Tuple> CqEngine::start() const
{
    const std::uint64_t before = steps_;
    ++steps_;
    std::optional<Tuple> out;
    if (total_ > 0) {
        std::vector<Slot *> chosen(free_order_.size(), nullptr);
        for (std::size_t i = 0; i < free_order_.size(); ++i) {
            ++steps_;
            const Node &n = nodes_[free_order_[i]];
            Slot *parent =
                n.parent < 0 ? nullptr : chosen[static_cast<std::size_t>(free_pos_[static_cast<std::size_t>(n.parent)])];
            chosen[i] = set_for(free_order_[i], parent).head;
        }
        out = emit(chosen);
    }
    start_stats_.record(steps_ - before);
    return out;
}

std::optional<Tuple> CqEngine::next(const Tuple &t) const
{
    if (t.size() != arity_)
        throw precondition_error("successor requested for a tuple of the wrong arity");
    const std::uint64_t before = steps_;
    ++steps_;
    std::vector<Slot *> chosen;
    if (not locate(t, chosen))
        throw precondition_error("successor requested for a tuple that is not a current answer");
    std::optional<Tuple> out;
    for (std::size_t i = free_order_.size(); i-- > 0;) {
        ++steps_;
        if (not chosen[i]->next)
            continue;
        chosen[i] = chosen[i]->next;
        for (std::size_t j = i + 1; j < free_order_.size(); ++j) {
            ++steps_;
            const Node &n = nodes_[free_order_[j]];
            Slot *parent =
                n.parent < 0 ? nullptr : chosen[static_cast<std::size_t>(free_pos_[static_cast<std::size_t>(n.parent)])];
            chosen[j] = set_for(free_order_[j], parent).head;
        }
        out = emit(chosen);
        break;
    }
    next_stats_.record(steps_ - before);
    return out;
}

EngineReport CqEngine::report() const
{
    EngineReport r;
    r["update"] = update_stats_;
    r["count"] = count_stats_;
    r["test"] = test_stats_;
    r["start"] = start_stats_;
    r["next"] = next_stats_;
    return r;
}

CqEvaluator::CqEvaluator(const CQ &q, const Schema &schema)
    : stripped_(strip_constants(q, schema)), engine_(std::make_unique<CqEngine>(stripped_.hat, stripped_.hat_schema))
{ }

void CqEvaluator::load(const Database &db)
{
    for (const UpdateCommand &cmd : db.as_insertions())
        update(cmd);
}

void CqEvaluator::update(const UpdateCommand &cmd)
{
    ++steps_;
    translate_update(cmd, stripped_, scratch_);
    for (const UpdateCommand &hat : scratch_) {
        ++steps_;
        engine_->update(hat);
    }
}

bool CqEvaluator::test(const Tuple &t) const
{
    if (t.size() != stripped_.head_layout.size())
        throw precondition_error("test tuple has arity " + std::to_string(t.size()) + ", expected " +
                                 std::to_string(stripped_.head_layout.size()));
    ++steps_;
    auto lowered = stripped_.lower(t);
    return lowered and engine_->test(*lowered);
}

std::optional<Tuple> CqEvaluator::start() const
{
    ++steps_;
    auto t = engine_->start();
    if (not t)
        return std::nullopt;
    return stripped_.lift(*t);
}

std::optional<Tuple> CqEvaluator::next(const Tuple &t) const
{
    ++steps_;
    auto lowered = stripped_.lower(t);
    if (not lowered)
        throw precondition_error("successor requested for a tuple that is not a current answer");
    auto n = engine_->next(*lowered);
    if (not n)
        return std::nullopt;
    return stripped_.lift(*n);
}

}
