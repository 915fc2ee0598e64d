#include "dynq/homomorphism.hpp"

#include "dynq/errors.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

namespace dynq {

namespace {

class HomSearch
{
  public:
    HomSearch(const CQ &from, const CQ &to, std::size_t budget)
        : from_(from), to_(to), budget_(budget), image_(from.num_vars()), bound_(from.num_vars(), false)
    {
        for (std::size_t i = 0; i < to.body.size(); ++i)
            by_relation_[to.body[i].relation].push_back(i);
    }

    std::optional<VarMapping> run()
    {
        if (from_.arity() != to_.arity())
            return std::nullopt;
        for (std::size_t i = 0; i < from_.head.size(); ++i)
            if (not unify(from_.head[i], to_.head[i], trail_))
                return std::nullopt;
        std::vector<bool> done(from_.body.size(), false);
        if (not search(done, from_.body.size()))
            return std::nullopt;
        VarMapping m;
        m.image.resize(from_.num_vars());
        for (VarId v = 0; v < from_.num_vars(); ++v)
            m.image[v] = bound_[v] ? image_[v] : Term::var(0);
        return m;
    }

  private:
    const CQ &from_;
    const CQ &to_;
    std::size_t budget_;
    std::size_t nodes_ = 0;
    std::vector<Term> image_;
    std::vector<bool> bound_;
    std::vector<VarId> trail_;
    std::unordered_map<RelId, std::vector<std::size_t>> by_relation_;

    bool unify(const Term &s, const Term &t, std::vector<VarId> &trail)
    {
        if (s.is_const())
            return t.is_const() and t.id == s.id;
        if (bound_[s.id])
            return image_[s.id] == t;
        bound_[s.id] = true;
        image_[s.id] = t;
        trail.push_back(s.id);
        return true;
    }

    void undo(std::size_t mark)
    {
        while (trail_.size() > mark) {
            bound_[trail_.back()] = false;
            trail_.pop_back();
        }
    }

    bool consistent(const Atom &a, const Atom &b) const
    {
        for (std::size_t p = 0; p < a.args.size(); ++p) {
            const Term &s = a.args[p];
            if (s.is_const()) {
                if (b.args[p] != s)
                    return false;
            } else if (bound_[s.id] and image_[s.id] != b.args[p]) {
                return false;
            }
        }
        // Repeated unbound variables within `a` must meet equal target terms.
        for (std::size_t p = 0; p < a.args.size(); ++p)
            for (std::size_t r = p + 1; r < a.args.size(); ++r)
                if (a.args[p].is_var() and a.args[p] == a.args[r] and b.args[p] != b.args[r])
                    return false;
        return true;
    }

    bool search(std::vector<bool> &done, std::size_t remaining)
    {
        if (remaining == 0)
            return true;
        if (++nodes_ > budget_)
            throw budget_exceeded("homomorphism search exceeded its budget of " + std::to_string(budget_) + " nodes");

        std::size_t best = 0;
        std::vector<std::size_t> best_cands;
        std::size_t best_size = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = 0; i < from_.body.size(); ++i) {
            if (done[i])
                continue;
            const Atom &a = from_.body[i];
            std::vector<std::size_t> cands;
            if (auto it = by_relation_.find(a.relation); it != by_relation_.end())
                for (std::size_t j : it->second)
                    if (consistent(a, to_.body[j]))
                        cands.push_back(j);
            if (cands.size() < best_size) {
                best = i;
                best_size = cands.size();
                best_cands = std::move(cands);
                if (best_size <= 1)
                    break;
            }
        }
        if (best_size == 0)
            return false;

        done[best] = true;
        const Atom &a = from_.body[best];
        for (std::size_t j : best_cands) {
            const std::size_t mark = trail_.size();
            bool ok = true;
            for (std::size_t p = 0; ok and p < a.args.size(); ++p)
                ok = unify(a.args[p], to_.body[j].args[p], trail_);
            if (ok and search(done, remaining - 1))
                return true;
            undo(mark);
        }
        done[best] = false;
        return false;
    }
};

bool orphans_head_variable(const CQ &q, std::size_t drop)
{
    for (const Term &h : q.head) {
        if (not h.is_var())
            continue;
        bool elsewhere = false;
        for (std::size_t i = 0; i < q.body.size() and not elsewhere; ++i)
            if (i != drop)
                for (const Term &t : q.body[i].args)
                    if (t == h) {
                        elsewhere = true;
                        break;
                    }
        if (not elsewhere)
            return true;
    }
    return false;
}

}

std::optional<VarMapping> find_homomorphism(const CQ &from, const CQ &to, std::size_t budget)
{
    return HomSearch(from, to, budget).run();
}

bool contains(const CQ &q1, const CQ &q2, std::size_t budget)
{
    return find_homomorphism(q1, q2, budget).has_value();
}

CQ remove_duplicate_atoms(const CQ &q)
{
    CQ out = q;
    out.body.clear();
    for (const Atom &a : q.body)
        if (std::find(out.body.begin(), out.body.end(), a) == out.body.end())
            out.body.push_back(a);
    return out;
}

CQ core_of_cq(const CQ &q, std::size_t budget)
{
    CQ cur = remove_duplicate_atoms(q);
    bool shrunk = true;
    while (shrunk and cur.body.size() > 1) {
        shrunk = false;
        for (std::size_t i = 0; i < cur.body.size(); ++i) {
            if (orphans_head_variable(cur, i))
                continue;
            CQ sub = cur;
            sub.body.erase(sub.body.begin() + static_cast<std::ptrdiff_t>(i));
            if (find_homomorphism(cur, sub, budget)) {
                cur = std::move(sub);
                shrunk = true;
                break;
            }
        }
    }
    return cur.compact();
}

UCQ core_of_ucq(const UCQ &q, std::size_t budget)
{
    UCQ out = UCQ::empty(q.arity);
    std::vector<CQ> cores;
    for (const CQ &d : q.disjuncts)
        cores.push_back(core_of_cq(d, budget));
    std::vector<bool> kept(cores.size(), true);
    for (std::size_t j = 0; j < cores.size(); ++j)
        for (std::size_t i = 0; i < cores.size(); ++i)
            if (i != j and kept[i] and contains(cores[i], cores[j], budget)) {
                kept[j] = false;
                break;
            }
    for (std::size_t j = 0; j < cores.size(); ++j)
        if (kept[j])
            out.disjuncts.push_back(std::move(cores[j]));
    return out;
}

bool equivalent(const UCQ &q1, const UCQ &q2, std::size_t budget)
{
    if (q1.arity != q2.arity)
        throw precondition_error("equivalence test on queries of different arity");
    // Union containment: each disjunct of one side is contained in some disjunct of the other.
    auto covered = [budget](const UCQ &small, const UCQ &big) {
        for (const CQ &p : small.disjuncts) {
            bool found = false;
            for (const CQ &r : big.disjuncts)
                if (contains(r, p, budget)) {
                    found = true;
                    break;
                }
            if (not found)
                return false;
        }
        return true;
    };
    return covered(q1, q2) and covered(q2, q1);
}

bool equivalent(const CQ &q1, const CQ &q2, std::size_t budget)
{
    return equivalent(UCQ::of(q1), UCQ::of(q2), budget);
}

}
