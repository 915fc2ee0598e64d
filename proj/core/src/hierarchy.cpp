#include "dynq/hierarchy.hpp"

#include "dynq/atom_set.hpp"
#include "dynq/errors.hpp"
#include "dynq/parser.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

namespace dynq {

namespace {

struct VarAtoms
{
    std::vector<VarId> vars;  ///< variables occurring in the body, ascending
    std::vector<AtomSet> sets;  ///< indexed by variable id
};

VarAtoms atom_sets(const CQ &q)
{
    VarAtoms va;
    va.sets.assign(q.num_vars(), AtomSet(q.body.size()));
    std::vector<bool> seen(q.num_vars(), false);
    for (std::size_t i = 0; i < q.body.size(); ++i)
        for (const Term &t : q.body[i].args)
            if (t.is_var()) {
                va.sets[t.id].set(i);
                seen[t.id] = true;
            }
    for (VarId v = 0; v < q.num_vars(); ++v)
        if (seen[v])
            va.vars.push_back(v);
    return va;
}

std::optional<HierarchyWitness> nesting_violation(const VarAtoms &va, VarId x, VarId y)
{
    const AtomSet &ax = va.sets[x];
    const AtomSet &ay = va.sets[y];
    if (ax.disjoint(ay) or ax.subset_of(ay) or ay.subset_of(ax))
        return std::nullopt;
    return HierarchyWitness{1, x, y, {ax.first_not_in(ay), ax.first_common(ay), ay.first_not_in(ax)}};
}

HierarchyWitness free_quantified_witness(const VarAtoms &va, VarId x, VarId y)
{
    return HierarchyWitness{2, x, y, {va.sets[x].first_common(va.sets[y]), va.sets[y].first_not_in(va.sets[x])}};
}

/// Structural key of a CQ up to variable renaming in first-occurrence order.
std::string structure_key(const CQ &q)
{
    const CQ c = q.canonical();
    std::string key;
    auto put = [&](const Term &t) {
        key += t.is_var() ? 'v' : 'c';
        key += std::to_string(t.id);
        key += ',';
    };
    for (const Term &t : c.head)
        put(t);
    for (const Atom &a : c.body) {
        key += '|';
        key += std::to_string(a.relation);
        key += ':';
        for (const Term &t : a.args)
            put(t);
    }
    return key;
}

}

HierarchyCheck check_q_hierarchical(const CQ &q)
{
    const VarAtoms va = atom_sets(q);
    for (std::size_t i = 0; i < va.vars.size(); ++i)
        for (std::size_t j = i + 1; j < va.vars.size(); ++j) {
            const VarId x = va.vars[i], y = va.vars[j];
            if (auto w = nesting_violation(va, x, y))
                return {false, w};
            // Clause 2 in both orientations: a strictly smaller free set below a quantified one.
            for (auto [a, b] : {std::pair{x, y}, std::pair{y, x}}) {
                const AtomSet &sa = va.sets[a];
                const AtomSet &sb = va.sets[b];
                if (q.is_free(a) and not q.is_free(b) and sa.subset_of(sb) and not(sa == sb))
                    return {false, free_quantified_witness(va, a, b)};
            }
        }
    return {};
}

HierarchyCheck check_t_hierarchical(const CQ &q)
{
    const VarAtoms va = atom_sets(q);
    for (std::size_t i = 0; i < va.vars.size(); ++i)
        for (std::size_t j = i + 1; j < va.vars.size(); ++j) {
            const VarId x = va.vars[i], y = va.vars[j];
            const bool fx = q.is_free(x), fy = q.is_free(y);
            if (not fx and not fy) {
                if (auto w = nesting_violation(va, x, y))
                    return {false, w};
            } else if (fx != fy) {
                const VarId f = fx ? x : y, b = fx ? y : x;
                const AtomSet &sf = va.sets[f];
                const AtomSet &sb = va.sets[b];
                if (not sf.disjoint(sb) and not sb.subset_of(sf))
                    return {false, free_quantified_witness(va, f, b)};
            }
        }
    return {};
}

bool is_q_hierarchical(const UCQ &q)
{
    return std::all_of(q.disjuncts.begin(), q.disjuncts.end(), [](const CQ &d) { return is_q_hierarchical(d); });
}

bool is_t_hierarchical(const UCQ &q)
{
    return std::all_of(q.disjuncts.begin(), q.disjuncts.end(), [](const CQ &d) { return is_t_hierarchical(d); });
}

GeneralizedCQ t_decompose(const CQ &q)
{
    if (auto c = check_t_hierarchical(q); not c)
        throw precondition_error("t_decompose requires a t-hierarchical query");
    GeneralizedCQ g;
    g.source = q;
    const std::vector<VarId> head_order = [&] {
        std::vector<VarId> out;
        for (const Term &t : q.head)
            if (t.is_var() and std::find(out.begin(), out.end(), t.id) == out.end())
                out.push_back(t.id);
        return out;
    }();
    // Atoms grouped by the set of free variables they mention, in order of first appearance.
    std::map<std::vector<VarId>, std::size_t> group_of;
    std::vector<std::pair<std::vector<VarId>, std::vector<Atom>>> groups;
    for (const Atom &a : q.body) {
        std::vector<VarId> z;
        bool has_quantified = false;
        for (VarId v : head_order)
            if (std::any_of(a.args.begin(), a.args.end(), [v](const Term &t) { return t.is_var() and t.id == v; }))
                z.push_back(v);
        for (const Term &t : a.args)
            if (t.is_var() and not q.is_free(t.id))
                has_quantified = true;
        if (not has_quantified) {
            g.phi0.push_back(a);
            continue;
        }
        auto [it, added] = group_of.emplace(z, groups.size());
        if (added)
            groups.push_back({z, {}});
        groups[it->second].second.push_back(a);
    }
    for (auto &[z, atoms] : groups) {
        CQ c;
        c.var_names = q.var_names;
        for (VarId v : z)
            c.head.push_back(Term::var(v));
        c.body = std::move(atoms);
        g.components.push_back({z, c.compact()});
    }
    return g;
}

std::optional<CQ> intersect(const CQ &q1, const CQ &q2)
{
    if (q1.arity() != q2.arity())
        throw precondition_error("intersection of queries with different arity");
    const auto n1 = static_cast<VarId>(q1.num_vars());
    const std::size_t n = n1 + q2.num_vars();
    std::vector<VarId> parent(n);
    std::iota(parent.begin(), parent.end(), VarId{0});
    std::vector<std::optional<Value>> fixed(n);
    auto find = [&](VarId v) {
        while (parent[v] != v)
            v = parent[v] = parent[parent[v]];
        return v;
    };
    auto node = [&](const Term &t, VarId offset) { return t.id + offset; };

    for (std::size_t i = 0; i < q1.arity(); ++i) {
        const Term &u = q1.head[i];
        const Term &v = q2.head[i];
        if (u.is_const() and v.is_const()) {
            if (u.id != v.id)
                return std::nullopt;
            continue;
        }
        if (u.is_const() or v.is_const()) {
            const VarId r = u.is_var() ? find(node(u, 0)) : find(node(v, n1));
            const Value c = u.is_const() ? u.id : v.id;
            if (fixed[r] and *fixed[r] != c)
                return std::nullopt;
            fixed[r] = c;
            continue;
        }
        VarId a = find(node(u, 0)), b = find(node(v, n1));
        if (a == b)
            continue;
        if (fixed[a] and fixed[b] and *fixed[a] != *fixed[b])
            return std::nullopt;
        if (b < a)
            std::swap(a, b);
        parent[b] = a;
        if (not fixed[a])
            fixed[a] = fixed[b];
    }

    CQ out;
    out.var_names = q1.var_names;
    out.var_names.insert(out.var_names.end(), q2.var_names.begin(), q2.var_names.end());
    auto map = [&](const Term &t, VarId offset) {
        if (t.is_const())
            return t;
        const VarId r = find(node(t, offset));
        return fixed[r] ? Term::constant(*fixed[r]) : Term::var(r);
    };
    for (const Term &t : q1.head)
        out.head.push_back(map(t, 0));
    for (const Atom &a : q1.body) {
        Atom b{a.relation, {}};
        for (const Term &t : a.args)
            b.args.push_back(map(t, 0));
        out.body.push_back(std::move(b));
    }
    for (const Atom &a : q2.body) {
        Atom b{a.relation, {}};
        for (const Term &t : a.args)
            b.args.push_back(map(t, n1));
        out.body.push_back(std::move(b));
    }
    return out.compact();
}

ExhaustiveCheck check_exhaustively_q_hierarchical(const UCQ &q, std::size_t budget)
{
    const std::size_t d = q.disjuncts.size();
    if (d > 20)
        throw budget_exceeded("exhaustive check over " + std::to_string(d) + " disjuncts exceeds the subset limit");
    std::vector<std::optional<CQ>> inter(std::size_t{1} << d);
    std::unordered_map<std::string, bool> memo;
    for (std::size_t mask = 1; mask < inter.size(); ++mask) {
        const auto top = static_cast<std::size_t>(std::bit_width(mask) - 1);
        const std::size_t rest = mask & ~(std::size_t{1} << top);
        if (rest == 0)
            inter[mask] = q.disjuncts[top];
        else if (inter[rest])
            inter[mask] = intersect(*inter[rest], q.disjuncts[top]);
        if (not inter[mask])
            continue;
        const std::string key = structure_key(*inter[mask]);
        auto it = memo.find(key);
        if (it != memo.end() and it->second)
            continue;
        const CQ core = core_of_cq(*inter[mask], budget);
        HierarchyCheck c = check_q_hierarchical(core);
        memo[key] = c.holds;
        if (not c.holds) {
            ExhaustiveCheck out;
            out.holds = false;
            for (std::size_t i = 0; i < d; ++i)
                if (mask >> i & 1U)
                    out.witness.push_back(i);
            out.core_witness = c.witness;
            out.witness_core = core;
            return out;
        }
    }
    return {};
}

ClassReport classify(const UCQ &q, std::size_t budget)
{
    ClassReport r;
    r.disjuncts = q.disjuncts.size();
    r.core = core_of_ucq(q, budget);
    for (std::size_t i = 0; i < r.core.disjuncts.size(); ++i) {
        if (HierarchyCheck c = check_q_hierarchical(r.core.disjuncts[i]); not c and r.q_hierarchical) {
            r.q_hierarchical = false;
            r.q_witness = {i, *c.witness};
        }
        if (HierarchyCheck c = check_t_hierarchical(r.core.disjuncts[i]); not c and r.t_hierarchical) {
            r.t_hierarchical = false;
            r.t_witness = {i, *c.witness};
        }
    }
    r.exhaustive = check_exhaustively_q_hierarchical(r.core, budget);
    r.exhaustively_q_hierarchical = r.exhaustive.holds;
    return r;
}

std::string describe_witness(const CQ &q, const HierarchyWitness &w, const Schema &schema, const ConstantPool &pool)
{
    std::string out = "clause " + std::string(w.clause == 1 ? "(i)" : "(ii)") + " x=" +
                      print_term(q, Term::var(w.x), pool) + " y=" + print_term(q, Term::var(w.y), pool) + " atoms ";
    for (std::size_t i = 0; i < w.atoms.size(); ++i) {
        if (i)
            out += " | ";
        out += print_atom(q, q.body[w.atoms[i]], schema, pool);
    }
    return out;
}

std::string format_report(const ClassReport &r, const Schema &schema, const ConstantPool &pool)
{
    auto yn = [](bool b) { return b ? "yes" : "no"; };
    std::string out;
    out += "disjuncts: " + std::to_string(r.disjuncts) + "\n";
    out += "core_disjuncts: " + std::to_string(r.core.disjuncts.size()) + "\n";
    out += "core_atoms:";
    for (const CQ &d : r.core.disjuncts)
        out += " " + std::to_string(d.body.size());
    out += "\n";
    out += std::string("q_hierarchical: ") + yn(r.q_hierarchical) + "\n";
    if (r.q_witness)
        out += "q_witness: disjunct " + std::to_string(r.q_witness->first + 1) + " " +
               describe_witness(r.core.disjuncts[r.q_witness->first], r.q_witness->second, schema, pool) + "\n";
    out += std::string("t_hierarchical: ") + yn(r.t_hierarchical) + "\n";
    if (r.t_witness)
        out += "t_witness: disjunct " + std::to_string(r.t_witness->first + 1) + " " +
               describe_witness(r.core.disjuncts[r.t_witness->first], r.t_witness->second, schema, pool) + "\n";
    out += std::string("exhaustively_q_hierarchical: ") + yn(r.exhaustively_q_hierarchical) + "\n";
    if (not r.exhaustive.holds) {
        out += "exhaustive_witness: I={";
        for (std::size_t i = 0; i < r.exhaustive.witness.size(); ++i)
            out += (i ? "," : "") + std::to_string(r.exhaustive.witness[i] + 1);
        out += "}\n";
        if (r.exhaustive.witness_core and r.exhaustive.core_witness)
            out += "exhaustive_core: " + print_cq(*r.exhaustive.witness_core, schema, pool) + "\n" +
                   "exhaustive_core_witness: " +
                   describe_witness(*r.exhaustive.witness_core, *r.exhaustive.core_witness, schema, pool) + "\n";
    }
    return out;
}

}
