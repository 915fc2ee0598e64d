#include "dynq/constant_rewrite.hpp"

#include <algorithm>

namespace dynq {

bool AtomSpec::project(std::span<const Value> t, Tuple &out) const
{
    out.assign(vbar.size(), 0);
    std::vector<bool> set(vbar.size(), false);
    for (std::size_t p = 0; p < t.size(); ++p) {
        if (constant_at[p]) {
            if (*constant_at[p] != t[p])
                return false;
            continue;
        }
        const std::size_t s = slot[p];
        if (set[s]) {
            if (out[s] != t[p])
                return false;
        } else {
            out[s] = t[p];
            set[s] = true;
        }
    }
    return true;
}

Tuple StrippedQuery::lift(std::span<const Value> hat_tuple) const
{
    Tuple out;
    lift(hat_tuple, out);
    return out;
}

void StrippedQuery::lift(std::span<const Value> hat_tuple, Tuple &out) const
{
    out.resize(head_layout.size());
    for (std::size_t i = 0; i < head_layout.size(); ++i)
        out[i] = head_layout[i].is_constant ? head_layout[i].constant : hat_tuple[head_layout[i].index];
}

std::optional<Tuple> StrippedQuery::lower(std::span<const Value> t) const
{
    if (t.size() != head_layout.size())
        return std::nullopt;
    Tuple out(hat.head.size());
    std::vector<bool> set(out.size(), false);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const HeadSlot &h = head_layout[i];
        if (h.is_constant) {
            if (h.constant != t[i])
                return std::nullopt;
        } else if (set[h.index]) {
            if (out[h.index] != t[i])
                return std::nullopt;
        } else {
            out[h.index] = t[i];
            set[h.index] = true;
        }
    }
    return out;
}

StrippedQuery strip_constants(const CQ &q, const Schema &source)
{
    StrippedQuery s;
    s.atoms_by_relation.resize(source.size());
    s.hat.var_names = q.var_names;
    for (std::size_t i = 0; i < q.body.size(); ++i) {
        const Atom &a = q.body[i];
        AtomSpec spec;
        spec.source_relation = a.relation;
        spec.constant_at.resize(a.args.size());
        spec.slot.assign(a.args.size(), AtomSpec::none);
        for (std::size_t p = 0; p < a.args.size(); ++p) {
            const Term &t = a.args[p];
            if (t.is_const()) {
                spec.constant_at[p] = t.id;
                continue;
            }
            auto it = std::find(spec.vbar.begin(), spec.vbar.end(), t.id);
            spec.slot[p] = static_cast<std::size_t>(it - spec.vbar.begin());
            if (it == spec.vbar.end())
                spec.vbar.push_back(t.id);
        }
        spec.hat_relation =
            s.hat_schema.add("R" + std::to_string(i + 1) + "_" + source[a.relation].name, spec.vbar.size());
        Atom hat_atom{spec.hat_relation, {}};
        for (VarId v : spec.vbar)
            hat_atom.args.push_back(Term::var(v));
        s.hat.body.push_back(std::move(hat_atom));
        s.atoms_by_relation[a.relation].push_back(i);
        s.atoms.push_back(std::move(spec));
    }
    for (const Term &t : q.head) {
        HeadSlot h;
        if (t.is_const()) {
            h.is_constant = true;
            h.constant = t.id;
        } else {
            auto it = std::find(s.hat.head.begin(), s.hat.head.end(), t);
            h.index = static_cast<std::size_t>(it - s.hat.head.begin());
            if (it == s.hat.head.end())
                s.hat.head.push_back(t);
        }
        s.head_layout.push_back(h);
    }
    return s;
}

std::vector<UpdateCommand> translate_update(const UpdateCommand &cmd, const StrippedQuery &spec)
{
    std::vector<UpdateCommand> out;
    translate_update(cmd, spec, out);
    return out;
}

void translate_update(const UpdateCommand &cmd, const StrippedQuery &spec, std::vector<UpdateCommand> &out)
{
    out.clear();
    if (cmd.relation >= spec.atoms_by_relation.size())
        return;
    for (std::size_t i : spec.atoms_by_relation[cmd.relation]) {
        const AtomSpec &a = spec.atoms[i];
        if (cmd.tuple.size() != a.constant_at.size())
            continue;
        UpdateCommand hat{cmd.kind, a.hat_relation, {}};
        if (a.project(cmd.tuple, hat.tuple))
            out.push_back(std::move(hat));
    }
}

}
