#include "dynq/query.hpp"

#include "dynq/errors.hpp"

#include <algorithm>
#include <stdexcept>

namespace dynq {

RelId Schema::add(std::string name, std::size_t arity)
{
    if (by_name_.contains(name))
        throw schema_error("duplicate relation '" + name + "'");
    const auto id = static_cast<RelId>(relations_.size());
    by_name_.emplace(name, id);
    relations_.push_back(Relation{std::move(name), arity});
    return id;
}

std::optional<RelId> Schema::find(std::string_view name) const
{
    if (auto it = by_name_.find(std::string(name)); it != by_name_.end())
        return it->second;
    return std::nullopt;
}

RelId Schema::id_of(std::string_view name) const
{
    if (auto id = find(name))
        return *id;
    throw schema_error("unknown relation '" + std::string(name) + "'");
}

Value ConstantPool::intern_int(std::int64_t literal)
{
    if (auto it = ints_.find(literal); it != ints_.end())
        return it->second;
    const auto v = static_cast<Value>(entries_.size());
    entries_.push_back(Entry{Kind::integer, std::to_string(literal)});
    ints_.emplace(literal, v);
    return v;
}

Value ConstantPool::intern_string(std::string_view literal)
{
    std::string key(literal);
    if (auto it = strings_.find(key); it != strings_.end())
        return it->second;
    const auto v = static_cast<Value>(entries_.size());
    entries_.push_back(Entry{Kind::string, key});
    strings_.emplace(std::move(key), v);
    return v;
}

Value ConstantPool::fresh(std::string label)
{
    const auto v = static_cast<Value>(entries_.size());
    entries_.push_back(Entry{Kind::fresh, std::move(label)});
    return v;
}

std::optional<Value> ConstantPool::lookup_int(std::int64_t literal) const
{
    if (auto it = ints_.find(literal); it != ints_.end())
        return it->second;
    return std::nullopt;
}

std::optional<Value> ConstantPool::lookup_string(std::string_view literal) const
{
    if (auto it = strings_.find(std::string(literal)); it != strings_.end())
        return it->second;
    return std::nullopt;
}

std::string ConstantPool::render(Value v) const
{
    if (v >= entries_.size())
        return "#" + std::to_string(v);
    const Entry &e = entries_[v];
    if (e.kind == Kind::integer)
        return e.text;
    std::string out = "\"";
    if (e.kind == Kind::fresh)
        out += '~';
    for (char c : e.text) {
        if (c == '"' or c == '\\')
            out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

bool CQ::is_free(VarId v) const
{
    return std::any_of(head.begin(), head.end(), [v](const Term &t) { return t.is_var() and t.id == v; });
}

std::vector<VarId> CQ::free_vars() const
{
    std::vector<VarId> out;
    for (const Term &t : head)
        if (t.is_var())
            out.push_back(t.id);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<VarId> CQ::quantified() const
{
    std::vector<bool> seen(num_vars(), false), free(num_vars(), false);
    for (const Term &t : head)
        if (t.is_var())
            free[t.id] = true;
    for (const Atom &a : body)
        for (const Term &t : a.args)
            if (t.is_var())
                seen[t.id] = true;
    std::vector<VarId> out;
    for (VarId v = 0; v < num_vars(); ++v)
        if (seen[v] and not free[v])
            out.push_back(v);
    return out;
}

std::vector<VarId> CQ::vars_of(std::size_t atom) const
{
    std::vector<VarId> out;
    for (const Term &t : body.at(atom).args)
        if (t.is_var())
            out.push_back(t.id);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<std::size_t> CQ::atoms_of(VarId v) const
{
    if (v >= num_vars())
        throw std::out_of_range("unknown variable id " + std::to_string(v));
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < body.size(); ++i)
        if (std::any_of(body[i].args.begin(), body[i].args.end(),
                        [v](const Term &t) { return t.is_var() and t.id == v; }))
            out.push_back(i);
    return out;
}

std::vector<Value> CQ::constants() const
{
    std::vector<Value> out;
    for (const Term &t : head)
        if (t.is_const())
            out.push_back(t.id);
    for (const Atom &a : body)
        for (const Term &t : a.args)
            if (t.is_const())
                out.push_back(t.id);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool CQ::has_constants() const
{
    auto is_c = [](const Term &t) { return t.is_const(); };
    if (std::any_of(head.begin(), head.end(), is_c))
        return true;
    return std::any_of(body.begin(), body.end(),
                       [&](const Atom &a) { return std::any_of(a.args.begin(), a.args.end(), is_c); });
}

namespace {

CQ renumber(const CQ &q, const std::vector<VarId> &order)
{
    constexpr VarId none = ~VarId{0};
    std::vector<VarId> remap(q.num_vars(), none);
    CQ out;
    for (VarId old : order) {
        remap[old] = static_cast<VarId>(out.var_names.size());
        out.var_names.push_back(q.var_names[old]);
    }
    auto map_term = [&](Term t) {
        if (t.is_var())
            t.id = remap[t.id];
        return t;
    };
    for (const Term &t : q.head)
        out.head.push_back(map_term(t));
    for (const Atom &a : q.body) {
        Atom b{a.relation, {}};
        for (const Term &t : a.args)
            b.args.push_back(map_term(t));
        out.body.push_back(std::move(b));
    }
    return out;
}

}

CQ CQ::compact() const
{
    std::vector<bool> used(num_vars(), false);
    for (const Term &t : head)
        if (t.is_var())
            used[t.id] = true;
    for (const Atom &a : body)
        for (const Term &t : a.args)
            if (t.is_var())
                used[t.id] = true;
    std::vector<VarId> order;
    for (VarId v = 0; v < num_vars(); ++v)
        if (used[v])
            order.push_back(v);
    return renumber(*this, order);
}

CQ CQ::canonical() const
{
    std::vector<bool> seen(num_vars(), false);
    std::vector<VarId> order;
    auto visit = [&](const Term &t) {
        if (t.is_var() and not seen[t.id]) {
            seen[t.id] = true;
            order.push_back(t.id);
        }
    };
    for (const Term &t : head)
        visit(t);
    for (const Atom &a : body)
        for (const Term &t : a.args)
            visit(t);
    return renumber(*this, order);
}

void CQ::validate(const Schema &schema) const
{
    if (body.empty())
        throw schema_error("conjunctive query has an empty body");
    std::vector<bool> in_body(num_vars(), false);
    for (const Atom &a : body) {
        if (a.relation >= schema.size())
            throw schema_error("atom refers to unknown relation id " + std::to_string(a.relation));
        const Relation &r = schema[a.relation];
        if (a.args.size() != r.arity)
            throw schema_error("relation '" + r.name + "' has arity " + std::to_string(r.arity) + ", atom has " +
                               std::to_string(a.args.size()) + " arguments");
        for (const Term &t : a.args) {
            if (t.is_var()) {
                if (t.id >= num_vars())
                    throw schema_error("atom refers to undeclared variable id " + std::to_string(t.id));
                in_body[t.id] = true;
            }
        }
    }
    for (const Term &t : head)
        if (t.is_var() and (t.id >= num_vars() or not in_body[t.id]))
            throw schema_error("head variable '" + (t.id < num_vars() ? var_names[t.id] : std::string("?")) +
                               "' does not occur in the body");
}

}
