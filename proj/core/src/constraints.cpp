#include "dynq/constraints.hpp"
#include "dynq/homomorphism.hpp"

#include "dynq/errors.hpp"
#include "lexer.hpp"

#include <algorithm>
#include <chrono>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

namespace dynq {

using detail::Lexer;
using detail::Token;

std::vector<SmallDomain> ConstraintSet::small_domains() const
{
    std::vector<SmallDomain> out;
    for (const Constraint &c : items)
        if (auto *p = std::get_if<SmallDomain>(&c))
            out.push_back(*p);
    return out;
}

std::vector<InclusionDep> ConstraintSet::inclusion_deps() const
{
    std::vector<InclusionDep> out;
    for (const Constraint &c : items)
        if (auto *p = std::get_if<InclusionDep>(&c))
            out.push_back(*p);
    return out;
}

std::vector<FunctionalDep> ConstraintSet::functional_deps() const
{
    std::vector<FunctionalDep> out;
    for (const Constraint &c : items)
        if (auto *p = std::get_if<FunctionalDep>(&c))
            out.push_back(*p);
    return out;
}

namespace {

struct ConstraintReader
{
    Lexer lex;
    const Schema &schema;
    ConstantPool &pool;
    std::size_t line;

    [[noreturn]] void schema_fail(const std::string &msg) const
    {
        throw schema_error(msg + " (line " + std::to_string(line) + ")");
    }

    RelId relation(const Token &name) const
    {
        auto r = schema.find(name.text);
        if (not r)
            schema_fail("unknown relation '" + name.text + "'");
        return *r;
    }

    std::size_t position(RelId r)
    {
        const Token t = lex.peek();
        const std::int64_t p = lex.expect_integer();
        if (p < 1 or static_cast<std::size_t>(p) > schema[r].arity)
            schema_fail("position " + std::to_string(p) + " out of range for " + schema[r].name + "/" +
                        std::to_string(schema[r].arity));
        return static_cast<std::size_t>(p - 1);
    }

    std::pair<RelId, std::vector<std::size_t>> column_list()
    {
        const RelId r = relation(lex.expect_identifier());
        std::vector<std::size_t> pos;
        lex.expect("[");
        do
            pos.push_back(position(r));
        while (lex.accept(","));
        lex.expect("]");
        return {r, std::move(pos)};
    }

    Value constant()
    {
        const Token t = lex.next();
        switch (t.kind) {
            case Token::Kind::integer: return pool.intern_int(std::stoll(t.text));
            case Token::Kind::string:
            case Token::Kind::identifier: return pool.intern_string(t.text);
            default: Lexer::fail_at(t, "expected a constant but found '" + Lexer::describe(t) + "'");
        }
    }

    Constraint read()
    {
        const Token kind = lex.expect_identifier();
        if (kind.text == "sd") {
            SmallDomain sd;
            sd.relation = relation(lex.expect_identifier());
            lex.expect("[");
            sd.position = position(sd.relation);
            lex.expect("]");
            lex.expect("{");
            if (not lex.accept("}")) {
                do
                    sd.allowed.push_back(constant());
                while (lex.accept(","));
                lex.expect("}");
            }
            std::sort(sd.allowed.begin(), sd.allowed.end());
            sd.allowed.erase(std::unique(sd.allowed.begin(), sd.allowed.end()), sd.allowed.end());
            return sd;
        }
        if (kind.text == "ind") {
            InclusionDep d;
            std::tie(d.lhs, d.lhs_positions) = column_list();
            lex.expect("<=");
            std::tie(d.rhs, d.rhs_positions) = column_list();
            if (d.lhs_positions.size() != d.rhs_positions.size())
                schema_fail("inclusion dependency sides list different numbers of positions");
            return d;
        }
        if (kind.text == "fd") {
            FunctionalDep f;
            f.relation = relation(lex.expect_identifier());
            lex.expect("[");
            f.from = position(f.relation);
            lex.expect("->");
            f.to = position(f.relation);
            lex.expect("]");
            return f;
        }
        Lexer::fail_at(kind, "unknown constraint kind '" + kind.text + "' (expected sd, ind or fd)");
    }
};

std::string positions(std::span<const std::size_t> ps)
{
    std::string s;
    for (std::size_t k = 0; k < ps.size(); ++k)
        s += (k ? "," : "") + std::to_string(ps[k] + 1);
    return s;
}

Tuple project(const Tuple &t, std::span<const std::size_t> ps)
{
    Tuple out;
    out.reserve(ps.size());
    for (std::size_t p : ps)
        out.push_back(t[p]);
    return out;
}

}

ConstraintSet parse_constraints(std::string_view text, const Schema &schema, ConstantPool &pool)
{
    ConstraintSet out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos)
            end = text.size();
        ++line_no;
        const std::string_view line = text.substr(start, end - start);
        start = end + 1;
        try {
            ConstraintReader reader{Lexer(line), schema, pool, line_no};
            if (reader.lex.at_end())
                continue;
            out.items.push_back(reader.read());
            if (not reader.lex.at_end())
                reader.lex.fail("trailing input '" + Lexer::describe(reader.lex.peek()) + "'");
        } catch (const parse_error &e) {
            throw parse_error(e.message(), line_no, e.column());
        }
    }
    return out;
}

std::string print_constraint(const Constraint &c, const Schema &schema, const ConstantPool &pool)
{
    std::ostringstream os;
    if (auto *sd = std::get_if<SmallDomain>(&c)) {
        os << "sd " << schema[sd->relation].name << '[' << sd->position + 1 << "] {";
        for (std::size_t k = 0; k < sd->allowed.size(); ++k)
            os << (k ? "," : "") << pool.render(sd->allowed[k]);
        os << '}';
    } else if (auto *d = std::get_if<InclusionDep>(&c)) {
        os << "ind " << schema[d->lhs].name << '[' << positions(d->lhs_positions) << "] <= " << schema[d->rhs].name
           << '[' << positions(d->rhs_positions) << ']';
    } else {
        const auto &f = std::get<FunctionalDep>(c);
        os << "fd " << schema[f.relation].name << '[' << f.from + 1 << "->" << f.to + 1 << ']';
    }
    return os.str();
}

bool satisfies(const Database &db, const ConstraintSet &gamma)
{
    for (const SmallDomain &sd : gamma.small_domains())
        for (const Tuple &t : db.relation(sd.relation))
            if (not std::binary_search(sd.allowed.begin(), sd.allowed.end(), t[sd.position]))
                return false;
    for (const InclusionDep &d : gamma.inclusion_deps()) {
        std::unordered_set<Tuple, TupleHash> rhs;
        for (const Tuple &t : db.relation(d.rhs))
            rhs.insert(project(t, d.rhs_positions));
        for (const Tuple &t : db.relation(d.lhs))
            if (not rhs.contains(project(t, d.lhs_positions)))
                return false;
    }
    for (const FunctionalDep &f : gamma.functional_deps()) {
        std::unordered_map<Value, Value> image;
        for (const Tuple &t : db.relation(f.relation)) {
            auto [it, fresh] = image.emplace(t[f.from], t[f.to]);
            if (not fresh and it->second != t[f.to])
                return false;
        }
    }
    return true;
}

std::vector<VarId> DomainAssignment::restricted_vars() const
{
    std::vector<VarId> out;
    for (VarId v = 0; v < domain.size(); ++v)
        if (domain[v])
            out.push_back(v);
    return out;
}

bool DomainAssignment::has_empty() const
{
    return std::any_of(domain.begin(), domain.end(), [](const auto &d) { return d and d->empty(); });
}

DomainAssignment compute_domains(const CQ &q, const ConstraintSet &gamma)
{
    DomainAssignment out;
    out.domain.assign(q.num_vars(), std::nullopt);
    for (const SmallDomain &sd : gamma.small_domains())
        for (const Atom &a : q.body) {
            if (a.relation != sd.relation or not a.args[sd.position].is_var())
                continue;
            auto &dom = out.domain[a.args[sd.position].id];
            if (not dom) {
                dom = sd.allowed;
                continue;
            }
            std::vector<Value> meet;
            std::set_intersection(dom->begin(), dom->end(), sd.allowed.begin(), sd.allowed.end(),
                                  std::back_inserter(meet));
            dom = std::move(meet);
        }
    return out;
}

CQ substitute(const CQ &q, std::span<const std::optional<Value>> alpha)
{
    CQ out = q;
    auto map = [&](Term &t) {
        if (t.is_var() and t.id < alpha.size() and alpha[t.id])
            t = Term::constant(*alpha[t.id]);
    };
    for (Term &t : out.head)
        map(t);
    for (Atom &a : out.body)
        for (Term &t : a.args)
            map(t);
    // bodies are atom sets, so literals made equal by alpha collapse
    return remove_duplicate_atoms(out.compact());
}

UCQ sd_rewrite(const UCQ &q, const ConstraintSet &gamma, std::size_t cap)
{
    UCQ out = UCQ::empty(q.arity);
    for (const CQ &d : q.disjuncts) {
        const DomainAssignment dom = compute_domains(d, gamma);
        if (dom.has_empty())
            continue;
        const std::vector<VarId> vars = dom.restricted_vars();
        std::vector<std::size_t> idx(vars.size(), 0);
        std::vector<std::optional<Value>> alpha(d.num_vars());
        for (;;) {
            for (std::size_t k = 0; k < vars.size(); ++k)
                alpha[vars[k]] = (*dom.domain[vars[k]])[idx[k]];
            if (out.disjuncts.size() >= cap)
                throw budget_exceeded("small-domain rewrite exceeds " + std::to_string(cap) + " disjuncts");
            CQ next = substitute(d, alpha);
            const bool seen = std::any_of(out.disjuncts.begin(), out.disjuncts.end(), [&](const CQ &o) {
                return o.head == next.head and o.body == next.body;
            });
            if (not seen)
                out.disjuncts.push_back(std::move(next));
            // odometer; the last restricted variable varies fastest
            bool done = true;
            for (std::size_t k = vars.size(); k-- > 0;) {
                if (++idx[k] < dom.domain[vars[k]]->size()) {
                    done = false;
                    break;
                }
                idx[k] = 0;
            }
            if (done)
                break;
        }
    }
    return out;
}

bool ind_applicable(const CQ &q, const InclusionDep &dep, std::size_t psi1, std::size_t psi2)
{
    if (psi1 >= q.body.size() or psi2 >= q.body.size())
        throw precondition_error("atom position outside the query body");
    if (psi1 == psi2)
        return false;
    const Atom &a1 = q.body[psi1];
    const Atom &a2 = q.body[psi2];
    if (a1.relation != dep.lhs or a2.relation != dep.rhs)
        return false;
    for (std::size_t k = 0; k < dep.lhs_positions.size(); ++k)
        if (a1.args[dep.lhs_positions[k]] != a2.args[dep.rhs_positions[k]])
            return false;
    std::vector<VarId> seen;
    for (std::size_t p = 0; p < a2.args.size(); ++p) {
        if (std::find(dep.rhs_positions.begin(), dep.rhs_positions.end(), p) != dep.rhs_positions.end())
            continue;
        const Term &t = a2.args[p];
        if (not t.is_var() or q.is_free(t.id))
            return false;
        const auto occ = q.atoms_of(t.id);
        if (occ.size() != 1 or occ[0] != psi2)
            return false;
        if (std::find(seen.begin(), seen.end(), t.id) != seen.end())
            return false;
        seen.push_back(t.id);
    }
    // a repeated variable across aligned and unaligned positions would also constrain psi2
    for (std::size_t p : dep.rhs_positions)
        if (a2.args[p].is_var() and std::find(seen.begin(), seen.end(), a2.args[p].id) != seen.end())
            return false;
    return true;
}

CQ apply_ind(const CQ &q, const InclusionDep &dep, std::size_t psi1, std::size_t psi2)
{
    if (not ind_applicable(q, dep, psi1, psi2))
        throw precondition_error("inclusion dependency is not applicable to the given atoms");
    CQ out = q;
    out.body.erase(out.body.begin() + static_cast<std::ptrdiff_t>(psi2));
    return out.compact();
}

IndSimplification simplify_with_inds(const CQ &q, const ConstraintSet &gamma)
{
    const std::vector<InclusionDep> deps = gamma.inclusion_deps();
    IndSimplification out{q, {}};
    for (bool progress = true; progress;) {
        progress = false;
        for (std::size_t d = 0; d < deps.size() and not progress; ++d)
            for (std::size_t p2 = 0; p2 < out.query.body.size() and not progress; ++p2)
                for (std::size_t p1 = 0; p1 < out.query.body.size() and not progress; ++p1)
                    if (ind_applicable(out.query, deps[d], p1, p2)) {
                        out.query = apply_ind(out.query, deps[d], p1, p2);
                        out.steps.push_back({d, p1, p2});
                        progress = true;
                    }
    }
    return out;
}

UCQ simplify_with_inds(const UCQ &q, const ConstraintSet &gamma)
{
    UCQ out = UCQ::empty(q.arity);
    for (const CQ &d : q.disjuncts)
        out.disjuncts.push_back(simplify_with_inds(d, gamma).query);
    return out;
}

ConstraintGuard::ConstraintGuard(const Schema &schema, ConstraintSet gamma)
    : gamma_(std::move(gamma)), sds_(gamma_.small_domains()), inds_(gamma_.inclusion_deps()),
      fds_(gamma_.functional_deps()), db_(schema), ind_lhs_(inds_.size()), ind_rhs_(inds_.size()),
      fd_map_(fds_.size())
{ }

std::optional<std::string> ConstraintGuard::violation(const UpdateCommand &cmd) const
{
    const RelId r = cmd.relation;
    const Tuple &t = cmd.tuple;
    if (r >= db_.schema().size() or t.size() != db_.schema()[r].arity)
        return std::nullopt;  // malformed; Database::apply reports it
    const bool present = db_.contains(r, t);
    if (cmd.kind == UpdateKind::insert) {
        if (present)
            return std::nullopt;
        for (const SmallDomain &sd : sds_)
            if (sd.relation == r and not std::binary_search(sd.allowed.begin(), sd.allowed.end(), t[sd.position]))
                return "value at " + db_.schema()[r].name + "[" + std::to_string(sd.position + 1) +
                       "] lies outside its small domain";
        for (std::size_t k = 0; k < fds_.size(); ++k) {
            const FunctionalDep &f = fds_[k];
            if (f.relation != r)
                continue;
            auto it = fd_map_[k].find(t[f.from]);
            if (it != fd_map_[k].end() and it->second.first != t[f.to])
                return "functional dependency on " + db_.schema()[r].name + " would map one key to two values";
        }
        for (std::size_t k = 0; k < inds_.size(); ++k) {
            const InclusionDep &d = inds_[k];
            if (d.lhs != r)
                continue;
            const Tuple p = project(t, d.lhs_positions);
            const bool self = d.rhs == r and project(t, d.rhs_positions) == p;
            if (not self and not ind_rhs_[k].contains(p))
                return "inclusion dependency " + db_.schema()[d.lhs].name + " <= " + db_.schema()[d.rhs].name +
                       " would lack a witness";
        }
        return std::nullopt;
    }
    if (not present)
        return std::nullopt;
    for (std::size_t k = 0; k < inds_.size(); ++k) {
        const InclusionDep &d = inds_[k];
        if (d.rhs != r)
            continue;
        const Tuple p = project(t, d.rhs_positions);
        auto rhs = ind_rhs_[k].find(p);
        if (rhs->second > 1)
            continue;
        auto lhs = ind_lhs_[k].find(p);
        std::size_t remaining = lhs == ind_lhs_[k].end() ? 0 : lhs->second;
        if (d.lhs == r and project(t, d.lhs_positions) == p)
            --remaining;
        if (remaining > 0)
            return "deleting would leave " + db_.schema()[d.lhs].name + " tuples without a witness in " +
                   db_.schema()[d.rhs].name;
    }
    return std::nullopt;
}

bool ConstraintGuard::apply(const UpdateCommand &cmd)
{
    if (auto why = violation(cmd))
        throw constraint_violation(*why);
    if (not db_.apply(cmd))
        return false;
    const int delta = cmd.kind == UpdateKind::insert ? +1 : -1;
    auto bump = [delta](Counter &c, Tuple key) {
        if (delta > 0)
            ++c[std::move(key)];
        else if (auto it = c.find(key); --it->second == 0)
            c.erase(it);
    };
    for (std::size_t k = 0; k < inds_.size(); ++k) {
        if (inds_[k].lhs == cmd.relation)
            bump(ind_lhs_[k], project(cmd.tuple, inds_[k].lhs_positions));
        if (inds_[k].rhs == cmd.relation)
            bump(ind_rhs_[k], project(cmd.tuple, inds_[k].rhs_positions));
    }
    for (std::size_t k = 0; k < fds_.size(); ++k) {
        if (fds_[k].relation != cmd.relation)
            continue;
        const Value key = cmd.tuple[fds_[k].from];
        if (delta > 0) {
            auto &slot = fd_map_[k][key];
            slot.first = cmd.tuple[fds_[k].to];
            ++slot.second;
        } else if (auto it = fd_map_[k].find(key); --it->second.second == 0) {
            fd_map_[k].erase(it);
        }
    }
    return true;
}

Database random_satisfying_db(const Schema &schema, const ConstraintSet &gamma, std::span<const Value> domain,
                              std::size_t tuples_per_relation, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const auto sds = gamma.small_domains();
    const auto inds = gamma.inclusion_deps();
    const auto fds = gamma.functional_deps();

    // per column: the values it may take
    std::vector<std::vector<std::vector<Value>>> allowed(schema.size());
    for (RelId r = 0; r < schema.size(); ++r)
        allowed[r].assign(schema[r].arity, std::vector<Value>(domain.begin(), domain.end()));
    for (const SmallDomain &sd : sds) {
        auto &col = allowed[sd.relation][sd.position];
        std::vector<Value> meet;
        for (Value v : col)
            if (std::binary_search(sd.allowed.begin(), sd.allowed.end(), v))
                meet.push_back(v);
        col = std::move(meet);
    }
    auto pick = [&](const std::vector<Value> &vals) {
        return vals[std::uniform_int_distribution<std::size_t>(0, vals.size() - 1)(rng)];
    };
    auto fd_ok = [&](const Database &db, RelId r, const Tuple &t) {
        for (const FunctionalDep &f : fds) {
            if (f.relation != r)
                continue;
            for (const Tuple &u : db.relation(r))
                if (u[f.from] == t[f.from] and u[f.to] != t[f.to])
                    return false;
        }
        return true;
    };
    auto fillable = [&](RelId r) {
        return std::all_of(allowed[r].begin(), allowed[r].end(), [](const auto &c) { return not c.empty(); });
    };

    Database db(schema);
    for (RelId r = 0; r < schema.size(); ++r) {
        if (not fillable(r))
            continue;
        for (std::size_t k = 0; k < tuples_per_relation; ++k) {
            Tuple t(schema[r].arity);
            for (std::size_t p = 0; p < t.size(); ++p)
                t[p] = pick(allowed[r][p]);
            if (fd_ok(db, r, t))
                db.insert(r, std::move(t));
        }
    }

    // Repair inclusion dependencies: first try adding witnesses, then fall back to deleting unsupported tuples.
    for (int round = 0; round < 4; ++round) {
        bool changed = false;
        for (const InclusionDep &d : inds) {
            std::unordered_set<Tuple, TupleHash> rhs;
            for (const Tuple &t : db.relation(d.rhs))
                rhs.insert(project(t, d.rhs_positions));
            std::vector<Tuple> missing;
            for (const Tuple &t : db.relation(d.lhs))
                if (not rhs.contains(project(t, d.lhs_positions)))
                    missing.push_back(project(t, d.lhs_positions));
            for (const Tuple &p : missing) {
                if (rhs.contains(p) or not fillable(d.rhs))
                    continue;
                Tuple w(schema[d.rhs].arity);
                for (std::size_t q = 0; q < w.size(); ++q)
                    w[q] = pick(allowed[d.rhs][q]);
                bool ok = true;
                for (std::size_t k = 0; k < p.size(); ++k) {
                    const auto &col = allowed[d.rhs][d.rhs_positions[k]];
                    ok = ok and std::find(col.begin(), col.end(), p[k]) != col.end();
                    w[d.rhs_positions[k]] = p[k];
                }
                if (ok and fd_ok(db, d.rhs, w) and db.insert(d.rhs, w)) {
                    rhs.insert(p);
                    changed = true;
                }
            }
        }
        if (not changed)
            break;
    }
    for (bool changed = true; changed;) {
        changed = false;
        for (const InclusionDep &d : inds) {
            std::unordered_set<Tuple, TupleHash> rhs;
            for (const Tuple &t : db.relation(d.rhs))
                rhs.insert(project(t, d.rhs_positions));
            std::vector<Tuple> doomed;
            for (const Tuple &t : db.relation(d.lhs))
                if (not rhs.contains(project(t, d.lhs_positions)))
                    doomed.push_back(t);
            for (Tuple &t : doomed)
                changed |= db.remove(d.lhs, std::move(t));
        }
    }
    return db;
}

FdQsetEngine::FdQsetEngine(RelId s, RelId e, RelId t) : s_(s), e_(e), t_(t) { }

FdQsetEngine::FdQsetEngine(const Schema &schema)
    : FdQsetEngine(schema.id_of("S"), schema.id_of("E"), schema.id_of("T"))
{
    if (schema[s_].arity != 1 or schema[e_].arity != 2 or schema[t_].arity != 1)
        throw schema_error("expected S/1, E/2 and T/1");
}

std::uint64_t FdQsetEngine::m_of(Value b) const
{
    auto it = m_b_.find(b);
    return it == m_b_.end() ? 0 : it->second;
}

void FdQsetEngine::shift(Value b, std::int64_t delta)
{
    auto &mb = m_b_[b];
    mb = static_cast<std::uint64_t>(static_cast<std::int64_t>(mb) + delta);
    ++last_steps_;
    if (in_t_.contains(b)) {
        m_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(m_) + delta);
        ++last_steps_;
    }
    if (mb == 0)
        m_b_.erase(b);
}

bool FdQsetEngine::update(const UpdateCommand &cmd)
{
    const auto t0 = std::chrono::steady_clock::now();
    last_steps_ = 1;
    const bool ins = cmd.kind == UpdateKind::insert;
    bool changed = false;
    if (cmd.relation == s_) {
        const Value a = cmd.tuple.at(0);
        changed = ins ? in_s_.emplace(a, true).second : in_s_.erase(a) > 0;
        if (changed)
            if (auto it = succ_.find(a); it != succ_.end())
                shift(it->second, ins ? +1 : -1);
    } else if (cmd.relation == t_) {
        const Value b = cmd.tuple.at(0);
        changed = ins ? in_t_.emplace(b, true).second : in_t_.erase(b) > 0;
        if (changed) {
            const auto mb = static_cast<std::int64_t>(m_of(b));
            m_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(m_) + (ins ? mb : -mb));
            ++last_steps_;
        }
    } else if (cmd.relation == e_) {
        const Value a = cmd.tuple.at(0);
        const Value b = cmd.tuple.at(1);
        auto it = succ_.find(a);
        if (ins) {
            if (it != succ_.end() and it->second != b)
                throw constraint_violation("E[1->2]: E already maps this key to another value");
            if (it == succ_.end()) {
                succ_.emplace(a, b);
                changed = true;
                if (in_s_.contains(a))
                    shift(b, +1);
            }
        } else if (it != succ_.end() and it->second == b) {
            succ_.erase(it);
            changed = true;
            if (in_s_.contains(a))
                shift(b, -1);
        }
    } else {
        throw schema_error("relation outside S, E, T");
    }
    report_["update"].record(last_steps_,
                             std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count());
    return changed;
}

bool FdQsetEngine::answer()
{
    report_["answer"].record(1, 0);
    return m_ > 0;
}

}
