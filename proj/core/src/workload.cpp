#include "dynq/workload.hpp"

#include "dynq/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

namespace dynq {

namespace {

class Join
{
  public:
    Join(const CQ &q, const Database &db, EvalStats *stats, std::size_t cap, bool first_only)
        : q_(q), db_(db), stats_(stats), cap_(cap), first_only_(first_only)
    { }

    void run(std::vector<std::optional<Value>> binding, TupleSet &out)
    {
        bind_ = std::move(binding);
        out_ = &out;
        plan();
        descend(0);
    }

  private:
    const CQ &q_;
    const Database &db_;
    EvalStats *stats_;
    std::size_t cap_;
    bool first_only_;
    bool done_ = false;
    std::vector<std::optional<Value>> bind_;
    std::vector<std::size_t> order_;
    std::vector<bool> determined_;  ///< per order position: every argument fixed when reached
    TupleSet *out_ = nullptr;
    Tuple scratch_;

    void plan()
    {
        std::vector<bool> bound(q_.num_vars(), false);
        for (VarId v = 0; v < q_.num_vars(); ++v)
            bound[v] = bind_[v].has_value();
        std::vector<bool> placed(q_.body.size(), false);
        for (std::size_t k = 0; k < q_.body.size(); ++k) {
            std::size_t best = q_.body.size();
            double best_score = 0;
            for (std::size_t i = 0; i < q_.body.size(); ++i) {
                if (placed[i])
                    continue;
                const Atom &a = q_.body[i];
                std::size_t fixed = 0;
                for (const Term &t : a.args)
                    fixed += t.is_const() or bound[t.id] ? 1 : 0;
                const double ratio = a.args.empty() ? 1.0 : static_cast<double>(fixed) / static_cast<double>(a.args.size());
                const double score = ratio * 1e9 - static_cast<double>(db_.relation(a.relation).size());
                if (best == q_.body.size() or score > best_score) {
                    best_score = score;
                    best = i;
                }
            }
            placed[best] = true;
            order_.push_back(best);
            bool all = true;
            for (const Term &t : q_.body[best].args) {
                if (t.is_var() and not bound[t.id])
                    all = false;
            }
            determined_.push_back(all);
            for (const Term &t : q_.body[best].args)
                if (t.is_var())
                    bound[t.id] = true;
        }
    }

    void emit()
    {
        Tuple t;
        t.reserve(q_.head.size());
        for (const Term &h : q_.head)
            t.push_back(h.is_const() ? h.id : *bind_[h.id]);
        out_->insert(std::move(t));
        if (out_->size() > cap_)
            throw budget_exceeded("naive evaluation exceeded its result cap of " + std::to_string(cap_));
        if (first_only_ or q_.head.empty())
            done_ = true;
    }

    void descend(std::size_t k)
    {
        if (k == order_.size()) {
            emit();
            return;
        }
        const Atom &a = q_.body[order_[k]];
        if (determined_[k]) {
            scratch_.clear();
            for (const Term &t : a.args)
                scratch_.push_back(t.is_const() ? t.id : *bind_[t.id]);
            if (stats_)
                ++stats_->steps;
            if (db_.contains(a.relation, scratch_))
                descend(k + 1);
            return;
        }
        std::vector<VarId> trail;
        for (const Tuple &tuple : db_.relation(a.relation)) {
            if (stats_)
                ++stats_->steps;
            bool ok = true;
            for (std::size_t p = 0; ok and p < a.args.size(); ++p) {
                const Term &t = a.args[p];
                if (t.is_const())
                    ok = t.id == tuple[p];
                else if (bind_[t.id])
                    ok = *bind_[t.id] == tuple[p];
                else {
                    bind_[t.id] = tuple[p];
                    trail.push_back(t.id);
                }
            }
            if (ok)
                descend(k + 1);
            for (VarId v : trail)
                bind_[v].reset();
            trail.clear();
            if (done_)
                return;
        }
    }
};

bool prebind(const CQ &q, const Tuple &t, std::vector<std::optional<Value>> &bind)
{
    bind.assign(q.num_vars(), std::nullopt);
    for (std::size_t i = 0; i < q.head.size(); ++i) {
        const Term &h = q.head[i];
        if (h.is_const()) {
            if (h.id != t[i])
                return false;
        } else if (bind[h.id]) {
            if (*bind[h.id] != t[i])
                return false;
        } else {
            bind[h.id] = t[i];
        }
    }
    return true;
}

}

TupleSet eval_naive(const CQ &q, const Database &db, EvalStats *stats, std::size_t cap)
{
    TupleSet out;
    Join(q, db, stats, cap, false).run(std::vector<std::optional<Value>>(q.num_vars()), out);
    return out;
}

TupleSet eval_naive(const UCQ &q, const Database &db, EvalStats *stats, std::size_t cap)
{
    TupleSet out;
    for (const CQ &d : q.disjuncts) {
        TupleSet part = eval_naive(d, db, stats, cap);
        out.insert(part.begin(), part.end());
        if (out.size() > cap)
            throw budget_exceeded("naive evaluation exceeded its result cap of " + std::to_string(cap));
    }
    return out;
}

bool holds_naive(const CQ &q, const Database &db, const Tuple &t, EvalStats *stats)
{
    if (t.size() != q.arity())
        throw precondition_error("tuple arity does not match the query");
    std::vector<std::optional<Value>> bind;
    if (not prebind(q, t, bind))
        return false;
    TupleSet out;
    Join(q, db, stats, default_result_cap, true).run(std::move(bind), out);
    return not out.empty();
}

bool holds_naive(const UCQ &q, const Database &db, const Tuple &t, EvalStats *stats)
{
    for (const CQ &d : q.disjuncts)
        if (holds_naive(d, db, t, stats))
            return true;
    return false;
}

TupleSet eval_naive(const GeneralizedCQ &g, const Database &db, std::size_t cap)
{
    const CQ &src = g.source;
    struct Part
    {
        std::vector<VarId> vars;
        std::vector<Tuple> rows;
    };
    std::vector<Part> parts;
    if (not g.phi0.empty()) {
        CQ p;
        p.var_names = src.var_names;
        p.body = g.phi0;
        Part part;
        for (const Atom &a : g.phi0)
            for (const Term &t : a.args)
                if (t.is_var() and std::find(part.vars.begin(), part.vars.end(), t.id) == part.vars.end()) {
                    part.vars.push_back(t.id);
                    p.head.push_back(t);
                }
        TupleSet rows = eval_naive(p, db, nullptr, cap);
        part.rows.assign(rows.begin(), rows.end());
        parts.push_back(std::move(part));
    }
    for (const auto &c : g.components) {
        TupleSet rows = eval_naive(c.query, db, nullptr, cap);
        parts.push_back({c.free, {rows.begin(), rows.end()}});
    }
    TupleSet out;
    std::vector<std::optional<Value>> bind(src.num_vars());
    std::function<void(std::size_t)> join = [&](std::size_t k) {
        if (k == parts.size()) {
            Tuple t;
            for (const Term &h : src.head)
                t.push_back(h.is_const() ? h.id : *bind[h.id]);
            out.insert(std::move(t));
            if (out.size() > cap)
                throw budget_exceeded("naive evaluation exceeded its result cap");
            return;
        }
        const Part &p = parts[k];
        for (const Tuple &row : p.rows) {
            std::vector<VarId> trail;
            bool ok = true;
            for (std::size_t i = 0; ok and i < p.vars.size(); ++i) {
                auto &b = bind[p.vars[i]];
                if (b)
                    ok = *b == row[i];
                else {
                    b = row[i];
                    trail.push_back(p.vars[i]);
                }
            }
            if (ok)
                join(k + 1);
            for (VarId v : trail)
                bind[v].reset();
        }
    };
    join(0);
    return out;
}

NaiveEngine::NaiveEngine(UCQ q, const Schema &schema) : query_(std::move(q)), db_(schema) { }

void NaiveEngine::update(const UpdateCommand &cmd)
{
    const auto t0 = std::chrono::steady_clock::now();
    db_.apply(cmd);
    report_["update"].record(1, std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count());
}

std::uint64_t NaiveEngine::count()
{
    const auto t0 = std::chrono::steady_clock::now();
    EvalStats st;
    const auto n = eval_naive(query_, db_, &st).size();
    report_["count"].record(st.steps, std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count());
    return n;
}

bool NaiveEngine::test(const Tuple &t)
{
    if (t.size() != query_.arity)
        throw precondition_error("test tuple has arity " + std::to_string(t.size()) + ", expected " +
                                 std::to_string(query_.arity));
    const auto t0 = std::chrono::steady_clock::now();
    EvalStats st;
    const bool r = holds_naive(query_, db_, t, &st);
    report_["test"].record(st.steps, std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count());
    return r;
}

bool NaiveEngine::answer()
{
    const auto t0 = std::chrono::steady_clock::now();
    EvalStats st;
    const bool r = not eval_naive(query_, db_, &st).empty();
    report_["answer"].record(st.steps, std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count());
    return r;
}

void NaiveEngine::enumerate(const std::function<bool(const Tuple &)> &emit)
{
    auto t0 = std::chrono::steady_clock::now();
    EvalStats st;
    TupleSet result = eval_naive(query_, db_, &st);
    std::vector<Tuple> sorted(result.begin(), result.end());
    std::sort(sorted.begin(), sorted.end());
    OpStats &delay = report_["delay"];
    std::uint64_t steps = st.steps + 1;
    for (const Tuple &t : sorted) {
        delay.record(steps, std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count());
        steps = 1;
        if (not emit(t))
            return;
        t0 = std::chrono::steady_clock::now();
    }
    delay.record(steps, std::chrono::duration<double, std::nano>(std::chrono::steady_clock::now() - t0).count());
}

std::vector<UpdateCommand> random_stream(const Schema &schema, std::span<const Value> domain, std::size_t length,
                                         std::uint64_t seed, StreamOptions options)
{
    std::vector<UpdateCommand> out;
    if (schema.size() == 0 or domain.empty())
        return out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_rel(0, schema.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_val(0, domain.size() - 1);
    std::bernoulli_distribution is_insert(options.insert_probability);
    std::bernoulli_distribution target_present(options.presence_ratio);
    std::vector<std::vector<Tuple>> present(schema.size());
    std::vector<std::unordered_map<Tuple, std::size_t, TupleHash>> where(schema.size());
    auto drop = [&](RelId r, const Tuple &t) {
        auto it = where[r].find(t);
        if (it == where[r].end())
            return;
        const std::size_t i = it->second;
        where[r].erase(it);
        if (i + 1 != present[r].size()) {
            present[r][i] = std::move(present[r].back());
            where[r][present[r][i]] = i;
        }
        present[r].pop_back();
    };
    auto random_tuple = [&](RelId r) {
        Tuple t(schema[r].arity);
        for (Value &v : t)
            v = domain[pick_val(rng)];
        return t;
    };
    out.reserve(length);
    for (std::size_t k = 0; k < length; ++k) {
        const auto r = static_cast<RelId>(pick_rel(rng));
        if (is_insert(rng)) {
            Tuple t = random_tuple(r);
            if (not where[r].contains(t)) {
                where[r].emplace(t, present[r].size());
                present[r].push_back(t);
            }
            out.push_back({UpdateKind::insert, r, std::move(t)});
        } else {
            Tuple t;
            if (not present[r].empty() and target_present(rng))
                t = present[r][std::uniform_int_distribution<std::size_t>(0, present[r].size() - 1)(rng)];
            else
                t = random_tuple(r);
            drop(r, t);
            out.push_back({UpdateKind::remove, r, std::move(t)});
        }
    }
    return out;
}

Database random_db(const Schema &schema, std::span<const Value> domain, std::size_t tuples_per_relation,
                   std::uint64_t seed)
{
    Database db(schema);
    if (domain.empty())
        return db;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_val(0, domain.size() - 1);
    for (RelId r = 0; r < schema.size(); ++r)
        for (std::size_t k = 0; k < tuples_per_relation; ++k) {
            Tuple t(schema[r].arity);
            for (Value &v : t)
                v = domain[pick_val(rng)];
            db.insert(r, std::move(t));
        }
    return db;
}

std::vector<Value> int_domain(ConstantPool &pool, std::size_t n)
{
    std::vector<Value> out;
    out.reserve(n);
    for (std::size_t i = 1; i <= n; ++i)
        out.push_back(pool.intern_int(static_cast<std::int64_t>(i)));
    return out;
}

ReductionWitness find_violation_witness(const CQ &q)
{
    HierarchyCheck c = check_t_hierarchical(q);
    if (c.holds)
        throw precondition_error("the query is t-hierarchical; no violation witness exists");
    const HierarchyWitness &w = *c.witness;
    ReductionWitness r;
    r.clause = w.clause;
    r.x = w.x;
    r.y = w.y;
    if (w.clause == 1) {
        r.psi_x = w.atoms[0];
        r.psi_xy = w.atoms[1];
        r.psi_y = w.atoms[2];
    } else {
        r.psi_xy = w.atoms[0];
        r.psi_y = w.atoms[1];
    }
    return r;
}

OuMvInstance random_oumv(std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution entry(0.5);
    std::bernoulli_distribution sparse(std::min(1.0, std::sqrt(2.0 * std::log(2.0)) / static_cast<double>(n)));
    OuMvInstance inst;
    inst.n = n;
    inst.matrix.assign(n, std::vector<std::uint8_t>(n));
    for (auto &row : inst.matrix)
        for (auto &x : row)
            x = entry(rng);
    for (std::size_t t = 0; t < n; ++t) {
        std::vector<std::uint8_t> u(n), v(n);
        for (auto &x : u)
            x = sparse(rng);
        for (auto &x : v)
            x = sparse(rng);
        inst.u.push_back(std::move(u));
        inst.v.push_back(std::move(v));
    }
    return inst;
}

bool brute_force_umv(const std::vector<std::vector<std::uint8_t>> &m, const std::vector<std::uint8_t> &u,
                     const std::vector<std::uint8_t> &v)
{
    for (std::size_t i = 0; i < u.size(); ++i)
        if (u[i])
            for (std::size_t j = 0; j < v.size(); ++j)
                if (v[j] and m[i][j])
                    return true;
    return false;
}

OuMvInstance parse_oumv(std::string_view text)
{
    std::istringstream in{std::string(text)};
    OuMvInstance inst;
    if (not(in >> inst.n) or inst.n == 0)
        throw parse_error("OuMv instance must start with a positive dimension", 1, 1);
    auto row = [&](const char *what) {
        std::vector<std::uint8_t> r(inst.n);
        for (auto &x : r) {
            int b = 0;
            if (not(in >> b) or (b != 0 and b != 1))
                throw parse_error(std::string("expected a 0/1 entry in ") + what, 1, 1);
            x = static_cast<std::uint8_t>(b);
        }
        return r;
    };
    for (std::size_t i = 0; i < inst.n; ++i)
        inst.matrix.push_back(row("the matrix"));
    for (std::size_t t = 0; t < inst.n; ++t) {
        inst.u.push_back(row("a u vector"));
        inst.v.push_back(row("a v vector"));
    }
    return inst;
}

Tuple ReductionSpec::iota(const Atom &atom, std::size_t i, std::size_t j) const
{
    Tuple t;
    t.reserve(atom.args.size());
    for (const dynq::Term &w : atom.args) {
        if (w.is_const())
            t.push_back(w.id);
        else if (w.id == witness.x)
            t.push_back(a[i]);
        else if (w.id == witness.y)
            t.push_back(b[j]);
        else
            t.push_back(*c[w.id]);
    }
    return t;
}

Tuple ReductionSpec::probe(std::size_t i) const
{
    Tuple t;
    for (const dynq::Term &h : query.head) {
        if (h.is_const())
            t.push_back(h.id);
        else if (h.id == witness.x)
            t.push_back(a[i]);
        else
            t.push_back(*c[h.id]);
    }
    return t;
}

dynq::Term ReductionSpec::back(Value v) const
{
    auto it = back_map.find(v);
    return it == back_map.end() ? dynq::Term::constant(v) : it->second;
}

ReductionSpec make_reduction(const CQ &q, std::size_t n, ConstantPool &pool)
{
    ReductionSpec s;
    s.query = q;
    s.witness = find_violation_witness(q);
    s.n = n;
    for (std::size_t i = 0; i < n; ++i) {
        s.a.push_back(pool.fresh("a" + std::to_string(i + 1)));
        s.back_map.emplace(s.a.back(), dynq::Term::var(s.witness.x));
    }
    for (std::size_t j = 0; j < n; ++j) {
        s.b.push_back(pool.fresh("b" + std::to_string(j + 1)));
        s.back_map.emplace(s.b.back(), dynq::Term::var(s.witness.y));
    }
    s.c.resize(q.num_vars());
    for (VarId w = 0; w < q.num_vars(); ++w)
        if (w != s.witness.x and w != s.witness.y) {
            s.c[w] = pool.fresh("c_" + q.var_names[w]);
            s.back_map.emplace(*s.c[w], dynq::Term::var(w));
        }
    return s;
}

ReductionDb::ReductionDb(const ReductionSpec &spec, const std::vector<std::vector<std::uint8_t>> &matrix)
    : spec_(spec), u_(spec.n, 0), v_(spec.n, 0)
{
    const CQ &q = spec.query;
    for (std::size_t k = 0; k < q.body.size(); ++k) {
        if (spec.witness.psi_x == k or spec.witness.psi_y == k)
            continue;
        const bool is_matrix = k == spec.witness.psi_xy;
        TupleSet mine;
        for (std::size_t i = 0; i < spec.n; ++i)
            for (std::size_t j = 0; j < spec.n; ++j)
                if (not is_matrix or matrix[i][j])
                    mine.insert(spec.iota(q.body[k], i, j));
        for (const Tuple &t : mine)
            contribute(q.body[k].relation, t, +1, nullptr);
    }
}

void ReductionDb::contribute(RelId r, Tuple t, int delta, std::vector<UpdateCommand> *out)
{
    auto &rel = counts_[r];
    if (delta > 0) {
        if (rel[t]++ == 0 and out)
            out->push_back({UpdateKind::insert, r, std::move(t)});
    } else {
        auto it = rel.find(t);
        if (--it->second == 0) {
            rel.erase(it);
            if (out)
                out->push_back({UpdateKind::remove, r, std::move(t)});
        }
    }
}

std::vector<UpdateCommand> ReductionDb::initial() const
{
    std::vector<UpdateCommand> out;
    for (const auto &[r, rel] : counts_)
        for (const auto &[t, n] : rel)
            out.push_back({UpdateKind::insert, r, t});
    std::sort(out.begin(), out.end(), [](const UpdateCommand &a, const UpdateCommand &b) {
        return std::tie(a.relation, a.tuple) < std::tie(b.relation, b.tuple);
    });
    return out;
}

std::vector<UpdateCommand> ReductionDb::move_to(const std::vector<std::uint8_t> &u, const std::vector<std::uint8_t> &v)
{
    std::vector<UpdateCommand> out;
    const CQ &q = spec_.query;
    if (spec_.witness.psi_x) {
        const Atom &atom = q.body[*spec_.witness.psi_x];
        for (std::size_t i = 0; i < spec_.n; ++i)
            if (u[i] != u_[i])
                contribute(atom.relation, spec_.iota(atom, i, 0), u[i] ? +1 : -1, &out);
    }
    const Atom &atom = q.body[spec_.witness.psi_y];
    for (std::size_t j = 0; j < spec_.n; ++j)
        if (v[j] != v_[j])
            contribute(atom.relation, spec_.iota(atom, 0, j), v[j] ? +1 : -1, &out);
    u_ = u;
    v_ = v;
    return out;
}

Database ReductionDb::database(const Schema &schema) const
{
    Database db(schema);
    for (const auto &[r, rel] : counts_)
        for (const auto &[t, n] : rel)
            db.insert(r, t);
    return db;
}

bool verify_maps_into(const ReductionSpec &spec, const Database &db)
{
    const CQ &q = spec.query;
    for (RelId r = 0; r < db.schema().size(); ++r)
        for (const Tuple &t : db.relation(r)) {
            bool found = false;
            for (const Atom &a : q.body) {
                if (a.relation != r)
                    continue;
                bool same = true;
                for (std::size_t p = 0; same and p < t.size(); ++p)
                    same = spec.back(t[p]) == a.args[p];
                if (same) {
                    found = true;
                    break;
                }
            }
            if (not found)
                return false;
        }
    return true;
}

OuMvTrial run_oumv_trial(QueryEngine &engine, const OuMvInstance &inst, const ReductionSpec &spec,
                         const Schema &schema, bool verify_homomorphism)
{
    if (inst.n != spec.n)
        throw precondition_error("instance dimension differs from the reduction's");
    OuMvTrial trial;
    ReductionDb rdb(spec, inst.matrix);
    for (const UpdateCommand &cmd : rdb.initial())
        engine.update(cmd);
    for (std::size_t t = 0; t < inst.n; ++t) {
        const auto delta = rdb.move_to(inst.u[t], inst.v[t]);
        for (const UpdateCommand &cmd : delta)
            engine.update(cmd);
        trial.delta_sizes.push_back(delta.size());
        if (verify_homomorphism and not verify_maps_into(spec, rdb.database(schema)))
            trial.homomorphism_ok = false;
        bool got = false;
        if (spec.witness.clause == 1) {
            got = spec.query.is_boolean() ? engine.answer() : engine.test(spec.probe(0));
        } else {
            for (std::size_t i = 0; i < inst.n and not got; ++i)
                if (inst.u[t][i])
                    got = engine.test(spec.probe(i));
        }
        trial.answers.push_back(got);
        trial.expected.push_back(brute_force_umv(inst.matrix, inst.u[t], inst.v[t]));
    }
    return trial;
}

std::vector<BenchRow> bench(const UCQ &q, const Schema &schema, EngineKind kind, const std::vector<std::size_t> &sizes,
                            std::uint64_t seed, ConstantPool &pool, BenchOptions options)
{
    using clock = std::chrono::steady_clock;
    std::vector<BenchRow> rows;
    for (std::size_t size : sizes) {
        const std::vector<Value> dom = int_domain(pool, size);
        auto engine = make_engine(q, schema, kind);
        const Capabilities caps = engine->capabilities();
        engine->load(random_db(schema, dom, size * options.tuples_per_value, seed ^ (size * 0x9e3779b9ULL)));

        std::map<std::string, OpStats> stats;
        auto timed = [&](const std::string &op, auto &&call) {
            const auto t0 = clock::now();
            call();
            const double ns = std::chrono::duration<double, std::nano>(clock::now() - t0).count();
            stats[op].record(engine->report().find(op)->last_steps, ns);
        };
        for (const UpdateCommand &cmd : random_stream(schema, dom, options.updates, seed + size))
            timed("update", [&] { engine->update(cmd); });
        if (caps.count)
            for (std::size_t k = 0; k < options.query_repeats; ++k)
                timed("count", [&] { (void)engine->count(); });
        if (caps.answer)
            for (std::size_t k = 0; k < options.query_repeats; ++k)
                timed("answer", [&] { (void)engine->answer(); });
        if (caps.test and q.arity > 0) {
            std::mt19937_64 rng(seed + 7 * size);
            std::uniform_int_distribution<std::size_t> pick(0, dom.size() - 1);
            std::vector<Tuple> probes;
            if (caps.enumerate)
                engine->enumerate([&](const Tuple &t) {
                    probes.push_back(t);
                    return probes.size() < options.probes / 2;
                });
            while (probes.size() < options.probes) {
                Tuple t(q.arity);
                for (Value &v : t)
                    v = dom[pick(rng)];
                probes.push_back(std::move(t));
            }
            for (const Tuple &t : probes)
                timed("test", [&] { (void)engine->test(t); });
        }
        if (caps.enumerate) {
            const OpStats before = engine->report().find("delay") ? *engine->report().find("delay") : OpStats{};
            std::size_t emitted = 0;
            engine->enumerate([&](const Tuple &) { return ++emitted < options.enum_limit; });
            OpStats after = *engine->report().find("delay");
            OpStats d;
            d.calls = after.calls - before.calls;
            d.total_steps = after.total_steps - before.total_steps;
            d.total_ns = after.total_ns - before.total_ns;
            d.max_steps = after.max_steps;
            stats["delay"] = d;
        }
        for (const auto &[op, s] : stats)
            rows.push_back({size, op, s.mean_steps(), s.max_steps, s.mean_ns()});
    }
    return rows;
}

std::string format_bench_csv(const std::vector<BenchRow> &rows)
{
    std::ostringstream os;
    os << "size,op,mean_steps,max_steps,mean_ns\n";
    os << std::fixed << std::setprecision(2);
    for (const BenchRow &r : rows)
        os << r.size << ',' << r.op << ',' << r.mean_steps << ',' << r.max_steps << ',' << r.mean_ns << '\n';
    return os.str();
}

std::string format_bench_table(const std::vector<BenchRow> &rows)
{
    std::ostringstream os;
    os << std::left << std::setw(10) << "size" << std::setw(10) << "op" << std::right << std::setw(14) << "mean_steps"
       << std::setw(12) << "max_steps" << std::setw(14) << "mean_ns" << '\n';
    os << std::fixed << std::setprecision(2);
    for (const BenchRow &r : rows)
        os << std::left << std::setw(10) << r.size << std::setw(10) << r.op << std::right << std::setw(14)
           << r.mean_steps << std::setw(12) << r.max_steps << std::setw(14) << r.mean_ns << '\n';
    return os.str();
}

}
