#pragma once

#include "dynq/database.hpp"
#include "dynq/engine.hpp"
#include "dynq/hierarchy.hpp"
#include "dynq/instrument.hpp"
#include "dynq/query.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <unordered_map>
#include <string>
#include <vector>

namespace dynq {

inline constexpr std::size_t default_result_cap = 50'000'000;

struct EvalStats
{
    std::uint64_t steps = 0;  ///< candidate tuples examined
};

/// q(D) by backtracking over all valuations. Throws `budget_exceeded` past `cap` answers.
TupleSet eval_naive(const CQ &q, const Database &db, EvalStats *stats = nullptr,
                    std::size_t cap = default_result_cap);
TupleSet eval_naive(const UCQ &q, const Database &db, EvalStats *stats = nullptr,
                    std::size_t cap = default_result_cap);
/// Evaluates the components separately and joins them on the head variables.
TupleSet eval_naive(const GeneralizedCQ &g, const Database &db, std::size_t cap = default_result_cap);
/// Whether `t` belongs to q(D), searching only valuations that agree with `t` on the head.
bool holds_naive(const CQ &q, const Database &db, const Tuple &t, EvalStats *stats = nullptr);
bool holds_naive(const UCQ &q, const Database &db, const Tuple &t, EvalStats *stats = nullptr);

/// Re-evaluates the query from scratch for every routine. Supports every routine.
class NaiveEngine final : public QueryEngine
{
  public:
    NaiveEngine(UCQ q, const Schema &schema);

    void update(const UpdateCommand &cmd) override;
    std::uint64_t count() override;
    bool test(const Tuple &t) override;
    bool answer() override;
    /// Emits in ascending tuple order.
    void enumerate(const std::function<bool(const Tuple &)> &emit) override;

    Capabilities capabilities() const override { return {true, true, true, true}; }
    std::string description() const override { return "naive"; }
    const EngineReport &report() const override { return report_; }
    std::size_t arity() const override { return query_.arity; }

    const Database &database() const { return db_; }

  private:
    UCQ query_;
    Database db_;
    EngineReport report_;
};

struct StreamOptions
{
    double insert_probability = 0.6;
    /// Probability that a delete targets a currently present tuple (when one exists).
    double presence_ratio = 0.8;
};

/// Reproducible mixed stream over constants drawn from `domain`.
std::vector<UpdateCommand> random_stream(const Schema &schema, std::span<const Value> domain, std::size_t length,
                                         std::uint64_t seed, StreamOptions options = {});
/// Up to `tuples_per_relation` distinct random tuples per relation.
Database random_db(const Schema &schema, std::span<const Value> domain, std::size_t tuples_per_relation,
                   std::uint64_t seed);
/// Interns the integers 1..n.
std::vector<Value> int_domain(ConstantPool &pool, std::size_t n);

/// Vars/atoms certifying that a homomorphic core is not t-hierarchical.
struct ReductionWitness
{
    /// 1: x, y quantified with atoms psi^x, psi^{x,y}, psi^y. 2: x free, y quantified with psi^{x,y}, psi^y.
    int clause = 1;
    VarId x = 0;
    VarId y = 0;
    std::optional<std::size_t> psi_x;
    std::size_t psi_xy = 0;
    std::size_t psi_y = 0;
};

/// First witness of a deterministic scan. Throws `precondition_error` if `q` is t-hierarchical.
ReductionWitness find_violation_witness(const CQ &q);

struct OuMvInstance
{
    std::size_t n = 0;
    std::vector<std::vector<std::uint8_t>> matrix;
    std::vector<std::vector<std::uint8_t>> u;  ///< u[t] for round t
    std::vector<std::vector<std::uint8_t>> v;
};

/// Entries of M with probability 1/2; vector entries sparse enough that about half the rounds answer 1.
OuMvInstance random_oumv(std::size_t n, std::uint64_t seed);
/// Whether u^T M v = 1 over the Boolean semiring.
bool brute_force_umv(const std::vector<std::vector<std::uint8_t>> &m, const std::vector<std::uint8_t> &u,
                     const std::vector<std::uint8_t> &v);
/// Text form: n, then n rows of M, then u^t and v^t alternating for t = 1..n; entries 0/1 separated by blanks.
OuMvInstance parse_oumv(std::string_view text);

/** Data for encoding OuMv instances of dimension n into databases for `query`.
 *
 * iota_{i,j} maps x to a_i, y to b_j, every other variable w to c_w, and fixes constants. The partition is
 * {a_i}, {b_j} and one singleton per c_w; h maps each block back onto its variable. */
struct ReductionSpec
{
    CQ query;
    ReductionWitness witness;
    std::size_t n = 0;
    std::vector<Value> a;
    std::vector<Value> b;
    std::vector<std::optional<Value>> c;  ///< per variable id; empty for x and y

    Tuple iota(const Atom &atom, std::size_t i, std::size_t j) const;
    /// The tuple to test: the head under iota with x replaced by a_i (clause 2) or iota of any (i, j) (clause 1).
    Tuple probe(std::size_t i) const;
    /// h(value): the variable or constant a database value maps back to.
    dynq::Term back(Value v) const;

    std::unordered_map<Value, dynq::Term> back_map;
};

/// Allocates the fresh constants. Throws `precondition_error` for a t-hierarchical query.
ReductionSpec make_reduction(const CQ &q, std::size_t n, ConstantPool &pool);

/// Maintains D(q, M, u, v) with per-tuple contribution counts so vector changes translate into minimal deltas.
class ReductionDb
{
  public:
    ReductionDb(const ReductionSpec &spec, const std::vector<std::vector<std::uint8_t>> &matrix);

    /// Insertions building D(q, M, 0, 0).
    std::vector<UpdateCommand> initial() const;
    /// Commands moving the database to vectors (u, v). At most 2n commands.
    std::vector<UpdateCommand> move_to(const std::vector<std::uint8_t> &u, const std::vector<std::uint8_t> &v);
    /// Snapshot of the current database.
    Database database(const Schema &schema) const;

  private:
    const ReductionSpec &spec_;
    std::unordered_map<RelId, std::unordered_map<Tuple, std::size_t, TupleHash>> counts_;
    std::vector<std::uint8_t> u_;
    std::vector<std::uint8_t> v_;

    void contribute(RelId r, Tuple t, int delta, std::vector<UpdateCommand> *out);
};

/// Whether h maps every tuple of `db` onto an atom of the query.
bool verify_maps_into(const ReductionSpec &spec, const Database &db);

struct OuMvTrial
{
    std::vector<bool> answers;
    std::vector<bool> expected;
    std::vector<std::size_t> delta_sizes;
    bool homomorphism_ok = true;
    bool all_match() const { return answers == expected; }
};

/// Plays all n rounds against `engine`, which must start on the empty database.
OuMvTrial run_oumv_trial(QueryEngine &engine, const OuMvInstance &inst, const ReductionSpec &spec,
                         const Schema &schema, bool verify_homomorphism = true);

struct BenchRow
{
    std::size_t size = 0;
    std::string op;
    double mean_steps = 0;
    std::uint64_t max_steps = 0;
    double mean_ns = 0;
};

struct BenchOptions
{
    std::size_t tuples_per_value = 2;  ///< initial tuples per relation = size * this
    std::size_t updates = 2000;
    std::size_t probes = 200;
    std::size_t query_repeats = 20;
    std::size_t enum_limit = 2000;
};

/// For each active-domain size: instrumented cost of update, count, answer, test and enumeration delay.
std::vector<BenchRow> bench(const UCQ &q, const Schema &schema, EngineKind kind, const std::vector<std::size_t> &sizes,
                            std::uint64_t seed, ConstantPool &pool, BenchOptions options = {});
/// `size,op,mean_steps,max_steps,mean_ns` with a header line.
std::string format_bench_csv(const std::vector<BenchRow> &rows);
std::string format_bench_table(const std::vector<BenchRow> &rows);

}
