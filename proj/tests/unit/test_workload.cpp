#include "corpus.hpp"
#include "oracles.hpp"

#include <dynq/errors.hpp>
#include <dynq/hierarchy.hpp>
#include <dynq/workload.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace dynq;
using dynq::testing::Fixture;

TEST(EvalNaive, HandVerifiedFixture)
{
    Fixture f;
    Database db(f.schema);
    for (const char *cmd : {"insert S(1)", "insert E(1,2)", "insert E(3,2)", "insert T(2)"})
        db.apply(parse_update(cmd, f.schema, f.pool));
    TupleSet r = eval_naive(f.query("Q(x,y) :- S(x), E(x,y), T(y)."), db);
    EXPECT_EQ(r, (TupleSet{{f.pool.intern_int(1), f.pool.intern_int(2)}}));
    EXPECT_TRUE(eval_naive(f.query("Q(x,y) :- S(x), E(x,y), T(y)."), Database(f.schema)).empty());
    TupleSet id = eval_naive(f.query("Q(x,y) :- E(x,y)."), db);
    EXPECT_EQ(id, db.relation(f.schema.id_of("E")));
}

TEST(EvalNaive, AgreesWithValuationEnumeration)
{
    Fixture f;
    const auto dom = int_domain(f.pool, 5);
    for (Value c : {5, 7})
        f.pool.intern_int(c);
    std::vector<UCQ> qs;
    for (const auto &entry : dynq::testing::corpus())
        qs.push_back(f.query(entry.text));
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Database db = random_db(f.schema, dom, 5, seed);
        for (const UCQ &q : qs) {
            TupleSet got = eval_naive(q, db);
            const auto want = dynq::testing::brute_eval(q, db);
            ASSERT_EQ(std::set<Tuple>(got.begin(), got.end()), want);
            for (const Tuple &t : want)
                ASSERT_TRUE(holds_naive(q, db, t));
        }
    }
}

TEST(EvalNaive, InvariantUnderReordering)
{
    Fixture f;
    const auto dom = int_domain(f.pool, 6);
    UCQ q = f.query("Q(x) :- E(x,y), F(y,z).");
    Database db = random_db(f.schema, dom, 12, 1);
    std::vector<UpdateCommand> cmds = db.as_insertions();
    std::mt19937_64 rng(5);
    std::shuffle(cmds.begin(), cmds.end(), rng);
    Database again(f.schema);
    for (const auto &c : cmds)
        again.apply(c);
    EXPECT_EQ(eval_naive(q, db), eval_naive(q, again));
}

TEST(EvalNaive, ResultCap)
{
    Fixture f;
    const auto dom = int_domain(f.pool, 10);
    Database db = random_db(f.schema, dom, 30, 2);
    EXPECT_THROW(eval_naive(f.query("Q(x,y) :- E(x,z), F(y,w)."), db, nullptr, 5), budget_exceeded);
}

TEST(NaiveEngine, EnumeratesInOrderAndStops)
{
    Fixture f;
    NaiveEngine e(f.query("Q(x) :- S(x)."), f.schema);
    for (int i : {3, 1, 2})
        e.update({UpdateKind::insert, f.schema.id_of("S"), {f.pool.intern_int(i)}});
    auto all = e.collect();
    EXPECT_TRUE(std::is_sorted(all.begin(), all.end()));
    EXPECT_EQ(all.size(), 3u);
    std::size_t n = 0;
    e.enumerate([&](const Tuple &) { return ++n < 2; });
    EXPECT_EQ(n, 2u);
}

TEST(Streams, DeterministicAndBiased)
{
    Fixture f;
    const auto dom = int_domain(f.pool, 5);
    EXPECT_EQ(random_stream(f.schema, dom, 100, 4), random_stream(f.schema, dom, 100, 4));
    EXPECT_TRUE(random_stream(f.schema, dom, 0, 4).empty());
    StreamOptions always{0.5, 1.0};
    Database db(f.schema);
    for (const UpdateCommand &cmd : random_stream(f.schema, dom, 2000, 9, always)) {
        if (cmd.kind == UpdateKind::remove and db.cardinality() > 0) {
            bool any = not db.relation(cmd.relation).empty();
            if (any)
                EXPECT_TRUE(db.contains(cmd.relation, cmd.tuple));
        }
        db.apply(cmd);
    }
}

TEST(Witness, Examples)
{
    Fixture f;
    ReductionWitness et = find_violation_witness(f.cq("Q(x) :- E(x,y), T(y)."));
    EXPECT_EQ(et.clause, 2);
    EXPECT_EQ(et.psi_xy, 0u);
    EXPECT_EQ(et.psi_y, 1u);
    EXPECT_FALSE(et.psi_x);
    ReductionWitness set = find_violation_witness(f.cq("Q() :- S(x), E(x,y), T(y)."));
    EXPECT_EQ(set.clause, 1);
    EXPECT_EQ(set.psi_x, 0u);
    EXPECT_EQ(set.psi_xy, 1u);
    EXPECT_EQ(set.psi_y, 2u);
    EXPECT_THROW(find_violation_witness(f.cq("Q(x,y) :- S(x), E(x,y), T(y).")), precondition_error);
}

TEST(OuMv, ParseAndBruteForce)
{
    OuMvInstance inst = parse_oumv("2\n1 0\n0 1\n1 0\n0 1\n1 1\n1 1\n");
    EXPECT_EQ(inst.n, 2u);
    EXPECT_FALSE(brute_force_umv(inst.matrix, inst.u[0], inst.v[0]));
    EXPECT_TRUE(brute_force_umv(inst.matrix, inst.u[1], inst.v[1]));
    EXPECT_THROW(parse_oumv("2\n1 0\n"), parse_error);
    EXPECT_THROW(parse_oumv("1\n2\n1\n1\n"), parse_error);
}

namespace {

OuMvInstance fixed(std::size_t n, std::uint8_t m, std::uint8_t u, std::uint8_t v)
{
    OuMvInstance i;
    i.n = n;
    i.matrix.assign(n, std::vector<std::uint8_t>(n, m));
    i.u.assign(n, std::vector<std::uint8_t>(n, u));
    i.v.assign(n, std::vector<std::uint8_t>(n, v));
    return i;
}

}

TEST(Reduction, IdentityMatrixExample)
{
    Fixture f;
    CQ q = f.cq("Q() :- S(x), E(x,y), T(y).");
    ReductionSpec spec = make_reduction(q, 2, f.pool);
    OuMvInstance inst;
    inst.n = 2;
    inst.matrix = {{1, 0}, {0, 1}};
    inst.u = {{1, 0}, {1, 1}};
    inst.v = {{0, 1}, {0, 1}};
    NaiveEngine e(UCQ::of(q), f.schema);
    OuMvTrial t = run_oumv_trial(e, inst, spec, f.schema);
    EXPECT_EQ(t.answers, (std::vector<bool>{false, true}));
    EXPECT_TRUE(t.all_match());
    EXPECT_TRUE(t.homomorphism_ok);
}

TEST(Reduction, DegenerateMatrices)
{
    Fixture f;
    for (const char *text : {"Q() :- S(x), E(x,y), T(y).", "Q(x) :- E(x,y), T(y)."}) {
        CQ q = f.cq(text);
        ReductionSpec spec = make_reduction(q, 3, f.pool);
        NaiveEngine ones(UCQ::of(q), f.schema);
        OuMvTrial a = run_oumv_trial(ones, fixed(3, 1, 1, 1), spec, f.schema);
        EXPECT_EQ(a.answers, std::vector<bool>(3, true));
        NaiveEngine zeros(UCQ::of(q), f.schema);
        OuMvTrial b = run_oumv_trial(zeros, fixed(3, 0, 1, 1), spec, f.schema);
        EXPECT_EQ(b.answers, std::vector<bool>(3, false));
        ReductionSpec one = make_reduction(q, 1, f.pool);
        for (int m = 0; m < 2; ++m)
            for (int u = 0; u < 2; ++u)
                for (int v = 0; v < 2; ++v) {
                    NaiveEngine e(UCQ::of(q), f.schema);
                    auto inst = fixed(1, static_cast<std::uint8_t>(m), static_cast<std::uint8_t>(u),
                                      static_cast<std::uint8_t>(v));
                    EXPECT_EQ(run_oumv_trial(e, inst, one, f.schema).answers[0], m and u and v);
                }
    }
}

TEST(Reduction, RandomInstancesOnCorpusHardQueries)
{
    Fixture f;
    std::vector<CQ> hard;
    for (const auto &entry : dynq::testing::corpus())
        for (const CQ &q : f.query(entry.text).disjuncts) {
            CQ c = core_of_cq(q);
            if (not is_t_hierarchical(c))
                hard.push_back(c);
        }
    ASSERT_GE(hard.size(), 3u);
    for (const CQ &q : hard)
        for (std::size_t n : {4u, 8u}) {
            ReductionSpec spec = make_reduction(q, n, f.pool);
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                NaiveEngine e(UCQ::of(q), f.schema);
                OuMvTrial t = run_oumv_trial(e, random_oumv(n, seed), spec, f.schema);
                ASSERT_TRUE(t.all_match()) << print_cq(q, f.schema, f.pool);
                ASSERT_TRUE(t.homomorphism_ok);
                for (std::size_t d : t.delta_sizes)
                    ASSERT_LE(d, 2 * n);
            }
        }
}

TEST(Reduction, DeltaReplayReachesTargetDatabase)
{
    Fixture f;
    CQ q = f.cq("Q() :- S(x), E(x,y), T(y).");
    ReductionSpec spec = make_reduction(q, 6, f.pool);
    OuMvInstance inst = random_oumv(6, 3);
    ReductionDb live(spec, inst.matrix);
    Database replay(f.schema);
    for (const auto &c : live.initial())
        replay.apply(c);
    for (std::size_t t = 0; t < inst.n; ++t) {
        for (const auto &c : live.move_to(inst.u[t], inst.v[t]))
            replay.apply(c);
        ReductionDb fresh(spec, inst.matrix);
        Database direct(f.schema);
        for (const auto &c : fresh.initial())
            direct.apply(c);
        for (const auto &c : fresh.move_to(inst.u[t], inst.v[t]))
            direct.apply(c);
        ASSERT_EQ(replay, direct);
    }
}

TEST(Bench, ReportShape)
{
    Fixture f;
    UCQ q = f.query("Q(x) :- E(x,y).");
    EXPECT_TRUE(bench(q, f.schema, EngineKind::dynamic, {}, 1, f.pool).empty());
    BenchOptions small{2, 100, 20, 2, 50};
    auto rows = bench(q, f.schema, EngineKind::dynamic, {16, 32}, 1, f.pool, small);
    const std::string csv = format_bench_csv(rows);
    EXPECT_EQ(csv.rfind("size,op,mean_steps,max_steps,mean_ns\n", 0), 0u);
    std::set<std::string> ops;
    for (const auto &r : rows)
        ops.insert(r.op);
    EXPECT_EQ(ops, (std::set<std::string>{"answer", "count", "delay", "test", "update"}));
    EXPECT_FALSE(format_bench_table(rows).empty());
}
