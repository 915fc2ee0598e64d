#include "corpus.hpp"
#include "oracles.hpp"

#include <dynq/errors.hpp>
#include <dynq/homomorphism.hpp>
#include <dynq/workload.hpp>

#include <gtest/gtest.h>

using namespace dynq;
using dynq::testing::Fixture;

TEST(Homomorphism, FoldsParallelEdges)
{
    Fixture f;
    CQ q = f.cq("Q() :- E(x,y), E(z,y).");
    CQ t = f.cq("Q() :- E(x,y).");
    auto h = find_homomorphism(q, t);
    ASSERT_TRUE(h);
    EXPECT_EQ(h->image[0], Term::var(0));
    EXPECT_EQ(h->image[1], Term::var(1));
    EXPECT_EQ(h->image[2], Term::var(0));
    EXPECT_TRUE(dynq::testing::brute_hom(q, t));
}

TEST(Homomorphism, IdentityAndAbsence)
{
    Fixture f;
    for (const auto &entry : dynq::testing::corpus())
        for (const CQ &q : f.query(entry.text).disjuncts)
            EXPECT_TRUE(find_homomorphism(q, q)) << entry.name;
    EXPECT_FALSE(find_homomorphism(f.cq("Q(x) :- S(x)."), f.cq("Q(x) :- T(x).")));
}

TEST(Homomorphism, HeadConstantsMustAgree)
{
    Fixture f;
    EXPECT_FALSE(find_homomorphism(f.cq("Q(x,3) :- S(x)."), f.cq("Q(x,5) :- S(x).")));
    EXPECT_TRUE(find_homomorphism(f.cq("Q(x,3) :- S(x)."), f.cq("Q(x,3) :- S(x), T(x).")));
}

TEST(Homomorphism, BudgetExhaustionIsDistinct)
{
    Fixture f;
    CQ clique = f.cq("Q() :- E(a,b), E(b,c), E(c,a), E(a,d), E(d,b), E(b,e), E(e,c).");
    CQ path = f.cq("Q() :- E(a,b), E(b,c), E(c,d), E(d,e), E(e,g), E(g,h), E(h,i), E(i,j).");
    EXPECT_THROW(find_homomorphism(clique, path, 5), budget_exceeded);
}

TEST(Homomorphism, AgreesWithBruteForceOnCorpusPairs)
{
    Fixture f;
    std::vector<CQ> all;
    for (const auto &entry : dynq::testing::corpus())
        for (const CQ &q : f.query(entry.text).disjuncts)
            all.push_back(q);
    for (const CQ &a : all)
        for (const CQ &b : all)
            if (a.arity() == b.arity())
                ASSERT_EQ(find_homomorphism(a, b).has_value(), dynq::testing::brute_hom(a, b))
                    << print_cq(a, f.schema, f.pool) << " -> " << print_cq(b, f.schema, f.pool);
}

TEST(Core, ExamplesAndBruteForceSize)
{
    Fixture f;
    EXPECT_EQ(core_of_cq(f.cq("Q() :- E(x,y), E(z,y).")).body.size(), 1u);
    EXPECT_EQ(core_of_cq(f.cq("Q(x) :- R(x,y,z).")).body.size(), 1u);
    EXPECT_EQ(core_of_cq(f.cq("Q(x,y) :- S(x), E(x,y), T(y).")).body.size(), 3u);
    EXPECT_EQ(core_of_cq(f.cq("Q(x) :- S(x), S(x).")).body.size(), 1u);
    for (const auto &entry : dynq::testing::corpus())
        for (const CQ &q : f.query(entry.text).disjuncts)
            EXPECT_EQ(core_of_cq(q).body.size(), dynq::testing::brute_core_size(q)) << entry.name;
}

TEST(Core, NeverOrphansHeadVariables)
{
    Fixture f;
    CQ q = f.cq("Q(x,z) :- E(x,y), E(z,y).");
    CQ c = core_of_cq(q);
    EXPECT_EQ(c.body.size(), 2u);
}

TEST(Core, IdempotentAndEquivalent)
{
    Fixture f;
    for (const auto &entry : dynq::testing::corpus())
        for (const CQ &q : f.query(entry.text).disjuncts) {
            CQ c = core_of_cq(q);
            CQ cc = core_of_cq(c);
            EXPECT_EQ(c.body.size(), cc.body.size()) << entry.name;
            EXPECT_TRUE(equivalent(c, cc)) << entry.name;
            EXPECT_TRUE(equivalent(c, q)) << entry.name;
        }
}

TEST(Core, PreservesSemanticsOnRandomDatabases)
{
    Fixture f;
    const auto dom = int_domain(f.pool, 5);
    std::vector<std::pair<UCQ, UCQ>> pairs;
    for (const auto &entry : dynq::testing::corpus()) {
        UCQ q = f.query(entry.text);
        pairs.emplace_back(q, core_of_ucq(q));
    }
    f.pool.intern_int(7);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        Database db = random_db(f.schema, dom, 6, seed);
        for (const auto &[q, c] : pairs)
            ASSERT_EQ(eval_naive(q, db), eval_naive(c, db)) << seed;
    }
}

TEST(CoreUcq, DropsSubsumedDisjuncts)
{
    Fixture f;
    UCQ q = core_of_ucq(f.query("Q(x) :- S(x).\nQ(x) :- S(x), T(x)."));
    ASSERT_EQ(q.disjuncts.size(), 1u);
    EXPECT_EQ(q.disjuncts[0].body.size(), 1u);
    EXPECT_EQ(core_of_ucq(f.query("Q(x) :- S(x).")).disjuncts.size(), 1u);
    EXPECT_EQ(core_of_ucq(f.query("Q(x,y) :- S(x), E(x,y).\nQ(x,y) :- E(x,y), T(y).")).disjuncts.size(), 2u);
    // equal disjuncts: exactly one survives
    EXPECT_EQ(core_of_ucq(f.query("Q(x) :- S(x).\nQ(y) :- S(y).")).disjuncts.size(), 1u);
}

TEST(Equivalence, Examples)
{
    Fixture f;
    EXPECT_TRUE(equivalent(f.query("Q(x,y) :- E(x,z), S(y)."), f.query("Q(a,b) :- S(b), E(a,c).")));
    EXPECT_FALSE(equivalent(f.query("Q(x,y) :- S(x), E(x,y), T(y)."), f.query("Q(x,y) :- E(x,y).")));
    EXPECT_TRUE(equivalent(f.query("Q() :- E(x,y), E(z,y)."), f.query("Q() :- E(x,y).")));
    EXPECT_THROW(equivalent(f.query("Q(x) :- S(x)."), f.query("Q() :- S(x).")), precondition_error);
}

TEST(Equivalence, ContainmentMatchesSampledSemantics)
{
    // contains(a, b) iff b(D) is a subset of a(D) on all D; the sampled direction can only refute.
    Fixture f;
    std::vector<CQ> all;
    for (const auto &entry : dynq::testing::corpus())
        for (const CQ &q : f.query(entry.text).disjuncts)
            all.push_back(q);
    const auto dom = int_domain(f.pool, 3);
    f.pool.intern_int(5);
    f.pool.intern_int(7);
    std::vector<Database> dbs;
    for (std::uint64_t seed = 0; seed < 300; ++seed)
        dbs.push_back(random_db(f.schema, dom, 3 + seed % 5, seed));
    for (const CQ &a : all)
        for (const CQ &b : all) {
            if (a.arity() != b.arity() or not contains(a, b))
                continue;
            for (const Database &db : dbs) {
                const TupleSet ra = eval_naive(a, db), rb = eval_naive(b, db);
                for (const Tuple &t : rb)
                    ASSERT_TRUE(ra.contains(t));
            }
        }
}
