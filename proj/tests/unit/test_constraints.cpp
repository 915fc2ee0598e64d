#include "corpus.hpp"

#include <dynq/constraints.hpp>
#include <dynq/errors.hpp>
#include <dynq/hierarchy.hpp>
#include <dynq/homomorphism.hpp>
#include <dynq/workload.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace dynq;
using dynq::testing::Fixture;

TEST(ConstraintParser, AllKinds)
{
    Fixture f;
    ConstraintSet g = parse_constraints("sd S[1] {a,b,3}\n# note\nind R[1,2] <= E[2,1]\nfd E[1->2]\n", f.schema, f.pool);
    ASSERT_EQ(g.items.size(), 3u);
    ASSERT_EQ(g.small_domains().size(), 1u);
    EXPECT_EQ(g.small_domains()[0].allowed.size(), 3u);
    ASSERT_EQ(g.inclusion_deps().size(), 1u);
    EXPECT_EQ(g.inclusion_deps()[0].rhs_positions, (std::vector<std::size_t>{1, 0}));
    ASSERT_EQ(g.functional_deps().size(), 1u);
    EXPECT_EQ(g.functional_deps()[0].to, 1u);
    for (const Constraint &c : g.items) {
        const std::string line = print_constraint(c, f.schema, f.pool);
        ConstraintSet again = parse_constraints(line, f.schema, f.pool);
        EXPECT_EQ(print_constraint(again.items.at(0), f.schema, f.pool), line);
    }
    EXPECT_THROW(parse_constraints("sd S[2] {1}", f.schema, f.pool), schema_error);
    EXPECT_THROW(parse_constraints("sd Nope[1] {1}", f.schema, f.pool), schema_error);
    EXPECT_THROW(parse_constraints("ind E[1,2] <= S[1]", f.schema, f.pool), schema_error);
    EXPECT_THROW(parse_constraints("xd S[1] {1}", f.schema, f.pool), parse_error);
    EXPECT_THROW(parse_constraints("fd E[1-2]", f.schema, f.pool), parse_error);
    EXPECT_TRUE(parse_constraints("sd S[1] {}", f.schema, f.pool).small_domains()[0].allowed.empty());
}

TEST(Domains, Examples)
{
    Fixture f;
    CQ q = f.cq("Q() :- S(x), E(x,y), T(y).");
    DomainAssignment d = compute_domains(q, parse_constraints("sd S[1] {1,2,3}", f.schema, f.pool));
    ASSERT_TRUE(d.domain[0]);
    EXPECT_EQ(d.domain[0]->size(), 3u);
    EXPECT_FALSE(d.domain[1]);
    EXPECT_TRUE(compute_domains(q, {}).restricted_vars().empty());
    DomainAssignment e = compute_domains(q, parse_constraints("sd S[1] {1,2}\nsd E[1] {3}", f.schema, f.pool));
    EXPECT_TRUE(e.domain[0]->empty());
    EXPECT_TRUE(e.has_empty());
}

TEST(SdRewrite, QSetBecomesUnionOfQHierarchicalCqs)
{
    Fixture f;
    UCQ q = f.query("Q() :- S(x), E(x,y), T(y).");
    for (std::size_t c : {1u, 2u, 5u}) {
        std::string set;
        for (std::size_t i = 0; i < c; ++i)
            set += (i ? "," : "") + std::string("a") + std::to_string(i);
        UCQ r = sd_rewrite(q, parse_constraints("sd S[1] {" + set + "}", f.schema, f.pool));
        ASSERT_EQ(r.disjuncts.size(), c);
        for (const CQ &d : r.disjuncts) {
            EXPECT_TRUE(is_q_hierarchical(d));
            EXPECT_EQ(d.quantified().size(), 1u);
        }
        EXPECT_TRUE(is_q_hierarchical(r));
    }
}

TEST(SdRewrite, TrivialCases)
{
    Fixture f;
    UCQ q = f.query("Q(x) :- E(x,y).");
    UCQ same = sd_rewrite(q, parse_constraints("sd S[1] {1}", f.schema, f.pool));
    ASSERT_EQ(same.disjuncts.size(), 1u);
    EXPECT_EQ(same.disjuncts[0].body, q.disjuncts[0].body);
    EXPECT_TRUE(sd_rewrite(q, parse_constraints("sd E[2] {}", f.schema, f.pool)).is_empty_query());
    EXPECT_THROW(sd_rewrite(f.query("Q() :- E(x,y), F(z,w)."),
                            parse_constraints("sd E[1] {1,2,3}\nsd E[2] {1,2,3}\nsd F[1] {1,2,3}", f.schema, f.pool),
                            10),
                 budget_exceeded);
}

TEST(SdRewrite, HeadVariablesBecomeConstants)
{
    Fixture f;
    UCQ r = sd_rewrite(f.query("Q(x,y) :- E(x,y)."), parse_constraints("sd E[1] {1,2}", f.schema, f.pool));
    ASSERT_EQ(r.disjuncts.size(), 2u);
    EXPECT_TRUE(r.disjuncts[0].head[0].is_const());
    EXPECT_EQ(r.disjuncts[0].head[0].id, f.pool.intern_int(1));
    EXPECT_EQ(r.disjuncts[1].head[0].id, f.pool.intern_int(2));
}

TEST(SdRewrite, SemanticsOnSatisfyingDatabasesAndContainmentOnAll)
{
    Fixture f;
    const auto dom = int_domain(f.pool, 5);
    struct Case
    {
        UCQ q;
        ConstraintSet g;
        UCQ r;
    };
    std::vector<Case> cases;
    auto add = [&](const char *q, const char *g) {
        Case c{f.query(q), parse_constraints(g, f.schema, f.pool), {}};
        c.r = sd_rewrite(c.q, c.g);
        cases.push_back(std::move(c));
    };
    add("Q() :- S(x), E(x,y), T(y).", "sd S[1] {1,2}");
    add("Q(x,y) :- S(x), E(x,y), T(y).", "sd T[1] {2,3,4}");
    add("Q(x) :- E(x,y), T(y).", "sd E[2] {1,5}\nsd T[1] {5}");
    add("Q(x) :- S(x).\nQ(x) :- E(x,y), F(y,x).", "sd F[2] {1,2}");
    for (std::uint64_t seed = 0; seed < 300; ++seed) {
        for (const Case &c : cases) {
            Database sat = random_satisfying_db(f.schema, c.g, dom, 6, seed);
            ASSERT_TRUE(satisfies(sat, c.g));
            ASSERT_EQ(eval_naive(c.q, sat), eval_naive(c.r, sat));
            Database any = random_db(f.schema, dom, 6, seed);
            const TupleSet big = eval_naive(c.q, any);
            for (const Tuple &t : eval_naive(c.r, any))
                ASSERT_TRUE(big.contains(t));
        }
    }
}

TEST(SdRewrite, CorePreserved)
{
    Fixture f;
    for (const auto &entry : dynq::testing::corpus()) {
        UCQ core = core_of_ucq(f.query(entry.text));
        UCQ r = sd_rewrite(core, parse_constraints("sd S[1] {1,2}\nsd E[2] {1,2}", f.schema, f.pool));
        UCQ again = core_of_ucq(r);
        EXPECT_EQ(again.disjuncts.size(), r.disjuncts.size()) << entry.name;
        for (std::size_t i = 0; i < std::min(again.disjuncts.size(), r.disjuncts.size()); ++i)
            EXPECT_EQ(again.disjuncts[i].body.size(), r.disjuncts[i].body.size()) << entry.name;
    }
}

TEST(Ind, ChainExample)
{
    Fixture f;
    CQ q = f.cq("Q(x,y) :- E(x,y), E(y,z1), E(z1,z2).");
    ConstraintSet g = parse_constraints("ind E[2] <= E[1]", f.schema, f.pool);
    const InclusionDep d = g.inclusion_deps()[0];
    EXPECT_TRUE(ind_applicable(q, d, 1, 2));
    EXPECT_FALSE(ind_applicable(q, d, 2, 0));
    EXPECT_FALSE(ind_applicable(q, d, 1, 1));
    IndSimplification s = simplify_with_inds(q, g);
    EXPECT_EQ(s.steps.size(), 2u);
    EXPECT_TRUE(equivalent(s.query, f.cq("Q(x,y) :- E(x,y).")));
    EXPECT_THROW(apply_ind(q, d, 2, 0), precondition_error);
    EXPECT_THROW(ind_applicable(q, d, 0, 7), precondition_error);
}

TEST(Ind, QSetUnderEdgeIntoTarget)
{
    Fixture f;
    CQ q = f.cq("Q() :- S(x), E(x,y), T(y).");
    ConstraintSet g = parse_constraints("ind E[2] <= T[1]", f.schema, f.pool);
    CQ r = apply_ind(q, g.inclusion_deps()[0], 1, 2);
    EXPECT_TRUE(equivalent(r, f.cq("Q() :- S(x), E(x,y).")));
    EXPECT_TRUE(is_q_hierarchical(r));
}

TEST(Ind, RepeatedUnalignedVariable)
{
    Fixture f;
    CQ q = f.cq("Q(x) :- S(x), R(x,z,z).");
    ConstraintSet g = parse_constraints("ind S[1] <= R[1]", f.schema, f.pool);
    EXPECT_FALSE(ind_applicable(q, g.inclusion_deps()[0], 0, 1));
    CQ ok = f.cq("Q(x) :- S(x), R(x,z,w).");
    EXPECT_TRUE(ind_applicable(ok, g.inclusion_deps()[0], 0, 1));
}

TEST(Ind, LimitationQueryIsUnchanged)
{
    Fixture f;
    CQ q = f.cq("Q() :- S(x), E(x,y), T(y), F(z,w).");
    // F plays the role of the binary relation R in the limitation example.
    ConstraintSet g = parse_constraints("ind F[1,2] <= E[1,2]\nind F[1] <= S[1]\nind F[2] <= T[1]", f.schema, f.pool);
    IndSimplification s = simplify_with_inds(q, g);
    EXPECT_TRUE(s.steps.empty());
    EXPECT_EQ(s.query.body.size(), 4u);
}

TEST(Ind, SemanticsOnSatisfyingDatabasesAndHierarchyPreserved)
{
    Fixture f;
    const auto dom = int_domain(f.pool, 5);
    struct Case
    {
        CQ q;
        ConstraintSet g;
        CQ r;
    };
    std::vector<Case> cases;
    auto add = [&](const char *q, const char *g) {
        Case c{f.cq(q), parse_constraints(g, f.schema, f.pool), {}};
        c.r = simplify_with_inds(c.q, c.g).query;
        EXPECT_LT(c.r.body.size(), c.q.body.size()) << q;
        if (is_q_hierarchical(c.q))
            EXPECT_TRUE(is_q_hierarchical(c.r)) << q;
        cases.push_back(std::move(c));
    };
    add("Q(x,y) :- E(x,y), E(y,z1), E(z1,z2).", "ind E[2] <= E[1]");
    add("Q() :- S(x), E(x,y), T(y).", "ind E[2] <= T[1]");
    add("Q(x) :- S(x), E(x,y).", "ind S[1] <= E[1]");
    add("Q(x) :- E(x,y), F(y,z), T(y).", "ind T[1] <= F[1]");
    for (std::uint64_t seed = 0; seed < 500; ++seed)
        for (const Case &c : cases) {
            Database db = random_satisfying_db(f.schema, c.g, dom, 6, seed);
            ASSERT_TRUE(satisfies(db, c.g));
            ASSERT_EQ(eval_naive(c.q, db), eval_naive(c.r, db)) << seed;
        }
}

TEST(Guard, RejectsViolations)
{
    Fixture f;
    ConstraintGuard g(f.schema, parse_constraints("sd S[1] {1,2}\nind E[2] <= T[1]\nfd E[1->2]", f.schema, f.pool));
    auto u = [&](const char *s) { return parse_update(s, f.schema, f.pool); };
    EXPECT_TRUE(g.violation(u("insert S(3)")));
    EXPECT_FALSE(g.violation(u("insert S(1)")));
    EXPECT_TRUE(g.violation(u("insert E(1,2)")));
    g.apply(u("insert T(2)"));
    g.apply(u("insert E(1,2)"));
    EXPECT_TRUE(g.violation(u("insert E(1,3)")));
    EXPECT_TRUE(g.violation(u("delete T(2)")));
    EXPECT_THROW(g.apply(u("delete T(2)")), constraint_violation);
    g.apply(u("delete E(1,2)"));
    EXPECT_FALSE(g.violation(u("delete T(2)")));
    EXPECT_FALSE(g.violation(u("delete T(9)")));
}

TEST(Guard, SelfInclusion)
{
    Fixture f;
    ConstraintGuard g(f.schema, parse_constraints("ind E[2] <= E[1]", f.schema, f.pool));
    auto u = [&](const char *s) { return parse_update(s, f.schema, f.pool); };
    EXPECT_FALSE(g.violation(u("insert E(2,2)")));
    g.apply(u("insert E(2,2)"));
    g.apply(u("insert E(1,2)"));
    EXPECT_TRUE(g.violation(u("delete E(2,2)")));
    g.apply(u("insert E(2,1)"));
    EXPECT_FALSE(g.violation(u("delete E(2,2)")));
}

TEST(Guard, AgreesWithSatisfactionCheck)
{
    Fixture f;
    const auto dom = int_domain(f.pool, 4);
    ConstraintSet gamma =
        parse_constraints("sd S[1] {1,2,3}\nind E[2] <= T[1]\nind F[1,2] <= E[1,2]\nfd E[1->2]\nind E[2] <= E[1]",
                          f.schema, f.pool);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        ConstraintGuard g(f.schema, gamma);
        for (const UpdateCommand &cmd : random_stream(f.schema, dom, 400, seed)) {
            Database next = g.database();
            next.apply(cmd);
            const bool ok = satisfies(next, gamma);
            ASSERT_EQ(not g.violation(cmd).has_value(), ok);
            if (ok)
                g.apply(cmd);
        }
    }
}

TEST(FdQset, Examples)
{
    Fixture f;
    FdQsetEngine e(f.schema);
    auto u = [&](const char *s) { return parse_update(s, f.schema, f.pool); };
    e.update(u("insert S(1)"));
    e.update(u("insert E(1,2)"));
    e.update(u("insert T(2)"));
    EXPECT_TRUE(e.answer());
    EXPECT_EQ(e.m(), 1u);
    EXPECT_THROW(e.update(u("insert E(1,3)")), constraint_violation);
    e.update(u("delete T(2)"));
    EXPECT_FALSE(e.answer());
    EXPECT_EQ(e.m(), 0u);
    EXPECT_EQ(e.m_of(f.pool.intern_int(2)), 1u);
}

TEST(FdQset, MatchesOracle)
{
    Fixture f;
    FdQsetEngine e(f.schema);
    Database db(f.schema);
    UCQ q = f.query("Q() :- S(x), E(x,y), T(y).");
    const auto dom = int_domain(f.pool, 10);
    std::uint64_t worst = 0;
    for (const UpdateCommand &cmd : random_stream(f.schema, dom, 3000, 8)) {
        if (cmd.relation != f.schema.id_of("S") and cmd.relation != f.schema.id_of("E") and
            cmd.relation != f.schema.id_of("T"))
            continue;
        Database next = db;
        next.apply(cmd);
        const bool ok = satisfies(next, parse_constraints("fd E[1->2]", f.schema, f.pool));
        if (not ok) {
            EXPECT_THROW(e.update(cmd), constraint_violation);
            continue;
        }
        e.update(cmd);
        db = std::move(next);
        worst = std::max(worst, e.last_steps());
        ASSERT_EQ(e.answer(), not eval_naive(q, db).empty());
    }
    EXPECT_LE(worst, 3u);
}
