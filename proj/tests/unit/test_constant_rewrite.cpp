#include "corpus.hpp"

#include <dynq/constant_rewrite.hpp>
#include <dynq/hierarchy.hpp>
#include <dynq/workload.hpp>

#include <gtest/gtest.h>

using namespace dynq;
using dynq::testing::Fixture;

TEST(Strip, SingleAtomWithConstant)
{
    Fixture f;
    StrippedQuery s = strip_constants(f.cq("Q(x) :- E(x,7)."), f.schema);
    EXPECT_EQ(s.hat_schema.size(), 1u);
    EXPECT_EQ(s.hat_schema[0].arity, 1u);
    EXPECT_FALSE(s.hat.has_constants());
    EXPECT_EQ(s.hat.arity(), 1u);
}

TEST(Strip, HeadConstantsAreRecorded)
{
    Fixture f;
    StrippedQuery s = strip_constants(f.cq("Q(x,5) :- S(x)."), f.schema);
    EXPECT_EQ(s.hat.arity(), 1u);
    ASSERT_EQ(s.head_layout.size(), 2u);
    EXPECT_FALSE(s.head_layout[0].is_constant);
    EXPECT_TRUE(s.head_layout[1].is_constant);
    EXPECT_EQ(s.head_layout[1].constant, f.pool.intern_int(5));
    const Value a = f.pool.intern_int(1);
    EXPECT_EQ(s.lift(Tuple{a}), (Tuple{a, f.pool.intern_int(5)}));
    EXPECT_EQ(s.lower(Tuple{a, f.pool.intern_int(5)}), Tuple{a});
    EXPECT_FALSE(s.lower(Tuple{a, f.pool.intern_int(6)}));
}

TEST(Strip, ConstantFreeQueryKeepsClass)
{
    Fixture f;
    for (const auto &entry : dynq::testing::corpus())
        for (const CQ &q : f.query(entry.text).disjuncts) {
            StrippedQuery s = strip_constants(q, f.schema);
            EXPECT_EQ(s.hat_schema.size(), q.body.size()) << entry.name;
            EXPECT_FALSE(s.hat.has_constants()) << entry.name;
            EXPECT_EQ(is_q_hierarchical(s.hat), is_q_hierarchical(q)) << entry.name;
            EXPECT_EQ(is_t_hierarchical(s.hat), is_t_hierarchical(q)) << entry.name;
        }
}

TEST(Translate, FiltersByConstantsAndEqualities)
{
    Fixture f;
    StrippedQuery s = strip_constants(f.cq("Q(x) :- E(x,7)."), f.schema);
    const RelId e = f.schema.id_of("E");
    const Value three = f.pool.intern_int(3);
    auto out = translate_update({UpdateKind::insert, e, {three, f.pool.intern_int(7)}}, s);
    ASSERT_EQ(out.size(), 1u);
    EXPECT_EQ(out[0].tuple, Tuple{three});
    EXPECT_TRUE(translate_update({UpdateKind::insert, e, {three, f.pool.intern_int(5)}}, s).empty());

    StrippedQuery loop = strip_constants(f.cq("Q() :- E(x,x)."), f.schema);
    EXPECT_TRUE(translate_update({UpdateKind::insert, e, {f.pool.intern_int(1), f.pool.intern_int(2)}}, loop).empty());
    const Value four = f.pool.intern_int(4);
    auto l = translate_update({UpdateKind::insert, e, {four, four}}, loop);
    ASSERT_EQ(l.size(), 1u);
    EXPECT_EQ(l[0].tuple, Tuple{four});
}

TEST(Translate, EndToEndCorrespondence)
{
    Fixture f;
    std::vector<std::pair<CQ, StrippedQuery>> cases;
    for (const auto &entry : dynq::testing::corpus())
        for (const CQ &q : f.query(entry.text).disjuncts)
            cases.emplace_back(q, strip_constants(q, f.schema));
    const auto dom = int_domain(f.pool, 7);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto stream = random_stream(f.schema, dom, 200, seed);
        for (auto &[q, s] : cases) {
            Database db(f.schema), hat(s.hat_schema);
            for (const UpdateCommand &cmd : stream) {
                db.apply(cmd);
                for (const UpdateCommand &h : translate_update(cmd, s))
                    hat.apply(h);
            }
            TupleSet lifted;
            for (const Tuple &t : eval_naive(s.hat, hat))
                lifted.insert(s.lift(t));
            ASSERT_EQ(eval_naive(q, db), lifted) << print_cq(q, f.schema, f.pool);
        }
    }
}

TEST(Translate, InsertThenDeleteRestoresHatDatabase)
{
    Fixture f;
    StrippedQuery s = strip_constants(f.cq("Q(x) :- E(x,y), E(y,7), S(x)."), f.schema);
    Database hat(s.hat_schema);
    const Database pristine = hat;
    const RelId e = f.schema.id_of("E");
    UpdateCommand ins{UpdateKind::insert, e, {f.pool.intern_int(7), f.pool.intern_int(7)}};
    UpdateCommand del = ins;
    del.kind = UpdateKind::remove;
    for (const auto &h : translate_update(ins, s))
        hat.apply(h);
    EXPECT_GT(hat.cardinality(), 0u);
    for (const auto &h : translate_update(del, s))
        hat.apply(h);
    EXPECT_EQ(hat, pristine);
}
