#include "corpus.hpp"

#include <dynq/database.hpp>
#include <dynq/errors.hpp>
#include <dynq/parser.hpp>
#include <dynq/workload.hpp>

#include <gtest/gtest.h>

#include <random>
#include <set>

using namespace dynq;
using dynq::testing::Fixture;

TEST(Parser, BinaryQueryWithFreeVariables)
{
    Fixture f;
    CQ q = f.cq("Q(x,y) :- S(x), E(x,y), T(y).");
    EXPECT_EQ(q.arity(), 2u);
    EXPECT_EQ(q.body.size(), 3u);
    EXPECT_EQ(q.free_vars().size(), 2u);
    EXPECT_TRUE(q.quantified().empty());
}

TEST(Parser, BooleanQuery)
{
    Fixture f;
    CQ q = f.cq("Q() :- R(x,y,z).");
    EXPECT_TRUE(q.is_boolean());
    EXPECT_EQ(q.quantified().size(), 3u);
}

TEST(Parser, ConstantInAtom)
{
    Fixture f;
    CQ q = f.cq("Q(x) :- E(x,7).");
    ASSERT_TRUE(q.body[0].args[1].is_const());
    EXPECT_EQ(q.body[0].args[1].id, f.pool.intern_int(7));
    EXPECT_TRUE(q.has_constants());
}

TEST(Parser, MultipleRulesFormUnion)
{
    Fixture f;
    UCQ q = f.query("Q(x) :- S(x).\nQ(x) :- T(x).");
    EXPECT_EQ(q.arity, 1u);
    EXPECT_EQ(q.disjuncts.size(), 2u);
}

TEST(Parser, Errors)
{
    Fixture f;
    EXPECT_THROW(f.query("Q(x) :- S(x)"), parse_error);
    EXPECT_THROW(f.query("Q(x) :- Nope(x)."), parse_error);
    EXPECT_THROW(f.query("Q(x) :- E(x)."), schema_error);
    EXPECT_THROW(f.query("Q(y) :- S(x)."), schema_error);
    EXPECT_THROW(f.query("Q(x) :- S(x).\nQ(x,y) :- E(x,y)."), schema_error);
    EXPECT_THROW(f.query(""), parse_error);
    try {
        f.query("Q(x) :-\n  S(x) T(x).");
        FAIL();
    } catch (const parse_error &e) {
        EXPECT_NE(std::string(e.what()).find("2:"), std::string::npos) << e.what();
    }
}

TEST(Parser, Updates)
{
    Fixture f;
    UpdateCommand ins = parse_update("insert E(1,2)", f.schema, f.pool);
    EXPECT_EQ(ins.kind, UpdateKind::insert);
    EXPECT_EQ(ins.relation, f.schema.id_of("E"));
    EXPECT_EQ(ins.tuple, (Tuple{f.pool.intern_int(1), f.pool.intern_int(2)}));
    UpdateCommand del = parse_update("delete T(2)", f.schema, f.pool);
    EXPECT_EQ(del.kind, UpdateKind::remove);
    EXPECT_EQ(del.tuple, Tuple{f.pool.intern_int(2)});
    EXPECT_THROW(parse_update("insert E(1)", f.schema, f.pool), schema_error);
    EXPECT_THROW(parse_update("insert Nope(1)", f.schema, f.pool), schema_error);
    EXPECT_THROW(parse_update("insert E(1,2x)", f.schema, f.pool), parse_error);
    EXPECT_THROW(parse_update("upsert E(1,2)", f.schema, f.pool), parse_error);
    EXPECT_EQ(parse_update("insert B()", f.schema, f.pool).tuple.size(), 0u);
}

TEST(Parser, UpdateStreamSkipsCommentsAndBlankLines)
{
    Fixture f;
    auto cmds = parse_update_stream("# header\ninsert S(1)\n\n  \ndelete S(1)\n", f.schema, f.pool);
    ASSERT_EQ(cmds.size(), 2u);
    try {
        parse_update_stream("insert S(1)\ninsert S(\n", f.schema, f.pool);
        FAIL();
    } catch (const parse_error &e) {
        EXPECT_EQ(e.line(), 2u) << e.what();
    }
}

TEST(Parser, StringConstantsRoundTrip)
{
    Fixture f;
    UCQ q = f.query(R"(Q(x) :- E(x, "a b").)");
    const std::string printed = print_ucq(q, f.schema, f.pool);
    UCQ again = f.query(printed);
    EXPECT_EQ(again.disjuncts[0].body, q.disjuncts[0].body) << printed;
}

TEST(Parser, PrintParseRoundTripOnCorpus)
{
    for (const auto &entry : dynq::testing::corpus()) {
        Fixture f;
        UCQ q = f.query(entry.text);
        const std::string printed = print_ucq(q, f.schema, f.pool);
        UCQ again = f.query(printed);
        ASSERT_EQ(again.disjuncts.size(), q.disjuncts.size()) << entry.name;
        for (std::size_t i = 0; i < q.disjuncts.size(); ++i) {
            EXPECT_EQ(again.disjuncts[i].head, q.disjuncts[i].head) << entry.name;
            EXPECT_EQ(again.disjuncts[i].body, q.disjuncts[i].body) << entry.name;
            EXPECT_EQ(again.disjuncts[i].var_names, q.disjuncts[i].var_names) << entry.name;
        }
    }
}

TEST(QueryModel, FreeAndQuantifiedPartitionBodyVariables)
{
    for (const auto &entry : dynq::testing::corpus()) {
        Fixture f;
        for (const CQ &q : f.query(entry.text).disjuncts) {
            std::set<VarId> fr, qu, all;
            for (VarId v : q.free_vars())
                fr.insert(v);
            for (VarId v : q.quantified())
                qu.insert(v);
            for (const Atom &a : q.body)
                for (const Term &t : a.args)
                    if (t.is_var())
                        all.insert(t.id);
            std::set<VarId> uni = fr;
            uni.insert(qu.begin(), qu.end());
            EXPECT_EQ(uni, all) << entry.name;
            EXPECT_EQ(uni.size(), fr.size() + qu.size()) << entry.name;
        }
    }
}

TEST(QueryModel, AtomsOfIsPositional)
{
    Fixture f;
    CQ p = f.cq("Q(x,y) :- S(x), E(x,y), T(y).");
    EXPECT_EQ(p.atoms_of(0), (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(p.atoms_of(1), (std::vector<std::size_t>{1, 2}));
    CQ dup = f.cq("Q(x) :- S(x), S(x).");
    EXPECT_EQ(dup.atoms_of(0).size(), 2u);
    EXPECT_THROW(dup.atoms_of(9), std::out_of_range);
}

TEST(Database, SetSemanticsAndActiveDomain)
{
    Fixture f;
    Database db(f.schema);
    const RelId e = f.schema.id_of("E");
    const Value one = f.pool.intern_int(1), two = f.pool.intern_int(2);
    EXPECT_TRUE(db.insert(e, {one, two}));
    EXPECT_FALSE(db.insert(e, {one, two}));
    EXPECT_EQ(db.relation(e).size(), 1u);
    EXPECT_EQ(db.active_domain(), (std::vector<Value>{one, two}));
    EXPECT_TRUE(db.remove(e, {one, two}));
    EXPECT_FALSE(db.remove(e, {one, two}));
    EXPECT_EQ(db.active_domain_size(), 0u);
    EXPECT_THROW(db.insert(e, {one}), schema_error);
}

TEST(Database, ActiveDomainMatchesRecomputationAfterRandomStreams)
{
    Fixture f;
    const auto dom = int_domain(f.pool, 6);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Database db(f.schema);
        for (const UpdateCommand &cmd : random_stream(f.schema, dom, 300, seed)) {
            db.apply(cmd);
            std::set<Value> expected;
            for (RelId r = 0; r < f.schema.size(); ++r)
                for (const Tuple &t : db.relation(r))
                    expected.insert(t.begin(), t.end());
            ASSERT_EQ(db.active_domain(), std::vector<Value>(expected.begin(), expected.end()));
        }
    }
}
