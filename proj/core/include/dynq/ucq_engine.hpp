#pragma once

#include "dynq/cq_engine.hpp"
#include "dynq/database.hpp"
#include "dynq/hierarchy.hpp"
#include "dynq/union_enumerator.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

namespace dynq {

/** Membership testing for a union of t-hierarchical CQs.
 *
 * Each disjunct is split into a quantifier-free part, checked by direct lookups in a mirror of the database, and
 * q-hierarchical components, each tested on the projection of the input tuple. */
class UcqTestEngine
{
  public:
    /// Throws `precondition_error` unless every disjunct is t-hierarchical.
    UcqTestEngine(const UCQ &q, const Schema &schema);

    void load(const Database &db);
    void update(const UpdateCommand &cmd);
    /// Throws `precondition_error` on arity mismatch.
    bool test(const Tuple &t) const;

    std::size_t arity() const { return arity_; }
    std::uint64_t steps() const;

  private:
    struct Component
    {
        std::vector<VarId> free;
        std::unique_ptr<CqEvaluator> engine;
    };
    struct Disjunct
    {
        CQ source;
        std::vector<Atom> phi0;
        std::vector<Component> components;
    };

    std::size_t arity_ = 0;
    Database mirror_;
    std::vector<Disjunct> disjuncts_;
    mutable std::uint64_t steps_ = 0;
    mutable std::vector<std::optional<Value>> binding_;
    mutable Tuple scratch_;

    bool test_disjunct(const Disjunct &d, const Tuple &t) const;
};

/// Enumeration, testing and Boolean answering for a union of q-hierarchical CQs.
class UcqEnumEngine
{
  public:
    /// Throws `precondition_error` unless every disjunct is q-hierarchical.
    UcqEnumEngine(const UCQ &q, const Schema &schema);

    void load(const Database &db);
    void update(const UpdateCommand &cmd);
    bool test(const Tuple &t) const;
    /// Whether some disjunct has a nonempty result.
    bool answer() const;

    /// A fresh union enumeration over the current state.
    UnionEnumerator<Tuple, TupleHash> enumerator() const;
    void enumerate(const std::function<void(const Tuple &)> &emit) const;

    std::size_t arity() const { return arity_; }
    const std::vector<std::unique_ptr<CqEvaluator>> &disjuncts() const { return disjuncts_; }
    std::uint64_t steps() const;

  private:
    std::size_t arity_ = 0;
    std::vector<std::unique_ptr<CqEvaluator>> disjuncts_;
    mutable std::uint64_t steps_ = 0;
};

/** Counting for an exhaustively q-hierarchical union by inclusion-exclusion over the cores of all subset
 * intersections. The signed sum is cached and refreshed after every update. */
class UcqCountEngine
{
  public:
    /// Throws `precondition_error` unless `q` is exhaustively q-hierarchical.
    UcqCountEngine(const UCQ &q, const Schema &schema, std::size_t budget = default_hom_budget);

    void load(const Database &db);
    void update(const UpdateCommand &cmd);
    std::uint64_t count() const;

    /// Number of sub-engines (intersections that are not the empty query).
    std::size_t sub_engines() const;
    std::uint64_t steps() const;

  private:
    struct Summand
    {
        int sign = 1;
        std::vector<std::size_t> subset;
        std::unique_ptr<CqEvaluator> engine;  ///< null for the empty query
    };

    std::vector<Summand> terms_;
    std::int64_t total_ = 0;
    mutable std::uint64_t steps_ = 0;

    void refresh();
};

}
