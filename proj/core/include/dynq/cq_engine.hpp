#pragma once

#include "dynq/constant_rewrite.hpp"
#include "dynq/database.hpp"
#include "dynq/instrument.hpp"
#include "dynq/query.hpp"
#include "dynq/skip_set.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace dynq {

/** Dynamic index for one q-hierarchical CQ without constants whose head lists pairwise distinct variables.
 *
 * Variables are arranged in a forest where x is an ancestor of y iff atoms(y) is a subset of atoms(x); free
 * variables form the upper part. A trie keyed by values along forest paths stores, per slot, the number of
 * answer extensions below it, and links the slots with a nonzero count into a list in insertion order. Updates
 * touch one path, `count` reads one cached integer, `test` walks the free part of a path, and the free slots
 * form an odometer for enumeration. */
class CqEngine final : public SkipSet<Tuple>
{
  public:
    /// Throws `precondition_error` unless `q` is q-hierarchical, constant-free, and has a distinct-variable head.
    CqEngine(const CQ &q, const Schema &schema);
    CqEngine(const CqEngine &) = delete;
    CqEngine &operator=(const CqEngine &) = delete;
    ~CqEngine() override;

    /// Applies every tuple of `db` as an insertion.
    void load(const Database &db);
    /// Idempotent under set semantics. Relation ids refer to the constructor's schema.
    void update(const UpdateCommand &cmd);

    std::uint64_t count() const;
    bool answer() const { return count() > 0; }
    /// Throws `precondition_error` if `t` has the wrong arity.
    bool test(const Tuple &t) const;

    bool contains(const Tuple &t) const override { return test(t); }
    std::optional<Tuple> start() const override;
    /// Throws `precondition_error` if `t` is not a current answer.
    std::optional<Tuple> next(const Tuple &t) const override;
    std::uint64_t version() const override { return version_; }

    std::size_t arity() const { return arity_; }
    /// Cumulative elementary steps over all routines.
    std::uint64_t steps() const { return steps_; }
    EngineReport report() const;

  private:
    struct Slot;
    struct ChildSet;
    struct Node
    {
        VarId var = 0;
        bool free = false;
        std::ptrdiff_t parent = -1;
        std::size_t child_index = 0;  ///< position among the parent's children, or among the roots
        std::vector<std::size_t> children;
        std::uint64_t full_mask = 0;
        std::ptrdiff_t head_position = -1;
    };
    struct AtomPlan
    {
        std::vector<std::size_t> chain;  ///< forest nodes, root first
        std::vector<std::size_t> arg_of_depth;  ///< argument position supplying the value at each chain depth
        std::vector<std::pair<std::size_t, std::size_t>> equal_args;  ///< positions holding the same variable
        std::uint64_t bit = 0;
    };

    std::vector<Node> nodes_;
    std::vector<std::size_t> roots_;
    std::vector<std::size_t> free_order_;  ///< free nodes in preorder
    std::vector<std::ptrdiff_t> free_pos_;  ///< node to index in `free_order_`, or -1
    std::vector<AtomPlan> plans_;
    std::vector<std::vector<std::size_t>> plans_by_relation_;
    std::vector<std::size_t> nullary_atoms_;
    std::vector<bool> nullary_present_;
    std::size_t nullary_missing_ = 0;
    std::size_t arity_ = 0;

    std::vector<std::unique_ptr<ChildSet>> root_sets_;
    std::uint64_t total_ = 0;
    std::uint64_t version_ = 0;
    mutable std::uint64_t steps_ = 0;
    mutable OpStats update_stats_, count_stats_, test_stats_, start_stats_, next_stats_;

    ChildSet &set_for(std::size_t node, Slot *parent) const;
    void apply_atom(const AtomPlan &plan, UpdateKind kind, const Tuple &t);
    void recompute(Slot *s);
    void recompute_total();
    void set_weight(Slot *s, std::uint64_t w);
    Slot *first_live(std::size_t node, Slot *parent) const;
    bool locate(const Tuple &t, std::vector<Slot *> &chosen) const;
    Tuple emit(const std::vector<Slot *> &chosen) const;
};

/** A CQ with constants, repeated head variables, or self-joins, evaluated through its constant-free stripped
 * form. Answers are full-arity tuples of the source query. */
class CqEvaluator final : public SkipSet<Tuple>
{
  public:
    CqEvaluator(const CQ &q, const Schema &schema);

    void load(const Database &db);
    void update(const UpdateCommand &cmd);

    std::uint64_t count() const { return engine_->count(); }
    bool answer() const { return engine_->answer(); }
    bool test(const Tuple &t) const;

    bool contains(const Tuple &t) const override { return test(t); }
    std::optional<Tuple> start() const override;
    std::optional<Tuple> next(const Tuple &t) const override;
    std::uint64_t version() const override { return engine_->version(); }

    const StrippedQuery &stripped() const { return stripped_; }
    const CqEngine &engine() const { return *engine_; }
    std::uint64_t steps() const { return engine_->steps() + steps_; }

  private:
    StrippedQuery stripped_;
    std::unique_ptr<CqEngine> engine_;
    std::vector<UpdateCommand> scratch_;
    mutable std::uint64_t steps_ = 0;
};

}
