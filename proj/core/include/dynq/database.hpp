#pragma once

#include "dynq/query.hpp"

#include <cstddef>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dynq {

using TupleSet = std::unordered_set<Tuple, TupleHash>;

/** A finite set of tuples per schema relation, with the active domain maintained incrementally.
 *
 * Updates follow set semantics: inserting a present tuple or deleting an absent one changes nothing. */
class Database
{
  public:
    Database() = default;
    explicit Database(Schema schema);

    const Schema &schema() const { return schema_; }

    /// Applies `cmd`; returns whether the database changed. Throws `schema_error` on arity mismatch.
    bool apply(const UpdateCommand &cmd);
    bool insert(RelId r, Tuple t) { return apply(UpdateCommand{UpdateKind::insert, r, std::move(t)}); }
    bool remove(RelId r, Tuple t) { return apply(UpdateCommand{UpdateKind::remove, r, std::move(t)}); }

    bool contains(RelId r, const Tuple &t) const { return relations_[r].contains(t); }
    const TupleSet &relation(RelId r) const { return relations_[r]; }

    /// |D|: total number of stored tuples.
    std::size_t cardinality() const { return cardinality_; }
    /// ||D||: schema size plus active domain plus the arity-weighted tuple count.
    std::size_t size() const;

    std::size_t active_domain_size() const { return adom_.size(); }
    bool in_active_domain(Value v) const { return adom_.contains(v); }
    /// Sorted copy of adom(D).
    std::vector<Value> active_domain() const;

    /// Every tuple as an insertion command, relation by relation.
    std::vector<UpdateCommand> as_insertions() const;

    friend bool operator==(const Database &a, const Database &b) { return a.relations_ == b.relations_; }

  private:
    Schema schema_;
    std::vector<TupleSet> relations_;
    std::unordered_map<Value, std::size_t> adom_;  ///< occurrence counts
    std::size_t cardinality_ = 0;
};

}
