#pragma once

#include "dynq/query.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace dynq {

/// How one source atom `S(w1,...,ws)` feeds its private relation `R_psi(vbar)`.
struct AtomSpec
{
    static constexpr std::size_t none = ~std::size_t{0};

    RelId source_relation = 0;
    RelId hat_relation = 0;
    /// Distinct variables of the atom in first-occurrence order.
    std::vector<VarId> vbar;
    /// Per source position: the constant required there, if any.
    std::vector<std::optional<Value>> constant_at;
    /// Per source position: index into `vbar`, or `none` for constants.
    std::vector<std::size_t> slot;

    /// The `R_psi` tuple matching `t`, if `t` agrees with the constant and equal-variable positions.
    bool project(std::span<const Value> t, Tuple &out) const;
};

/// One output position of the source head.
struct HeadSlot
{
    bool is_constant = false;
    Value constant = 0;
    std::size_t index = 0;  ///< position in the stripped head when not a constant
};

/** A constant-free CQ over one fresh relation per atom, equivalent to the source up to re-attaching head constants
 * and duplicating repeated head variables. */
struct StrippedQuery
{
    Schema hat_schema;
    CQ hat;
    std::vector<AtomSpec> atoms;
    std::vector<HeadSlot> head_layout;
    /// Source relation id to the atoms over it.
    std::vector<std::vector<std::size_t>> atoms_by_relation;

    /// Source-arity answer tuple for a stripped answer tuple.
    Tuple lift(std::span<const Value> hat_tuple) const;
    void lift(std::span<const Value> hat_tuple, Tuple &out) const;
    /// The stripped tuple corresponding to `t`, or `nullopt` if head constants or repeated variables disagree.
    std::optional<Tuple> lower(std::span<const Value> t) const;
};

/// `source` is the schema `q` is written over; relation ids of updates refer to it.
StrippedQuery strip_constants(const CQ &q, const Schema &source);

/// Commands over the stripped schema induced by one source command; at most one per atom.
std::vector<UpdateCommand> translate_update(const UpdateCommand &cmd, const StrippedQuery &spec);
/// Allocation-reusing variant; `out` is overwritten.
void translate_update(const UpdateCommand &cmd, const StrippedQuery &spec, std::vector<UpdateCommand> &out);

}
