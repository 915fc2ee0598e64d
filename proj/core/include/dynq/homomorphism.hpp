#pragma once

#include "dynq/query.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace dynq {

inline constexpr std::size_t default_hom_budget = 10'000'000;

/// Image of every variable of the source query. Constants are implicitly fixed.
struct VarMapping
{
    std::vector<Term> image;

    Term operator()(const Term &t) const { return t.is_var() ? image[t.id] : t; }
};

/** Searches for a homomorphism `from -> to` that maps head position i of `from` onto head position i of `to`.
 *
 * Returns `nullopt` when none exists. Throws `budget_exceeded` once `budget` search nodes have been expanded, so
 * exhaustion is never confused with absence. */
std::optional<VarMapping> find_homomorphism(const CQ &from, const CQ &to, std::size_t budget = default_hom_budget);

/// True iff q2(D) is a subset of q1(D) on every database, i.e. a homomorphism q1 -> q2 exists.
bool contains(const CQ &q1, const CQ &q2, std::size_t budget = default_hom_budget);

/// Drops repeated identical atoms, keeping the first occurrence.
CQ remove_duplicate_atoms(const CQ &q);

/// A homomorphic core of `q`: an equivalent subquery with the same head that admits no homomorphism into a proper
/// subquery. Unused variables are compacted away.
CQ core_of_cq(const CQ &q, std::size_t budget = default_hom_budget);

/// Cores every disjunct, then drops each disjunct into which another retained disjunct maps.
UCQ core_of_ucq(const UCQ &q, std::size_t budget = default_hom_budget);

/// Semantic equivalence of two unions of equal arity.
bool equivalent(const UCQ &q1, const UCQ &q2, std::size_t budget = default_hom_budget);
bool equivalent(const CQ &q1, const CQ &q2, std::size_t budget = default_hom_budget);

}
