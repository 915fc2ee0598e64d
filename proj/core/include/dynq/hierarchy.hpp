#pragma once

#include "dynq/homomorphism.hpp"
#include "dynq/query.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace dynq {

/** A pair of variables that breaks one clause of a hierarchy definition.
 *
 * Clause 1 (nesting): `atoms` = {psi^x, psi^{x,y}, psi^y} with psi^x containing x but not y, psi^{x,y} both, psi^y
 * y but not x. Clause 2 (free above quantified): x is free, y quantified, `atoms` = {psi^{x,y}, psi^y}. */
struct HierarchyWitness
{
    int clause = 1;
    VarId x = 0;
    VarId y = 0;
    std::vector<std::size_t> atoms;
};

struct HierarchyCheck
{
    bool holds = true;
    std::optional<HierarchyWitness> witness;

    explicit operator bool() const { return holds; }
};

HierarchyCheck check_q_hierarchical(const CQ &q);
HierarchyCheck check_t_hierarchical(const CQ &q);
inline bool is_q_hierarchical(const CQ &q) { return check_q_hierarchical(q).holds; }
inline bool is_t_hierarchical(const CQ &q) { return check_t_hierarchical(q).holds; }
/// Every disjunct qualifies. The empty query qualifies vacuously.
bool is_q_hierarchical(const UCQ &q);
bool is_t_hierarchical(const UCQ &q);

/** Conjunction of variable-disjoint formulas sharing only head variables.
 *
 * `phi0` holds the atoms without quantified variables. Each component is read as a CQ whose head lists the
 * component's free variables in head order; `free` names the same variables by their ids in the source query. */
struct GeneralizedCQ
{
    struct Component
    {
        std::vector<VarId> free;
        CQ query;
    };

    CQ source;
    std::vector<Atom> phi0;
    std::vector<Component> components;
};

/// Decomposes a t-hierarchical CQ into a generalized CQ whose components are q-hierarchical.
/// Throws `precondition_error` otherwise.
GeneralizedCQ t_decompose(const CQ &q);

/// A CQ equivalent to the intersection of `q1` and `q2`, or `nullopt` when the heads force distinct constants to
/// coincide (the empty query).
std::optional<CQ> intersect(const CQ &q1, const CQ &q2);

struct ExhaustiveCheck
{
    bool holds = true;
    /// Zero-based disjunct indices of the first violating subset.
    std::vector<std::size_t> witness;
    std::optional<HierarchyWitness> core_witness;
    std::optional<CQ> witness_core;

    explicit operator bool() const { return holds; }
};

/// Subsets are visited in increasing bitmask order; intersections fold left in disjunct order.
ExhaustiveCheck check_exhaustively_q_hierarchical(const UCQ &q, std::size_t budget = default_hom_budget);
inline bool is_exhaustively_q_hierarchical(const UCQ &q, std::size_t budget = default_hom_budget)
{
    return check_exhaustively_q_hierarchical(q, budget).holds;
}

/// Classification of the homomorphic core of a UCQ.
struct ClassReport
{
    std::size_t disjuncts = 0;
    UCQ core;
    bool q_hierarchical = true;
    bool t_hierarchical = true;
    bool exhaustively_q_hierarchical = true;
    std::optional<std::pair<std::size_t, HierarchyWitness>> q_witness;  ///< (core disjunct, witness)
    std::optional<std::pair<std::size_t, HierarchyWitness>> t_witness;
    ExhaustiveCheck exhaustive;
};

ClassReport classify(const UCQ &q, std::size_t budget = default_hom_budget);

std::string describe_witness(const CQ &q, const HierarchyWitness &w, const Schema &schema, const ConstantPool &pool);
/// `key: value` lines.
std::string format_report(const ClassReport &r, const Schema &schema, const ConstantPool &pool);

}
