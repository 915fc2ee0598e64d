#pragma once

#include "dynq/database.hpp"
#include "dynq/instrument.hpp"
#include "dynq/query.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace dynq {

/// R[i] ⊆ C. Positions are 0-based internally and 1-based in text.
struct SmallDomain
{
    RelId relation = 0;
    std::size_t position = 0;
    std::vector<Value> allowed;  ///< sorted, without repetition; may be empty
};

/// R[i1,...,im] ⊆ S[j1,...,jm].
struct InclusionDep
{
    RelId lhs = 0;
    std::vector<std::size_t> lhs_positions;
    RelId rhs = 0;
    std::vector<std::size_t> rhs_positions;
};

/// E[i -> j].
struct FunctionalDep
{
    RelId relation = 0;
    std::size_t from = 0;
    std::size_t to = 0;
};

using Constraint = std::variant<SmallDomain, InclusionDep, FunctionalDep>;

struct ConstraintSet
{
    std::vector<Constraint> items;

    std::vector<SmallDomain> small_domains() const;
    std::vector<InclusionDep> inclusion_deps() const;
    std::vector<FunctionalDep> functional_deps() const;
    bool empty() const { return items.empty(); }
};

/** One constraint per line: `sd R[1] {a,b,c}`, `ind R[1,2] <= S[2,3]`, `fd E[1->2]`. `#` starts a comment.
 *
 * Unknown relations and out-of-range positions raise `schema_error`; everything else malformed raises
 * `parse_error`. */
ConstraintSet parse_constraints(std::string_view text, const Schema &schema, ConstantPool &pool);
std::string print_constraint(const Constraint &c, const Schema &schema, const ConstantPool &pool);

/// Whether every constraint holds on `db`.
bool satisfies(const Database &db, const ConstraintSet &gamma);

/// Per-variable domain; `nullopt` is the unrestricted domain.
struct DomainAssignment
{
    std::vector<std::optional<std::vector<Value>>> domain;

    bool restricted(VarId v) const { return domain[v].has_value(); }
    std::vector<VarId> restricted_vars() const;
    /// Some restricted domain is empty, so the query has no answers on constraint-satisfying databases.
    bool has_empty() const;
};

DomainAssignment compute_domains(const CQ &q, const ConstraintSet &gamma);

/// q_alpha: substitutes `alpha[v]` for each assigned variable and drops the variables that vanish.
CQ substitute(const CQ &q, std::span<const std::optional<Value>> alpha);

inline constexpr std::size_t default_sd_cap = 1'000'000;

/** Replaces each disjunct by the union of its instantiations over the restricted domains, in lexicographic
 * order of (variable id, constant id). Only small-domain constraints are consulted. Throws `budget_exceeded`
 * once the result would exceed `cap` disjuncts. */
UCQ sd_rewrite(const UCQ &q, const ConstraintSet &gamma, std::size_t cap = default_sd_cap);

/// Whether `dep` lets atom `psi2` be dropped in favour of atom `psi1` (positions in `q.body`).
/// Throws `precondition_error` for positions outside the body.
bool ind_applicable(const CQ &q, const InclusionDep &dep, std::size_t psi1, std::size_t psi2);
/// Removes `psi2`. Throws `precondition_error` unless applicable.
CQ apply_ind(const CQ &q, const InclusionDep &dep, std::size_t psi1, std::size_t psi2);

struct IndStep
{
    std::size_t dependency = 0;  ///< index among `gamma.inclusion_deps()`
    std::size_t psi1 = 0;
    std::size_t psi2 = 0;
};

struct IndSimplification
{
    CQ query;
    std::vector<IndStep> steps;
};

/** Applies dependencies greedily until none applies, preferring the lowest (dependency, psi2, psi1).
 *
 * A heuristic: some constraint-equivalent simplifications are out of its reach. */
IndSimplification simplify_with_inds(const CQ &q, const ConstraintSet &gamma);
UCQ simplify_with_inds(const UCQ &q, const ConstraintSet &gamma);

/** Tracks a database and rejects updates whose result would violate a constraint.
 *
 * Check and apply are O(number of constraints) hash operations per update. */
class ConstraintGuard
{
  public:
    ConstraintGuard(const Schema &schema, ConstraintSet gamma);

    /// Reason the update would break a constraint, or nullopt if admissible.
    std::optional<std::string> violation(const UpdateCommand &cmd) const;
    /// Applies an admissible update; throws `constraint_violation` otherwise. Returns whether the database changed.
    bool apply(const UpdateCommand &cmd);

    const Database &database() const { return db_; }
    const ConstraintSet &constraints() const { return gamma_; }

  private:
    using Counter = std::unordered_map<Tuple, std::size_t, TupleHash>;

    ConstraintSet gamma_;
    std::vector<SmallDomain> sds_;
    std::vector<InclusionDep> inds_;
    std::vector<FunctionalDep> fds_;
    Database db_;
    std::vector<Counter> ind_lhs_;  ///< per IND: multiplicity of each lhs projection
    std::vector<Counter> ind_rhs_;
    std::vector<std::unordered_map<Value, std::pair<Value, std::size_t>>> fd_map_;  ///< key -> (image, multiplicity)
};

/// Draws from `domain` and repairs until every constraint holds. Values of small-domain columns come from C.
Database random_satisfying_db(const Schema &schema, const ConstraintSet &gamma, std::span<const Value> domain,
                              std::size_t tuples_per_relation, std::uint64_t seed);

/** Maintains the Boolean query  exists x, y: S(x), E(x,y), T(y)  under the dependency E[1 -> 2].
 *
 * m_b = |{a in S : (a,b) in E}| and m = sum of m_b over b in T. The dependency means an update changes at most one
 * m_b and one summand of m, so update and answer take constant steps. */
class FdQsetEngine
{
  public:
    FdQsetEngine(RelId s, RelId e, RelId t);
    /// Looks up relations named S, E, T.
    explicit FdQsetEngine(const Schema &schema);

    /// Throws `constraint_violation` if the update would give some a two E-successors. Returns whether D changed.
    bool update(const UpdateCommand &cmd);
    bool answer();

    std::uint64_t m() const { return m_; }
    std::uint64_t m_of(Value b) const;
    std::uint64_t last_steps() const { return last_steps_; }
    const EngineReport &report() const { return report_; }

  private:
    RelId s_, e_, t_;
    std::unordered_map<Value, bool> in_s_;
    std::unordered_map<Value, bool> in_t_;
    std::unordered_map<Value, Value> succ_;  ///< E as a partial function
    std::unordered_map<Value, std::uint64_t> m_b_;
    std::uint64_t m_ = 0;
    std::uint64_t last_steps_ = 0;
    EngineReport report_;

    void shift(Value b, std::int64_t delta);
};

}
