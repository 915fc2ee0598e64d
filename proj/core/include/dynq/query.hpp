#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace dynq {

/// Interned constant identifier. Dense per `ConstantPool`.
using Value = std::uint32_t;
using Tuple = std::vector<Value>;
using RelId = std::uint32_t;
using VarId = std::uint32_t;

struct TupleHash
{
    std::size_t operator()(std::span<const Value> t) const noexcept
    {
        std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ t.size();
        for (Value v : t) {
            h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xff51afd7ed558ccdULL;
            h ^= h >> 33;
        }
        return static_cast<std::size_t>(h);
    }
    std::size_t operator()(const Tuple &t) const noexcept { return (*this)(std::span<const Value>(t)); }
};

struct Relation
{
    std::string name;
    std::size_t arity = 0;
};

/** A finite set of relation symbols with arities. Arity 0 is permitted. */
class Schema
{
  public:
    /// Adds a relation; throws `schema_error` if the name is taken.
    RelId add(std::string name, std::size_t arity);

    std::optional<RelId> find(std::string_view name) const;
    /// Like `find`, but throws `schema_error` for unknown names.
    RelId id_of(std::string_view name) const;

    const Relation &operator[](RelId id) const { return relations_[id]; }
    std::size_t size() const { return relations_.size(); }
    auto begin() const { return relations_.begin(); }
    auto end() const { return relations_.end(); }

  private:
    std::vector<Relation> relations_;
    std::unordered_map<std::string, RelId> by_name_;
};

/** Bijection between surface literals (integers, strings) and dense `Value` ids within one session.
 *
 * Ordering of constants is interning order. Fresh constants are never reachable from a literal. */
class ConstantPool
{
  public:
    Value intern_int(std::int64_t literal);
    Value intern_string(std::string_view literal);
    /// A new constant distinct from every literal, rendered with `label`.
    Value fresh(std::string label);

    std::optional<Value> lookup_int(std::int64_t literal) const;
    std::optional<Value> lookup_string(std::string_view literal) const;

    /// Surface form: integers in decimal, strings double-quoted.
    std::string render(Value v) const;
    std::size_t size() const { return entries_.size(); }

  private:
    enum class Kind : std::uint8_t { integer, string, fresh };
    struct Entry
    {
        Kind kind;
        std::string text;
    };
    std::vector<Entry> entries_;
    std::unordered_map<std::int64_t, Value> ints_;
    std::unordered_map<std::string, Value> strings_;
};

struct Term
{
    enum class Kind : std::uint8_t { variable, constant };

    Kind kind = Kind::variable;
    std::uint32_t id = 0;

    static Term var(VarId v) { return {Kind::variable, v}; }
    static Term constant(Value c) { return {Kind::constant, c}; }

    bool is_var() const { return kind == Kind::variable; }
    bool is_const() const { return kind == Kind::constant; }

    auto operator<=>(const Term &) const = default;
};

struct Atom
{
    RelId relation = 0;
    std::vector<Term> args;

    bool operator==(const Atom &) const = default;
};

/** A k-ary conjunctive query `{ (u1,...,uk) : exists quantified. A1 and ... and Ad }`.
 *
 * Variables are local ids into `var_names`. Free variables are exactly those occurring in the head; every other
 * body variable is quantified. Atoms are identified by position, so duplicate literals are distinct atoms. */
struct CQ
{
    std::vector<std::string> var_names;
    std::vector<Term> head;
    std::vector<Atom> body;

    std::size_t arity() const { return head.size(); }
    std::size_t num_vars() const { return var_names.size(); }
    bool is_boolean() const { return head.empty(); }

    bool is_free(VarId v) const;
    std::vector<VarId> free_vars() const;
    std::vector<VarId> quantified() const;
    /// Variables of atom `i`, sorted and without repetition.
    std::vector<VarId> vars_of(std::size_t atom) const;
    /// Positions of the body atoms containing `v`. Throws `std::out_of_range` for unknown variables.
    std::vector<std::size_t> atoms_of(VarId v) const;
    std::vector<Value> constants() const;
    bool has_constants() const;
    bool quantifier_free() const { return quantified().empty(); }

    /// Copy with unused variables dropped and the rest renumbered in id order.
    CQ compact() const;
    /// Copy with variables renumbered by first occurrence (head first, then body).
    CQ canonical() const;

    /// Checks arities, head-variable coverage, and a nonempty body.
    void validate(const Schema &schema) const;
};

/** A k-ary union of conjunctive queries. An empty disjunct list denotes the empty query. */
struct UCQ
{
    std::size_t arity = 0;
    std::vector<CQ> disjuncts;

    bool is_empty_query() const { return disjuncts.empty(); }
    static UCQ empty(std::size_t arity) { return UCQ{arity, {}}; }
    static UCQ of(CQ q)
    {
        UCQ u;
        u.arity = q.arity();
        u.disjuncts.push_back(std::move(q));
        return u;
    }
};

enum class UpdateKind : std::uint8_t { insert, remove };

struct UpdateCommand
{
    UpdateKind kind = UpdateKind::insert;
    RelId relation = 0;
    Tuple tuple;

    bool operator==(const UpdateCommand &) const = default;
};

}
