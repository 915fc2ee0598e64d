#pragma once

#include "dynq/query.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dynq {

/// Schema file: one `rel NAME/ARITY` per line.
Schema parse_schema(std::string_view text);

/** Query file: rules `Q(t1,...,tk) :- A1, ..., Ad.`; several rules form a union and must agree on arity.
 *
 * Lowercase identifiers are variables, integers and double-quoted strings are constants. Body variables that do not
 * occur in the head are existentially quantified. */
UCQ parse_query(std::string_view text, const Schema &schema, ConstantPool &pool);

/// A single `insert R(c1,...,cr)` / `delete R(c1,...,cr)` command.
UpdateCommand parse_update(std::string_view line, const Schema &schema, ConstantPool &pool);

/// One command per line; blank lines and `#` comments are skipped.
std::vector<UpdateCommand> parse_update_stream(std::string_view text, const Schema &schema, ConstantPool &pool);

/// A constant literal (integer, quoted string, or bare identifier).
Value parse_constant(std::string_view text, ConstantPool &pool);

std::string print_term(const CQ &q, const Term &t, const ConstantPool &pool);
std::string print_atom(const CQ &q, const Atom &a, const Schema &schema, const ConstantPool &pool);
/// A rule in the query-file grammar, terminated by `.`.
std::string print_cq(const CQ &q, const Schema &schema, const ConstantPool &pool, std::string_view head_name = "Q");
/// One rule per line. The empty query prints as a comment line.
std::string print_ucq(const UCQ &q, const Schema &schema, const ConstantPool &pool, std::string_view head_name = "Q");
std::string print_update(const UpdateCommand &cmd, const Schema &schema, const ConstantPool &pool);
/// `(c1,...,ck)`.
std::string print_tuple(std::span<const Value> t, const ConstantPool &pool);
std::string print_schema(const Schema &schema);

}
