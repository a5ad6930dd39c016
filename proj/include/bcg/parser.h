// Rule-file reader and canonical printer.
//
// Grammar (whitespace-insensitive, `%` starts a comment that runs to the end
// of the line):
//
//   clause := atom ":-" atom ("," atom)* "."
//   atom   := name "(" term ("," term)* ")"
//   term   := Variable | constant | "quoted constant"
//
// Variables start with an uppercase letter or '_'. Constants start with a
// lowercase letter or digit, or are double-quoted.
#ifndef BCG_PARSER_H_
#define BCG_PARSER_H_

#include <string>
#include <string_view>

#include "bcg/logic.h"

namespace bcg {

// Parses `text` into a fresh theory. Throws ParseError.
Theory parse_theory(std::string_view text);

// Appends the clauses in `text` to `theory`, sharing its symbol tables.
void parse_theory_into(std::string_view text, Theory& theory);

// Parses one atom such as `locatedIn(italy, europe)`; variables allowed.
Atom parse_atom(std::string_view text, SymbolTable& symbols);

std::string format_constant(std::string_view name);
std::string format_atom(const Atom& atom, const SymbolTable& symbols);
std::string format_clause(const HornClause& clause, const SymbolTable& symbols);
// One clause per line in rule_id order.
std::string format_theory(const Theory& theory);

}  // namespace bcg

#endif  // BCG_PARSER_H_
