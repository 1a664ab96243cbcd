#pragma once

// Generic clause reader. Action, event and goal files use a slightly richer
// term language than facts and rules: nested compounds, `[...]` lists, and
// `name/arity` predicate indicators. This reader produces an untyped tree;
// the per-file readers convert it and report structural errors.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "rescueplan/error.hpp"
#include "rescueplan/kb.hpp"

namespace rescueplan::syntax {

struct Node {
  enum class Kind { constant, number, variable, anonymous, compound, list, negation, indicator };

  Kind kind = Kind::constant;
  std::string text;          // constant/variable name, functor, indicator name
  std::int64_t number = 0;   // number value, indicator arity
  bool quoted = false;       // constant written in quotes
  std::vector<Node> children;
  SourceLocation where;

  bool is_atomic_term() const {
    return kind == Kind::constant || kind == Kind::number || kind == Kind::variable ||
           kind == Kind::anonymous;
  }
};

struct Clause {
  Node head;
  std::vector<Node> body;  // empty for facts
  SourceLocation where;
};

std::vector<Clause> read_clauses(std::string_view text, std::string_view source);

// Comma-separated items up to end of input (optional trailing '.').
std::vector<Node> read_sequence(std::string_view text, std::string_view source);

// Conversions to the flat representation; throw ParseError(syntax).
Term to_term(const Node& n);
Atom to_atom(const Node& n);
Literal to_literal(const Node& n);

[[noreturn]] void fail(const Node& at, const std::string& message);

}  // namespace rescueplan::syntax
