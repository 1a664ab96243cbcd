#pragma once

// Logic-program syntax tree shared by fact, rule, action, event and goal files.
//
// Terms are flat: constants, integers, variables and the anonymous `_`.
// There are no compound arguments, lists or operators in facts and rules;
// the action and event readers build on the generic clause reader in
// syntax.hpp instead.

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rescueplan/error.hpp"

namespace rescueplan {

enum class TermKind : std::uint8_t { constant, number, variable, anonymous };

// A term is identified by its printed form: quoting rules make the printed
// text unique per (kind, name), so equality and ordering compare it directly.
class Term {
 public:
  static Term constant(std::string name);
  static Term number(std::int64_t value);
  // Throws Error(invalid_argument) unless `name` is a legal variable name.
  static Term variable(std::string name);
  static Term anonymous();

  TermKind kind() const noexcept { return kind_; }
  bool is_ground() const noexcept {
    return kind_ == TermKind::constant || kind_ == TermKind::number;
  }
  bool is_variable() const noexcept { return kind_ == TermKind::variable; }
  bool is_anonymous() const noexcept { return kind_ == TermKind::anonymous; }

  // Constant or variable name (unquoted); decimal text for numbers.
  const std::string& name() const noexcept { return name_; }
  std::int64_t value() const noexcept { return value_; }
  const std::string& repr() const noexcept { return repr_; }

  friend bool operator==(const Term& a, const Term& b) noexcept {
    return a.repr_ == b.repr_;
  }
  friend std::strong_ordering operator<=>(const Term& a, const Term& b) noexcept {
    return a.repr_.compare(b.repr_) <=> 0;
  }

 private:
  Term(TermKind kind, std::string name, std::int64_t value, std::string repr)
      : kind_(kind), name_(std::move(name)), value_(value), repr_(std::move(repr)) {}

  TermKind kind_;
  std::string name_;
  std::int64_t value_ = 0;
  std::string repr_;
};

struct PredicateKey {
  std::string name;
  std::size_t arity = 0;

  std::string str() const;  // "fire/2"

  friend bool operator==(const PredicateKey&, const PredicateKey&) = default;
  friend std::strong_ordering operator<=>(const PredicateKey& a, const PredicateKey& b) {
    if (auto c = a.name.compare(b.name) <=> 0; c != 0) return c;
    return a.arity <=> b.arity;
  }
};

struct Atom {
  std::string predicate;
  std::vector<Term> args;

  PredicateKey key() const { return {predicate, args.size()}; }
  bool is_ground() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  // Canonical order: predicate, arity, then printed arguments.
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b);
};

struct Literal {
  Atom atom;
  bool negated = false;

  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Rule {
  Atom head;
  std::vector<Literal> body;
  SourceLocation where;  // not part of identity

  friend bool operator==(const Rule& a, const Rule& b) {
    return a.head == b.head && a.body == b.body;
  }
};

struct Program {
  std::vector<Rule> rules;
  std::vector<Atom> facts;

  friend bool operator==(const Program& a, const Program& b) {
    return a.rules == b.rules && a.facts == b.facts;
  }
};

// Variable bindings. Kept idempotent: no bound value mentions a bound variable.
class Substitution {
 public:
  Substitution() = default;

  const Term* lookup(const std::string& var) const;
  // Binds `var` and rewrites existing values that mention it. The caller
  // guarantees `var` is unbound and `value` is already resolved.
  void bind(const std::string& var, const Term& value);

  Term apply(const Term& t) const;
  Atom apply(const Atom& a) const;
  Literal apply(const Literal& l) const;

  bool empty() const noexcept { return bindings_.empty(); }
  std::size_t size() const noexcept { return bindings_.size(); }
  const std::map<std::string, Term>& bindings() const noexcept { return bindings_; }

  // Restricts to the given variable names.
  Substitution restricted(const std::set<std::string>& vars) const;

  std::string str() const;  // "X='Horr Sq.', Y=a"; "true" when empty

  friend bool operator==(const Substitution&, const Substitution&) = default;
  friend auto operator<=>(const Substitution& a, const Substitution& b) {
    return a.bindings_ <=> b.bindings_;
  }

 private:
  std::map<std::string, Term> bindings_;
};

// --- lexical helpers -------------------------------------------------------

bool is_identifier(std::string_view s);     // [a-z][A-Za-z0-9_]*
bool is_variable_name(std::string_view s);  // [A-Z][A-Za-z0-9_]* | _[A-Za-z0-9_]+
std::string quote_constant(std::string_view name);

// --- printing --------------------------------------------------------------

std::string to_string(const Term& t);
std::string to_string(const Atom& a);
std::string to_string(const Literal& l);
std::string to_string(const Rule& r);
std::string to_string(std::span<const Literal> body);  // "a(X), not b(X)"

// One clause per line: facts first, then rules, each terminated by ".\n".
std::string format_program(const Program& p);

// --- parsing ---------------------------------------------------------------

// Throws ParseError (syntax or safety) carrying source/line/column.
Program parse_program(std::string_view text, std::string_view source = "<input>");

// A comma-separated literal list, optionally terminated by '.'.
std::vector<Literal> parse_literals(std::string_view text, std::string_view source = "<query>");

// A single ground atom, optionally terminated by '.'.
Atom parse_fact(std::string_view text, std::string_view source = "<fact>");

// Throws ParseError(safety) if the rule violates range restriction.
void check_rule_safety(const Rule& rule);

std::set<std::string> variables_of(const Atom& a);
std::set<std::string> variables_of(std::span<const Literal> body);

// --- unification -----------------------------------------------------------

// Most general unifier of two atoms sharing one variable namespace.
// Anonymous arguments match anything without binding.
std::optional<Substitution> unify(const Atom& a, const Atom& b);

Atom apply_substitution(const Atom& a, const Substitution& s);

}  // namespace rescueplan
