#include <cctype>

#include "rescueplan/kb.hpp"

namespace rescueplan {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

}  // namespace

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s) {
    if (!is_word_char(c)) return false;
  }
  return true;
}

bool is_variable_name(std::string_view s) {
  if (s.empty()) return false;
  if (s[0] == '_') {
    if (s.size() < 2) return false;
  } else if (!std::isupper(static_cast<unsigned char>(s[0]))) {
    return false;
  }
  for (char c : s) {
    if (!is_word_char(c)) return false;
  }
  return true;
}

std::string quote_constant(std::string_view name) {
  if (is_identifier(name)) return std::string(name);
  std::string out;
  out.reserve(name.size() + 2);
  out += '\'';
  for (char c : name) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '\'';
  return out;
}

Term Term::constant(std::string name) {
  std::string repr = quote_constant(name);
  return Term(TermKind::constant, std::move(name), 0, std::move(repr));
}

Term Term::number(std::int64_t value) {
  std::string text = std::to_string(value);
  return Term(TermKind::number, text, value, text);
}

Term Term::variable(std::string name) {
  if (!is_variable_name(name)) {
    throw Error(ErrorKind::invalid_argument, "not a variable name: " + name);
  }
  std::string repr = name;
  return Term(TermKind::variable, std::move(name), 0, std::move(repr));
}

Term Term::anonymous() { return Term(TermKind::anonymous, "_", 0, "_"); }

std::string PredicateKey::str() const { return name + '/' + std::to_string(arity); }

bool Atom::is_ground() const {
  for (const Term& t : args) {
    if (!t.is_ground()) return false;
  }
  return true;
}

std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
  if (auto c = a.predicate.compare(b.predicate) <=> 0; c != 0) return c;
  if (auto c = a.args.size() <=> b.args.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (auto c = a.args[i] <=> b.args[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

std::string to_string(const Term& t) { return t.repr(); }

std::string to_string(const Atom& a) {
  std::string out = a.predicate;
  if (a.args.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ',';
    out += a.args[i].repr();
  }
  out += ')';
  return out;
}

std::string to_string(const Literal& l) {
  return l.negated ? "not " + to_string(l.atom) : to_string(l.atom);
}

std::string to_string(std::span<const Literal> body) {
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) out += ", ";
    out += to_string(body[i]);
  }
  return out;
}

std::string to_string(const Rule& r) {
  std::string out = to_string(r.head);
  if (!r.body.empty()) {
    out += " :- ";
    out += to_string(std::span<const Literal>(r.body));
  }
  out += '.';
  return out;
}

std::string format_program(const Program& p) {
  std::string out;
  for (const Atom& f : p.facts) {
    out += to_string(f);
    out += ".\n";
  }
  for (const Rule& r : p.rules) {
    out += to_string(r);
    out += '\n';
  }
  return out;
}

std::set<std::string> variables_of(const Atom& a) {
  std::set<std::string> out;
  for (const Term& t : a.args) {
    if (t.is_variable()) out.insert(t.name());
  }
  return out;
}

std::set<std::string> variables_of(std::span<const Literal> body) {
  std::set<std::string> out;
  for (const Literal& l : body) {
    out.merge(variables_of(l.atom));
  }
  return out;
}

// --- Substitution ----------------------------------------------------------

const Term* Substitution::lookup(const std::string& var) const {
  auto it = bindings_.find(var);
  return it == bindings_.end() ? nullptr : &it->second;
}

void Substitution::bind(const std::string& var, const Term& value) {
  Term resolved = apply(value);
  if (resolved.is_variable() && resolved.name() == var) return;
  for (auto& [name, bound] : bindings_) {
    if (bound.is_variable() && bound.name() == var) bound = resolved;
  }
  bindings_.insert_or_assign(var, std::move(resolved));
}

Term Substitution::apply(const Term& t) const {
  if (t.is_variable()) {
    if (const Term* v = lookup(t.name())) return *v;
  }
  return t;
}

Atom Substitution::apply(const Atom& a) const {
  Atom out{a.predicate, {}};
  out.args.reserve(a.args.size());
  for (const Term& t : a.args) out.args.push_back(apply(t));
  return out;
}

Literal Substitution::apply(const Literal& l) const { return {apply(l.atom), l.negated}; }

Substitution Substitution::restricted(const std::set<std::string>& vars) const {
  Substitution out;
  for (const auto& [name, value] : bindings_) {
    if (vars.contains(name)) out.bindings_.emplace(name, value);
  }
  return out;
}

std::string Substitution::str() const {
  if (bindings_.empty()) return "true";
  std::string out;
  for (const auto& [name, value] : bindings_) {
    if (!out.empty()) out += ", ";
    out += name;
    out += '=';
    out += value.repr();
  }
  return out;
}

Atom apply_substitution(const Atom& a, const Substitution& s) { return s.apply(a); }

std::optional<Substitution> unify(const Atom& a, const Atom& b) {
  if (a.predicate != b.predicate || a.args.size() != b.args.size()) return std::nullopt;
  Substitution s;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    Term x = s.apply(a.args[i]);
    Term y = s.apply(b.args[i]);
    if (x.is_anonymous() || y.is_anonymous() || x == y) continue;
    if (x.is_variable()) {
      s.bind(x.name(), y);
    } else if (y.is_variable()) {
      s.bind(y.name(), x);
    } else {
      return std::nullopt;
    }
  }
  return s;
}

}  // namespace rescueplan
