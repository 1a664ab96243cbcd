#include "rescueplan/kb.hpp"
#include "rescueplan/syntax.hpp"

namespace rescueplan {

void check_rule_safety(const Rule& rule) {
  auto violation = [&](const std::string& msg) {
    throw ParseError(ErrorKind::safety, rule.where, msg + " in rule " + to_string(rule));
  };
  for (const Term& t : rule.head.args) {
    if (t.is_anonymous()) violation("anonymous variable '_' in rule head");
  }
  std::set<std::string> positive;
  for (const Literal& l : rule.body) {
    if (!l.negated) positive.merge(variables_of(l.atom));
  }
  for (const std::string& v : variables_of(rule.head)) {
    if (!positive.contains(v)) violation("head variable " + v + " does not occur in a positive body literal");
  }
  for (const Literal& l : rule.body) {
    if (!l.negated) continue;
    for (const std::string& v : variables_of(l.atom)) {
      if (!positive.contains(v)) {
        violation("variable " + v + " of negated literal does not occur in a positive body literal");
      }
    }
  }
}

Program parse_program(std::string_view text, std::string_view source) {
  Program program;
  for (const syntax::Clause& c : syntax::read_clauses(text, source)) {
    if (c.head.kind == syntax::Node::Kind::negation) syntax::fail(c.head, "clause head cannot be negated");
    Rule rule;
    rule.where = c.where;
    rule.head = syntax::to_atom(c.head);
    for (const syntax::Node& n : c.body) rule.body.push_back(syntax::to_literal(n));
    if (rule.body.empty() && rule.head.is_ground()) {
      program.facts.push_back(std::move(rule.head));
      continue;
    }
    check_rule_safety(rule);
    program.rules.push_back(std::move(rule));
  }
  return program;
}

std::vector<Literal> parse_literals(std::string_view text, std::string_view source) {
  std::vector<Literal> out;
  for (const syntax::Node& n : syntax::read_sequence(text, source)) {
    out.push_back(syntax::to_literal(n));
  }
  return out;
}

Atom parse_fact(std::string_view text, std::string_view source) {
  auto nodes = syntax::read_sequence(text, source);
  if (nodes.size() != 1) {
    throw ParseError(ErrorKind::syntax, {std::string(source), 1, 1}, "expected exactly one fact");
  }
  if (nodes.front().kind == syntax::Node::Kind::negation) {
    syntax::fail(nodes.front(), "a fact cannot be negated");
  }
  Atom a = syntax::to_atom(nodes.front());
  if (!a.is_ground()) syntax::fail(nodes.front(), "fact must be ground: " + to_string(a));
  return a;
}

}  // namespace rescueplan
