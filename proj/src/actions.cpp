#include "rescueplan/actions.hpp"

#include <algorithm>
#include <map>

#include "rescueplan/syntax.hpp"

namespace rescueplan {

std::vector<Literal> ActionSchema::conditions() const {
  std::vector<Literal> out = agent_guard;
  out.insert(out.end(), preconditions.begin(), preconditions.end());
  return out;
}

std::string to_string(const GroundAction& a) { return to_string(a.head()); }

namespace {

using syntax::Node;

[[noreturn]] void schema_error(ErrorKind kind, const SourceLocation& where, const std::string& msg) {
  throw ParseError(kind, where, msg);
}

std::vector<Literal> literal_list(const Node& n, std::string_view what) {
  if (n.kind != Node::Kind::list) syntax::fail(n, std::string(what) + " must be a [...] list");
  std::vector<Literal> out;
  for (const Node& item : n.children) out.push_back(syntax::to_literal(item));
  return out;
}

std::vector<Effect> effect_list(const Node& n) {
  if (n.kind != Node::Kind::list) syntax::fail(n, "effects must be a [...] list");
  std::vector<Effect> out;
  for (const Node& item : n.children) {
    if (item.kind != Node::Kind::compound || (item.text != "add" && item.text != "del") ||
        item.children.size() != 1) {
      syntax::fail(item, "effect must be add(Atom) or del(Atom)");
    }
    out.push_back({item.text == "add", syntax::to_atom(item.children[0])});
  }
  return out;
}

// Positive-literal variables of the schema conditions.
std::set<std::string> positive_vars(std::span<const Literal> conds) {
  std::set<std::string> out;
  for (const Literal& l : conds) {
    if (!l.negated) out.merge(variables_of(l.atom));
  }
  return out;
}

std::set<std::string> free_head_vars(const ActionSchema& s) {
  std::set<std::string> out = variables_of(s.head);
  auto conds = s.conditions();
  for (const std::string& v : positive_vars(conds)) out.erase(v);
  return out;
}

void check_schema(const ActionSchema& s, const std::set<PredicateKey>& fluents,
                  const std::set<PredicateKey>& derived) {
  std::set<std::string> head_vars;
  for (const Term& t : s.head.args) {
    if (!t.is_variable()) schema_error(ErrorKind::syntax, s.where, "action parameters must be variables: " + to_string(s.head));
    if (!head_vars.insert(t.name()).second) {
      schema_error(ErrorKind::syntax, s.where, "repeated action parameter " + t.name() + " in " + to_string(s.head));
    }
  }
  auto conds = s.conditions();
  std::set<std::string> bound = free_head_vars(s);
  for (const Literal& l : conds) {
    if (l.negated) {
      for (const std::string& v : variables_of(l.atom)) {
        if (!bound.contains(v)) {
          schema_error(ErrorKind::safety, s.where,
                       "variable " + v + " in '" + to_string(l) + "' of action " + s.name() +
                           " is not bound by a parameter or a positive literal to its left");
        }
      }
    } else {
      bound.merge(variables_of(l.atom));
    }
  }
  std::set<std::string> available = head_vars;
  available.merge(positive_vars(conds));
  for (const Effect& e : s.effects) {
    for (const Term& t : e.atom.args) {
      if (t.is_anonymous() || (t.is_variable() && !available.contains(t.name()))) {
        schema_error(ErrorKind::unbound_effect_variable, s.where,
                     "effect " + to_string(e.atom) + " of action " + s.name() + " uses unbound variable " + t.repr());
      }
    }
    PredicateKey k = e.atom.key();
    if (derived.contains(k)) {
      schema_error(ErrorKind::effect_on_derived_predicate, s.where,
                   "action " + s.name() + " changes derived predicate " + k.str());
    }
    if (!fluents.contains(k)) {
      schema_error(ErrorKind::effect_on_static_predicate, s.where,
                   "action " + s.name() + " changes " + k.str() + ", which is not declared fluent");
    }
  }
}

}  // namespace

ActionDomain parse_domain(std::string_view text, std::string_view source, std::span<const Rule> known_rules) {
  ActionDomain domain;
  for (const syntax::Clause& c : syntax::read_clauses(text, source)) {
    const Node& h = c.head;
    if (c.body.empty() && h.kind == Node::Kind::compound && h.text == "fluent") {
      for (const Node& ind : h.children) {
        if (ind.kind != Node::Kind::indicator) syntax::fail(ind, "fluent/1 expects name/arity");
        domain.fluents.insert({ind.text, static_cast<std::size_t>(ind.number)});
      }
      continue;
    }
    if (c.body.empty() && h.kind == Node::Kind::compound && h.text == "action") {
      if (h.children.size() != 4) syntax::fail(h, "action/4 expects (Head, [Guard], [Preconditions], [Effects])");
      ActionSchema s;
      s.where = c.where;
      s.head = syntax::to_atom(h.children[0]);
      s.agent_guard = literal_list(h.children[1], "agent guard");
      s.preconditions = literal_list(h.children[2], "preconditions");
      s.effects = effect_list(h.children[3]);
      domain.schemas.push_back(std::move(s));
      continue;
    }
    if (h.kind == Node::Kind::negation) syntax::fail(h, "clause head cannot be negated");
    Rule r;
    r.where = c.where;
    r.head = syntax::to_atom(h);
    for (const Node& n : c.body) r.body.push_back(syntax::to_literal(n));
    if (r.body.empty()) {
      syntax::fail(h, "facts do not belong in an actions file: " + to_string(r.head));
    }
    check_rule_safety(r);
    domain.rules.push_back(std::move(r));
  }

  std::set<PredicateKey> derived;
  for (const Rule& r : known_rules) derived.insert(r.head.key());
  for (const Rule& r : domain.rules) derived.insert(r.head.key());
  for (const PredicateKey& k : domain.fluents) {
    if (derived.contains(k)) {
      throw Error(ErrorKind::invalid_domain, "predicate " + k.str() + " is declared fluent but defined by rules");
    }
  }
  std::set<std::string> names;
  for (const ActionSchema& s : domain.schemas) {
    if (!names.insert(s.name()).second) {
      schema_error(ErrorKind::invalid_domain, s.where, "duplicate action schema " + s.name());
    }
    check_schema(s, domain.fluents, derived);
  }
  return domain;
}

std::vector<ActionSchema> parse_actions(std::string_view text, std::string_view source,
                                        std::span<const Rule> known_rules) {
  return parse_domain(text, source, known_rules).schemas;
}

namespace {

GroundAction build(const ActionSchema& s, const Substitution& subst) {
  GroundAction a;
  a.schema = s.name();
  for (const Term& t : s.head.args) a.args.push_back(subst.apply(t));
  for (const Effect& e : s.effects) {
    Atom g = subst.apply(e.atom);
    auto& list = e.add ? a.add : a.del;
    if (std::find(list.begin(), list.end(), g) == list.end()) list.push_back(std::move(g));
  }
  // Delete-then-add: an atom in both lists ends up present.
  std::erase_if(a.del, [&](const Atom& d) { return std::find(a.add.begin(), a.add.end(), d) != a.add.end(); });
  return a;
}

}  // namespace

std::vector<GroundAction> ground_applicable(const FactSet& state, const DerivedModel& model,
                                            std::span<const ActionSchema> schemas) {
  FactView view(state, model.derived);
  std::vector<GroundAction> out;
  std::vector<Term> universe;
  bool have_universe = false;
  for (const ActionSchema& s : schemas) {
    std::vector<Literal> conds = s.conditions();
    std::set<std::string> free_set = free_head_vars(s);
    std::vector<std::string> free(free_set.begin(), free_set.end());
    if (!free.empty() && !have_universe) {
      universe = view.constants();
      have_universe = true;
    }
    std::map<std::vector<Term>, GroundAction> found;
    // Odometer over the constant universe for parameters no positive literal binds.
    std::vector<std::size_t> digit(free.size(), 0);
    if (!free.empty() && universe.empty()) continue;
    for (;;) {
      Substitution initial;
      for (std::size_t i = 0; i < free.size(); ++i) initial.bind(free[i], universe[digit[i]]);
      for (const Substitution& ans : view.query(conds, initial).answers) {
        GroundAction a = build(s, ans);
        found.try_emplace(a.args, std::move(a));
      }
      std::size_t i = 0;
      while (i < digit.size() && ++digit[i] == universe.size()) digit[i++] = 0;
      if (i == digit.size()) break;
    }
    for (auto& [args, a] : found) out.push_back(std::move(a));
  }
  return out;
}

std::optional<GroundAction> instantiate(const ActionSchema& schema, std::span<const Term> args, const FactView& view,
                                        std::string* why) {
  if (args.size() != schema.head.args.size()) {
    if (why) *why = "action " + schema.name() + " expects " + std::to_string(schema.head.args.size()) + " arguments";
    return std::nullopt;
  }
  Substitution initial;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (!args[i].is_ground()) {
      if (why) *why = "action arguments must be ground";
      return std::nullopt;
    }
    initial.bind(schema.head.args[i].name(), args[i]);
  }
  std::vector<Literal> conds = schema.conditions();
  QueryResult r = view.query(conds, initial);
  if (r.holds()) return build(schema, r.answers.front());
  if (why) {
    std::size_t k = view.satisfiable_prefix(conds, initial);
    const Literal& bad = conds[k];
    *why = std::string(k < schema.agent_guard.size() ? "agent guard " : "precondition ") +
           (bad.negated ? "not " : "") + bad.atom.predicate + " failed";
  }
  return std::nullopt;
}

FactSet apply_action(const FactSet& state, const GroundAction& a) {
  FactSet next = state;
  for (const Atom& d : a.del) next.erase(d);
  for (const Atom& x : a.add) next.insert(x);
  return next;
}

PlanValidation validate_plan(const FactSet& initial, const RuleProgram& rules, std::span<const ActionSchema> schemas,
                             std::span<const GroundAction> plan, std::span<const Literal> goal) {
  FactSet state = initial;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const GroundAction& step = plan[i];
    auto it = std::find_if(schemas.begin(), schemas.end(), [&](const ActionSchema& s) {
      return s.name() == step.schema && s.head.args.size() == step.args.size();
    });
    if (it == schemas.end()) {
      return PlanValidation::invalid_at(i, "unknown action " + step.schema + "/" + std::to_string(step.args.size()));
    }
    DerivedModel model = rules.evaluate(state);
    FactView view(state, model.derived);
    std::string why;
    auto ground = instantiate(*it, step.args, view, &why);
    if (!ground) return PlanValidation::invalid_at(i, why);
    state = apply_action(state, *ground);
  }
  DerivedModel model = rules.evaluate(state);
  if (!FactView(state, model.derived).query(goal).holds()) {
    return PlanValidation::invalid_at(plan.size(), "goal not satisfied");
  }
  return PlanValidation::ok();
}

}  // namespace rescueplan
