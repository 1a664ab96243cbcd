#pragma once

// STRIPS action schemas: an agent guard, preconditions and add/delete
// effects over declared fluent predicates.
//
// Surface syntax (kb-core term syntax):
//
//   fluent(at/2).
//   action(move_crane(A,F,T), [crane(A,_)],
//          [at(A,F), passable_fire(F,T)],
//          [del(at(A,F)), add(at(A,T))]).
//
// Ordinary rules may appear in the same file; they are domain helper rules.

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rescueplan/fact_set.hpp"
#include "rescueplan/inference.hpp"
#include "rescueplan/kb.hpp"

namespace rescueplan {

struct Effect {
  bool add = false;  // false: delete
  Atom atom;

  friend bool operator==(const Effect&, const Effect&) = default;
};

struct ActionSchema {
  Atom head;  // name + distinct parameter variables
  std::vector<Literal> agent_guard;
  std::vector<Literal> preconditions;
  std::vector<Effect> effects;
  SourceLocation where;

  const std::string& name() const noexcept { return head.predicate; }
  std::vector<Literal> conditions() const;  // guard followed by preconditions
};

struct GroundAction {
  std::string schema;
  std::vector<Term> args;
  std::vector<Atom> del;
  std::vector<Atom> add;

  Atom head() const { return Atom{schema, args}; }

  friend bool operator==(const GroundAction&, const GroundAction&) = default;
};

std::string to_string(const GroundAction& a);  // printed head, e.g. move_crane(crane_1,...)

struct ActionDomain {
  std::set<PredicateKey> fluents;
  std::vector<ActionSchema> schemas;
  std::vector<Rule> rules;  // helper rules declared alongside the actions
};

// `known_rules` are rules defined elsewhere (e.g. domain.rules); their head
// predicates count as derived when checking effects.
ActionDomain parse_domain(std::string_view text, std::string_view source = "<actions>",
                          std::span<const Rule> known_rules = {});

std::vector<ActionSchema> parse_actions(std::string_view text, std::string_view source = "<actions>",
                                        std::span<const Rule> known_rules = {});

// Every ground instance whose guard and preconditions hold, in schema source
// order, then lexicographic argument order.
std::vector<GroundAction> ground_applicable(const FactSet& state, const DerivedModel& model,
                                            std::span<const ActionSchema> schemas);

// Instantiates `schema` at the given arguments if applicable. On failure,
// `why` receives the first failing guard or precondition literal.
std::optional<GroundAction> instantiate(const ActionSchema& schema, std::span<const Term> args,
                                        const FactView& view, std::string* why = nullptr);

// Deletions first, then additions.
FactSet apply_action(const FactSet& state, const GroundAction& a);

struct PlanValidation {
  bool valid = true;
  std::size_t index = 0;  // failing step; plan size when the goal fails
  std::string reason;

  static PlanValidation ok() { return {}; }
  static PlanValidation invalid_at(std::size_t i, std::string why) { return {false, i, std::move(why)}; }
};

// Effects are re-derived from the schemas, not taken from the plan steps.
PlanValidation validate_plan(const FactSet& initial, const RuleProgram& rules, std::span<const ActionSchema> schemas,
                             std::span<const GroundAction> plan, std::span<const Literal> goal);

}  // namespace rescueplan
