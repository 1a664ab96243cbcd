#pragma once

// Stratified bottom-up evaluation (negation as failure) and conjunctive
// queries over base facts plus the derived model.

#include <array>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <vector>

#include "rescueplan/fact_set.hpp"
#include "rescueplan/kb.hpp"

namespace rescueplan {

using Stratum = std::vector<PredicateKey>;

namespace detail {
struct CompiledRules;
}

struct Stratification {
  std::map<PredicateKey, int> level;

  int height() const;  // number of strata
  std::vector<Stratum> strata() const;
};

// Least levels satisfying level(head) >= level(pos) and level(head) > level(neg).
// Throws Error(not_stratifiable) naming one negative cycle.
Stratification stratify(std::span<const Rule> rules);

struct DerivedModel {
  // All atoms of rule-head predicates in the perfect model.
  FactSet derived;
  std::vector<Stratum> strata_order;
};

struct QueryResult {
  std::vector<Substitution> answers;  // sorted, deduplicated
  bool grounded = false;

  bool holds() const noexcept { return !answers.empty(); }
};

// A compiled, stratified rule set. Immutable after construction.
class RuleProgram {
 public:
  RuleProgram() = default;
  // Checks safety and stratifies; throws ParseError(safety) or Error(not_stratifiable).
  explicit RuleProgram(std::vector<Rule> rules);

  const std::vector<Rule>& rules() const noexcept { return rules_; }
  const Stratification& stratification() const noexcept { return strat_; }
  const std::set<PredicateKey>& derived_predicates() const noexcept { return heads_; }

  // Semi-naive evaluation stratum by stratum.
  DerivedModel evaluate(const FactSet& base) const;

 private:
  std::vector<Rule> rules_;
  Stratification strat_;
  std::set<PredicateKey> heads_;
  std::shared_ptr<const detail::CompiledRules> compiled_;
};

DerivedModel evaluate(const FactSet& base, std::span<const Rule> rules);

// Read-only view over base facts and a derived model. Both sets must outlive
// the view.
class FactView {
 public:
  FactView(const FactSet& base, const FactSet& derived) : base_(&base), derived_(&derived) {}

  bool contains(const Atom& ground) const;
  // Atoms matching the key: at most two contiguous ranges.
  std::array<std::span<const Atom>, 2> rows(const PredicateKey& key) const;
  // Every constant or number appearing in base or derived facts, sorted.
  std::vector<Term> constants() const;

  // Left-to-right conjunctive query. Answers bind every named variable of
  // the goal plus those in `initial`. Throws Error(unsafe_query) if a
  // negated literal has a named variable not bound by `initial` or a
  // positive literal to its left.
  QueryResult query(std::span<const Literal> goal, const Substitution& initial = {}) const;

  // Number of leading goal literals that can be jointly satisfied.
  std::size_t satisfiable_prefix(std::span<const Literal> goal, const Substitution& initial = {}) const;

 private:
  const FactSet* base_;
  const FactSet* derived_;
};

QueryResult query(const FactSet& base, const DerivedModel& model, std::span<const Literal> goal);

void check_query_safety(std::span<const Literal> goal, const std::set<std::string>& prebound = {});

}  // namespace rescueplan
