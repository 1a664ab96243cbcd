#pragma once

// Breadth-first forward search over STRIPS states. Rule consequences are
// re-derived at every state, so preconditions may consult derived predicates.

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rescueplan/actions.hpp"
#include "rescueplan/fact_set.hpp"
#include "rescueplan/inference.hpp"

namespace rescueplan {

struct PlannerConfig {
  std::size_t max_depth = 64;
  std::size_t max_expansions = 1'000'000;
  std::chrono::milliseconds time_budget{30'000};

  void validate() const;  // throws Error(invalid_argument) on zero budgets
};

struct Plan {
  std::vector<GroundAction> steps;
  bool proven_minimal = false;
};

struct SearchStats {
  std::size_t expanded = 0;
  std::size_t generated = 0;
  std::size_t duplicates_pruned = 0;
  std::size_t max_frontier = 0;
  std::chrono::milliseconds elapsed{0};

  std::string line() const;  // "expanded=… generated=… elapsed_ms=…"
};

enum class PlanStatus { solved, unsolvable, exhausted };

std::string_view to_string(PlanStatus s);  // "plan" | "unsolvable" | "exhausted"

struct PlanResult {
  PlanStatus status = PlanStatus::unsolvable;
  Plan plan;
  SearchStats stats;
  std::string exhausted_reason;  // which budget tripped
};

// Rules plus actions, compiled once. The derived-model memo is internally
// synchronised; everything else is immutable, so a domain can be shared
// between threads.
class PlanningDomain {
 public:
  PlanningDomain(std::vector<Rule> rules, ActionDomain actions);

  const RuleProgram& rules() const noexcept { return rules_; }
  const ActionDomain& actions() const noexcept { return actions_; }
  std::span<const ActionSchema> schemas() const noexcept { return actions_.schemas; }
  bool is_fluent(const PredicateKey& k) const { return actions_.fluents.contains(k); }

  // Memoised by the base fact set (hash plus equality).
  std::shared_ptr<const DerivedModel> model(const FactSet& base) const;

  // Splits a state into (static, fluent) parts.
  std::pair<FactSet, FactSet> split(const FactSet& state) const;

 private:
  RuleProgram rules_;
  ActionDomain actions_;

  struct Memo {
    std::mutex mu;
    std::unordered_map<FactSet, std::shared_ptr<const DerivedModel>, FactSetHasher> entries;
  };
  std::shared_ptr<Memo> memo_;
};

// Goal text: either `goal([lit, ...]).` or a bare literal list.
std::vector<Literal> parse_goal(std::string_view text, std::string_view source = "<goal>");
std::string goal_to_string(std::span<const Literal> goal);  // "goal([...])."

// Throws Error(unsafe_query) for unsafe goals, Error(invalid_argument) for
// bad configs.
PlanResult plan(const PlanningDomain& domain, const FactSet& initial, std::span<const Literal> goal,
                const PlannerConfig& config = {});

enum class ReplanStatus { keep_plan, new_plan, unsolvable, exhausted };

struct ReplanResult {
  ReplanStatus status = ReplanStatus::keep_plan;
  PlanValidation validation;  // of the remaining plan
  PlanResult search;          // set unless keep_plan
};

ReplanResult replan(const PlanningDomain& domain, const FactSet& current, std::span<const GroundAction> remaining,
                    std::span<const Literal> goal, const PlannerConfig& config = {});

}  // namespace rescueplan
