#pragma once

// Session layer: a loaded scenario bundle, its event timeline, and the active
// plan with an execution cursor.

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rescueplan/actions.hpp"
#include "rescueplan/planner.hpp"
#include "rescueplan/world.hpp"

namespace rescueplan {

// Directory layout: site.facts, domain.rules, domain.actions, and optionally
// events.facts and goal.facts.
struct ScenarioBundle {
  std::string name;
  std::optional<std::string> site_facts;
  std::optional<std::string> domain_rules;
  std::optional<std::string> domain_actions;
  std::optional<std::string> events;
  std::optional<std::string> goal;

  static ScenarioBundle from_directory(const std::filesystem::path& dir);
};

struct LogEntry {
  std::int64_t clock = 0;
  std::optional<EventRecord> event;
  std::optional<GroundAction> action;

  std::string str() const;
};

struct ActivePlan {
  std::vector<Literal> goal;
  std::vector<GroundAction> steps;
  std::size_t cursor = 0;
};

struct ScenarioSummary {
  std::size_t nodes = 0;
  std::size_t links = 0;
  std::size_t resources = 0;
  std::size_t rules = 0;  // clauses in domain.rules
  std::size_t helper_rules = 0;
  std::size_t schemas = 0;
};

struct StepResult {
  GroundAction action;
  std::size_t cursor = 0;
  bool done = false;
};

struct PostResult {
  bool changed = false;
  bool plan_dirty = false;
};

// Single owner; copying a session yields an independent snapshot that shares
// the immutable domain.
class Session {
 public:
  // Throws ParseError (with file and location), Error(not_stratifiable),
  // Error(missing_bundle_part).
  static Session load(const ScenarioBundle& bundle);

  const FactSet& facts() const noexcept { return facts_; }
  const PlanningDomain& domain() const noexcept { return *domain_; }
  std::int64_t clock() const noexcept { return clock_; }
  const std::vector<LogEntry>& log() const noexcept { return log_; }
  const std::vector<EventRecord>& bundle_events() const noexcept { return bundle_events_; }
  const std::optional<std::vector<Literal>>& bundle_goal() const noexcept { return bundle_goal_; }
  const std::optional<ActivePlan>& active_plan() const noexcept { return plan_; }
  bool dirty() const noexcept { return dirty_; }
  bool plan_dirty() const noexcept { return plan_.has_value() && dirty_; }
  std::uint64_t snapshot_hash() const noexcept { return facts_.hash(); }
  const ScenarioSummary& summary() const noexcept { return summary_; }

  std::shared_ptr<const DerivedModel> derived() const { return domain_->model(facts_); }

  // Throws Error(timestamp_regression) when e.timestamp < clock().
  PostResult post_event(const EventRecord& e);

  // Installs the plan (cursor 0, dirty cleared) when one is found; otherwise
  // leaves the session untouched.
  PlanResult request_plan(const std::vector<Literal>& goal, const PlannerConfig& config = {});

  // Installs a plan computed elsewhere against the state with hash
  // `planned_on`; the plan starts dirty if the state has moved since.
  void install_plan(const std::vector<Literal>& goal, std::vector<GroundAction> steps, std::uint64_t planned_on);

  // Plans on a copy with `events` applied; the session is not modified.
  PlanResult what_if(const std::vector<EventRecord>& events, const std::vector<Literal>& goal,
                     const PlannerConfig& config = {}) const;

  // Throws Error(no_active_plan), Error(dirty_plan), Error(plan_complete).
  StepResult execute_step();

  // Revalidates the remaining plan against the current state. KeepPlan clears
  // the dirty flag; a new plan is installed; otherwise the plan is dropped.
  // Throws Error(no_active_plan).
  ReplanResult replan(const PlannerConfig& config = {});

  // Re-applies a recorded log (events and executed actions) in order.
  void replay(const std::vector<LogEntry>& entries);

 private:
  Session() = default;

  std::shared_ptr<const PlanningDomain> domain_;
  FactSet facts_;
  std::int64_t clock_ = 0;
  std::vector<LogEntry> log_;
  std::vector<EventRecord> bundle_events_;
  std::optional<std::vector<Literal>> bundle_goal_;
  std::optional<ActivePlan> plan_;
  bool dirty_ = false;
  ScenarioSummary summary_;
};

}  // namespace rescueplan
