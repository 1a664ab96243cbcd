#include "rescueplan/session.hpp"

#include <fstream>
#include <sstream>

namespace rescueplan {

namespace {

std::optional<std::string> read_optional(const std::filesystem::path& p) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(p, ec)) return std::nullopt;
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string& require(const std::optional<std::string>& part, const ScenarioBundle& b, std::string_view file) {
  if (!part) {
    throw Error(ErrorKind::missing_bundle_part, "scenario '" + b.name + "' is missing " + std::string(file));
  }
  return *part;
}

}  // namespace

ScenarioBundle ScenarioBundle::from_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorKind::missing_bundle_part, "scenario directory not found: " + dir.string());
  }
  ScenarioBundle b;
  b.name = dir.string();
  b.site_facts = read_optional(dir / "site.facts");
  b.domain_rules = read_optional(dir / "domain.rules");
  b.domain_actions = read_optional(dir / "domain.actions");
  b.events = read_optional(dir / "events.facts");
  b.goal = read_optional(dir / "goal.facts");
  return b;
}

std::string LogEntry::str() const {
  std::string out = "t=" + std::to_string(clock) + " ";
  if (event) return out + to_string(*event);
  if (action) return out + "execute " + to_string(*action);
  return out;
}

Session Session::load(const ScenarioBundle& bundle) {
  const std::string& site_text = require(bundle.site_facts, bundle, "site.facts");
  const std::string& rules_text = require(bundle.domain_rules, bundle, "domain.rules");
  const std::string& actions_text = require(bundle.domain_actions, bundle, "domain.actions");

  Program site = parse_program(site_text, "site.facts");
  if (!site.rules.empty()) {
    throw ParseError(ErrorKind::syntax, site.rules.front().where, "site.facts may only contain ground facts");
  }
  Program rules = parse_program(rules_text, "domain.rules");
  ActionDomain actions = parse_domain(actions_text, "domain.actions", rules.rules);

  Session s;
  s.summary_.rules = rules.rules.size();
  s.summary_.helper_rules = actions.rules.size();
  s.summary_.schemas = actions.schemas.size();
  s.domain_ = std::make_shared<const PlanningDomain>(rules.rules, std::move(actions));

  std::vector<Atom> facts = std::move(site.facts);
  facts.insert(facts.end(), rules.facts.begin(), rules.facts.end());
  s.facts_ = FactSet(std::move(facts));
  if (bundle.events) s.bundle_events_ = parse_events(*bundle.events, "events.facts");
  if (bundle.goal) s.bundle_goal_ = parse_goal(*bundle.goal, "goal.facts");

  s.summary_.nodes = s.facts_.range({"node", 1}).size();
  s.summary_.links = s.facts_.range({"link", 2}).size();
  s.summary_.resources = s.facts_.range({"crane", 2}).size() + s.facts_.range({"truck", 2}).size();
  return s;
}

PostResult Session::post_event(const EventRecord& e) {
  if (e.timestamp < clock_) {
    throw Error(ErrorKind::timestamp_regression, "event at t=" + std::to_string(e.timestamp) +
                                                     " is earlier than session clock t=" + std::to_string(clock_));
  }
  auto outcome = apply_event(facts_, e);
  clock_ = e.timestamp;
  if (outcome.changed) {
    facts_ = std::move(outcome.state);
    dirty_ = true;
  }
  log_.push_back({clock_, e, std::nullopt});
  return {outcome.changed, plan_dirty()};
}

PlanResult Session::request_plan(const std::vector<Literal>& goal, const PlannerConfig& config) {
  PlanResult r = plan(*domain_, facts_, goal, config);
  if (r.status == PlanStatus::solved) install_plan(goal, r.plan.steps, facts_.hash());
  return r;
}

void Session::install_plan(const std::vector<Literal>& goal, std::vector<GroundAction> steps, std::uint64_t planned_on) {
  plan_ = ActivePlan{goal, std::move(steps), 0};
  dirty_ = planned_on != facts_.hash();
}

PlanResult Session::what_if(const std::vector<EventRecord>& events, const std::vector<Literal>& goal,
                            const PlannerConfig& config) const {
  FactSet hypothetical = facts_;
  for (const EventRecord& e : events) hypothetical = apply_event(hypothetical, e).state;
  return plan(*domain_, hypothetical, goal, config);
}

StepResult Session::execute_step() {
  if (!plan_) throw Error(ErrorKind::no_active_plan, "no active plan");
  if (dirty_) throw Error(ErrorKind::dirty_plan, "state changed since the plan was validated; replan first");
  if (plan_->cursor >= plan_->steps.size()) throw Error(ErrorKind::plan_complete, "active plan is complete");
  const GroundAction& a = plan_->steps[plan_->cursor];
  facts_ = apply_action(facts_, a);
  log_.push_back({clock_, std::nullopt, a});
  ++plan_->cursor;
  return {a, plan_->cursor, plan_->cursor == plan_->steps.size()};
}

ReplanResult Session::replan(const PlannerConfig& config) {
  if (!plan_) throw Error(ErrorKind::no_active_plan, "no active plan");
  std::span<const GroundAction> remaining(plan_->steps);
  remaining = remaining.subspan(plan_->cursor);
  ReplanResult r = rescueplan::replan(*domain_, facts_, remaining, plan_->goal, config);
  switch (r.status) {
    case ReplanStatus::keep_plan: dirty_ = false; break;
    case ReplanStatus::new_plan: install_plan(plan_->goal, r.search.plan.steps, facts_.hash()); break;
    case ReplanStatus::unsolvable:
    case ReplanStatus::exhausted:
      plan_.reset();
      dirty_ = false;
      break;
  }
  return r;
}

void Session::replay(const std::vector<LogEntry>& entries) {
  for (const LogEntry& e : entries) {
    if (e.event) {
      post_event(*e.event);
    } else if (e.action) {
      facts_ = apply_action(facts_, *e.action);
      log_.push_back(e);
    }
  }
}

}  // namespace rescueplan
