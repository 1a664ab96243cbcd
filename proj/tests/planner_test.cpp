#include <doctest.h>

#include <fstream>
#include <sstream>

#include "rescueplan/planner.hpp"
#include "rescueplan/world.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"
#include "support/tehran.hpp"

using namespace rescueplan;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Problem {
  std::shared_ptr<PlanningDomain> domain;
  FactSet state;
  std::vector<Rule> all_rules;
};

Problem make_problem(const std::string& site, const std::string& rules_text, const std::string& actions) {
  Problem p;
  auto rules = parse_program(rules_text).rules;
  ActionDomain d = parse_domain(actions, "domain.actions", rules);
  p.all_rules = rules;
  p.all_rules.insert(p.all_rules.end(), d.rules.begin(), d.rules.end());
  p.domain = std::make_shared<PlanningDomain>(rules, std::move(d));
  p.state = FactSet(parse_program(site).facts);
  return p;
}

Problem tehran_problem() {
  return make_problem(slurp(tehran::bundle_dir() + "/site.facts"), slurp(tehran::bundle_dir() + "/domain.rules"),
                      slurp(tehran::bundle_dir() + "/domain.actions"));
}

std::vector<std::string> steps(const PlanResult& r) {
  std::vector<std::string> out;
  for (const auto& a : r.plan.steps) out.push_back(to_string(a));
  return out;
}

bool validates(const Problem& p, const std::vector<GroundAction>& plan, std::span<const Literal> goal) {
  return validate_plan(p.state, p.domain->rules(), p.domain->schemas(), plan, goal).valid;
}

}  // namespace

TEST_CASE("plan: crane reaches Saadi in two moves") {
  Problem p = tehran_problem();
  auto goal = parse_goal("goal([at(crane_1,'Saadi Sq.')]).");
  PlanResult r = plan(*p.domain, p.state, goal);
  REQUIRE(r.status == PlanStatus::solved);
  CHECK(steps(r) == std::vector<std::string>{"move_crane(crane_1,'Horr Sq.','Hassanabad Sq.')",
                                             "move_crane(crane_1,'Hassanabad Sq.','Saadi Sq.')"});
  CHECK(r.plan.proven_minimal);
  CHECK(validates(p, r.plan.steps, goal));
  CHECK(r.stats.expanded >= 2);
  CHECK(r.stats.line().rfind("expanded=", 0) == 0);
}

TEST_CASE("plan: goal already holds") {
  Problem p = tehran_problem();
  PlanResult r = plan(*p.domain, p.state, parse_goal("at(crane_1,'Horr Sq.')"));
  REQUIRE(r.status == PlanStatus::solved);
  CHECK(r.plan.steps.empty());
  CHECK(r.stats.expanded == 1);
}

TEST_CASE("plan: truck cannot reach Saadi") {
  Problem p = tehran_problem();
  PlanResult r = plan(*p.domain, p.state, parse_goal("at(truck_1,'Saadi Sq.')"));
  CHECK(r.status == PlanStatus::unsolvable);
  CHECK(r.plan.steps.empty());
  auto bfs = oracle::shortest_plan({p.state.begin(), p.state.end()}, p.all_rules, p.domain->schemas(),
                                   parse_goal("at(truck_1,'Saadi Sq.')"));
  CHECK_FALSE(bfs.length);
  CHECK_FALSE(bfs.truncated);
}

TEST_CASE("plan: budgets") {
  Problem p = tehran_problem();
  auto goal = parse_goal("at(crane_1,'Saadi Sq.')");
  PlannerConfig shallow;
  shallow.max_depth = 1;
  PlanResult r = plan(*p.domain, p.state, goal, shallow);
  CHECK(r.status == PlanStatus::exhausted);
  CHECK(r.exhausted_reason == "max_depth");

  PlannerConfig tiny;
  tiny.max_expansions = 1;
  PlanResult t = plan(*p.domain, p.state, goal, tiny);
  CHECK(t.status == PlanStatus::exhausted);
  CHECK(t.exhausted_reason == "max_expansions");

  PlannerConfig zero;
  zero.max_expansions = 0;
  CHECK_THROWS_AS(plan(*p.domain, p.state, goal, zero), Error);

  // the bound is not hit when the space is exhausted first
  PlannerConfig exact;
  exact.max_depth = 2;
  CHECK(plan(*p.domain, p.state, goal, exact).status == PlanStatus::solved);
  // cranes keep moving at depth 2, so the truck search is cut short there
  CHECK(plan(*p.domain, p.state, parse_goal("at(truck_1,'Saadi Sq.')"), exact).status == PlanStatus::exhausted);
  PlannerConfig deep;
  deep.max_depth = 8;
  CHECK(plan(*p.domain, p.state, parse_goal("at(truck_1,'Saadi Sq.')"), deep).status == PlanStatus::unsolvable);
}

TEST_CASE("plan: goal with a variable and a negation") {
  Problem p = tehran_problem();
  auto goal = parse_goal("goal([at(crane_1,X), not at(crane_1,'Horr Sq.'), safe_area(X)]).");
  PlanResult r = plan(*p.domain, p.state, goal);
  REQUIRE(r.status == PlanStatus::solved);
  CHECK(r.plan.steps.size() == 1);
  CHECK_THROWS_AS(plan(*p.domain, p.state, parse_goal("not at(crane_1,X)")), Error);
}

TEST_CASE("plan: matches BFS oracle on random scenarios") {
  gen::Rng rng(1234);
  int compared = 0, solved = 0, unsolvable = 0, dynamic = 0;
  for (int i = 0; compared < 120 && i < 400; ++i) {
    bool fire_moves = i % 3 == 0;
    gen::PlanningScenario sc = gen::planning_scenario(rng, fire_moves);
    Problem p = make_problem(sc.site, sc.rules, sc.actions);
    auto goal = parse_goal(sc.goal);
    auto bfs = oracle::shortest_plan({p.state.begin(), p.state.end()}, p.all_rules, p.domain->schemas(), goal, 2000);
    if (bfs.truncated) continue;
    ++compared;
    PlanResult r = plan(*p.domain, p.state, goal);
    INFO(sc.site << sc.goal);
    if (bfs.length) {
      REQUIRE(r.status == PlanStatus::solved);
      REQUIRE(r.plan.steps.size() == *bfs.length);
      REQUIRE(validates(p, r.plan.steps, goal));
      ++solved;
      dynamic += fire_moves && *bfs.length > 0;
    } else {
      REQUIRE(r.status == PlanStatus::unsolvable);
      ++unsolvable;
    }
  }
  CHECK(compared == 120);
  CHECK(solved > 30);
  CHECK(unsolvable > 5);
  CHECK(dynamic > 5);
}

TEST_CASE("plan: deterministic") {
  gen::Rng rng(77);
  for (int i = 0; i < 30; ++i) {
    gen::PlanningScenario sc = gen::planning_scenario(rng, i % 2 == 0);
    Problem a = make_problem(sc.site, sc.rules, sc.actions);
    Problem b = make_problem(sc.site, sc.rules, sc.actions);
    auto goal = parse_goal(sc.goal);
    PlanResult x = plan(*a.domain, a.state, goal), y = plan(*b.domain, b.state, goal);
    REQUIRE(x.status == y.status);
    REQUIRE(x.plan.steps == y.plan.steps);
    REQUIRE(plan(*a.domain, a.state, goal).plan.steps == x.plan.steps);
  }
}

TEST_CASE("plan: truck moves depend on derived safety") {
  Problem with = tehran_problem();
  Problem without = make_problem(slurp(tehran::bundle_dir() + "/site.facts"), "",
                                 slurp(tehran::bundle_dir() + "/domain.actions"));
  for (const char* place : {"'Hassanabad Sq.'", "'Saadi Sq.'", "'Imam Khomeini RIP Sq.'"}) {
    auto goal = parse_goal(std::string("at(truck_1,") + place + ")");
    CHECK(plan(*without.domain, without.state, goal).status == PlanStatus::unsolvable);
  }
  CHECK(plan(*with.domain, with.state, parse_goal("at(truck_1,'Hassanabad Sq.')")).status == PlanStatus::solved);
  CHECK(plan(*without.domain, without.state, parse_goal("at(crane_1,'Saadi Sq.')")).status == PlanStatus::solved);
}

TEST_CASE("domain: fluent and derived predicates stay apart") {
  auto rules = parse_program("at(X,Y) :- base_at(X,Y).").rules;
  ActionDomain d = parse_domain("fluent(at/2).\naction(m(A,X), [], [node(X), node(A)], [add(at(A,X))]).");
  CHECK_THROWS_AS(PlanningDomain(rules, d), Error);
}

TEST_CASE("domain: split and memo") {
  Problem p = tehran_problem();
  auto [stat, fluent] = p.domain->split(p.state);
  CHECK(fluent.size() == 3);
  CHECK(stat.size() + fluent.size() == p.state.size());
  auto m1 = p.domain->model(p.state);
  auto m2 = p.domain->model(p.state);
  CHECK(m1 == m2);
  CHECK(m1->derived.contains(parse_fact("safe_area('Horr Sq.')")));
}

TEST_CASE("goal syntax") {
  CHECK(parse_goal("goal([at(a,b), not fire(a,b)]).").size() == 2);
  CHECK(parse_goal("at(a,b), safe_area(b)").size() == 2);
  CHECK(goal_to_string(parse_goal("at(a,'B c')")) == "goal([at(a,'B c')]).");
  CHECK_THROWS_AS(parse_goal("goal(at(a,b))."), ParseError);
  CHECK_THROWS_AS(parse_goal("goal([at(a,b)]). goal([x])."), ParseError);
}

TEST_CASE("replan") {
  Problem p = tehran_problem();
  auto goal = parse_goal("at(crane_1,'Saadi Sq.')");
  PlanResult r = plan(*p.domain, p.state, goal);
  REQUIRE(r.status == PlanStatus::solved);
  FactSet mid = apply_action(p.state, r.plan.steps[0]);
  std::span<const GroundAction> rest = std::span(r.plan.steps).subspan(1);

  ReplanResult keep = replan(*p.domain, mid, rest, goal);
  CHECK(keep.status == ReplanStatus::keep_plan);
  CHECK(keep.validation.valid);

  FactSet burning = mid;
  burning.insert(parse_fact("fire('Saadi Sq.','Hassanabad Sq.')"));
  burning.insert(parse_fact("fire('Hassanabad Sq.','Saadi Sq.')"));
  ReplanResult hot = replan(*p.domain, burning, rest, goal);
  CHECK(hot.status != ReplanStatus::keep_plan);
  CHECK((hot.status == ReplanStatus::new_plan || hot.status == ReplanStatus::unsolvable));
  CHECK_FALSE(hot.validation.valid);
  CHECK(hot.validation.index == 0);
  CHECK(hot.validation.reason == "precondition passable_fire failed");
  if (hot.status == ReplanStatus::new_plan) CHECK(validates({p.domain, burning, p.all_rules}, hot.search.plan.steps, goal));

  FactSet flicker = apply_event(mid, {5, EventOp::assert_fact, parse_fact("fire('Saadi Sq.','Hassanabad Sq.')")}).state;
  flicker = apply_event(flicker, {6, EventOp::retract_fact, parse_fact("fire('Saadi Sq.','Hassanabad Sq.')")}).state;
  CHECK(replan(*p.domain, flicker, rest, goal).status == ReplanStatus::keep_plan);

  // a new route when one exists
  FactSet detour = mid;
  detour.insert(parse_fact("fire('Hassanabad Sq.','Saadi Sq.')"));
  detour.erase(parse_fact("fire('Saadi Sq.','Imam Khomeini RIP Sq.')"));
  detour.erase(parse_fact("fire('Imam Khomeini RIP Sq.','Hassanabad Sq.')"));
  ReplanResult alt = replan(*p.domain, detour, rest, goal);
  REQUIRE(alt.status == ReplanStatus::new_plan);
  CHECK(alt.search.plan.steps.size() == 2);
}
