#include <doctest.h>

#include <fstream>
#include <sstream>

#include "rescueplan/actions.hpp"
#include "rescueplan/planner.hpp"
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

const char* kCraneSchema = R"(fluent(at/2).
action(move_crane(A,F,T), [crane(A,_)],
       [at(A,F), passable_fire(F,T)],
       [del(at(A,F)), add(at(A,T))]).
)";

struct Site {
  std::vector<Rule> rules;
  ActionDomain domain;
  FactSet state;
  RuleProgram program;
};

Site tehran_site() {
  Site s;
  s.rules = parse_program(slurp(tehran::bundle_dir() + "/domain.rules")).rules;
  s.domain = parse_domain(slurp(tehran::bundle_dir() + "/domain.actions"), "domain.actions", s.rules);
  s.state = FactSet(parse_program(slurp(tehran::bundle_dir() + "/site.facts")).facts);
  std::vector<Rule> all = s.rules;
  all.insert(all.end(), s.domain.rules.begin(), s.domain.rules.end());
  s.program = RuleProgram(all);
  return s;
}

ErrorKind domain_error(std::string_view text, std::span<const Rule> known = {}) {
  try {
    parse_domain(text, "t.actions", known);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error for: " << text);
  return ErrorKind::io;
}

std::vector<std::string> heads(const std::vector<GroundAction>& acts) {
  std::vector<std::string> out;
  for (const auto& a : acts) out.push_back(to_string(a));
  return out;
}

GroundAction crane_move(const FactView& view, const Site& s, const char* from, const char* to) {
  std::vector<Term> args = {Term::constant("crane_1"), Term::constant(from), Term::constant(to)};
  auto a = instantiate(s.domain.schemas[0], args, view);
  REQUIRE(a);
  return *a;
}

}  // namespace

TEST_CASE("parse: move_crane schema structure") {
  auto schemas = parse_actions(kCraneSchema);
  REQUIRE(schemas.size() == 1);
  const ActionSchema& s = schemas[0];
  CHECK(s.name() == "move_crane");
  CHECK(s.head.args.size() == 3);
  REQUIRE(s.agent_guard.size() == 1);
  CHECK(to_string(s.agent_guard[0]) == "crane(A,_)");
  REQUIRE(s.preconditions.size() == 2);
  CHECK(to_string(s.preconditions[0]) == "at(A,F)");
  CHECK(to_string(s.preconditions[1]) == "passable_fire(F,T)");
  REQUIRE(s.effects.size() == 2);
  CHECK_FALSE(s.effects[0].add);
  CHECK(to_string(s.effects[0].atom) == "at(A,F)");
  CHECK(s.effects[1].add);
  CHECK(to_string(s.effects[1].atom) == "at(A,T)");
  CHECK(s.where.line == 2);
}

TEST_CASE("parse: empty and full fixture") {
  CHECK(parse_actions("").empty());
  Site s = tehran_site();
  CHECK(s.domain.schemas.size() == 2);
  CHECK(s.domain.rules.size() == 7);
  CHECK(s.domain.fluents == std::set<PredicateKey>{{"at", 2}});
}

TEST_CASE("parse: schema invariants") {
  auto rules = parse_program("safe_area(X) :- node(X).").rules;
  CHECK(domain_error("fluent(at/2).\naction(m(A,X), [], [node(X)], [add(safe_area(X))]).", rules) ==
        ErrorKind::effect_on_derived_predicate);
  CHECK(domain_error("fluent(at/2).\naction(m(A,X), [], [node(X)], [add(node(X))]).") ==
        ErrorKind::effect_on_static_predicate);
  CHECK(domain_error("fluent(at/2).\naction(m(A), [], [node(A)], [add(at(A,B))]).") ==
        ErrorKind::unbound_effect_variable);
  CHECK(domain_error("fluent(at/2).\naction(m(A,A), [], [node(A)], []).") == ErrorKind::syntax);
  CHECK(domain_error("fluent(at/2).\naction(m(a), [], [], []).") == ErrorKind::syntax);
  CHECK(domain_error("fluent(at/2).\naction(m(A), [], [node(A)], []).\naction(m(B), [], [node(B)], []).") ==
        ErrorKind::invalid_domain);
  CHECK(domain_error("fluent(at/2).\naction(m(A), [], [not at(A,X), node(A)], []).") == ErrorKind::safety);
  CHECK(domain_error("fluent(at/2).\nat(a,b).") == ErrorKind::syntax);
  CHECK(domain_error("fluent(safe_area/1).", rules) == ErrorKind::invalid_domain);
  CHECK(domain_error("action(m(A), [], [node(A)]).") == ErrorKind::syntax);
  CHECK(domain_error("fluent(at/2).\naction(m(A), [], [node(A)], [at(A,b)]).") == ErrorKind::syntax);
  // effect variables may come from positive preconditions
  CHECK_NOTHROW(parse_domain("fluent(at/2).\naction(m(A), [], [at(A,X), node(Y)], [del(at(A,X)), add(at(A,Y))])."));
}

TEST_CASE("ground_applicable: site examples") {
  Site s = tehran_site();
  DerivedModel m = s.program.evaluate(s.state);
  std::vector<std::string> got = heads(ground_applicable(s.state, m, s.domain.schemas));
  CHECK(got == std::vector<std::string>{"move_crane(crane_1,'Horr Sq.','Hassanabad Sq.')",
                                        "move_truck(truck_1,'Horr Sq.','Hassanabad Sq.')"});
  FactSet empty(parse_program(tehran::kEvents).facts);
  CHECK(ground_applicable(empty, s.program.evaluate(empty), s.domain.schemas).empty());
}

TEST_CASE("ground_applicable: matches substitution enumeration") {
  gen::Rng rng(8);
  int total = 0;
  for (int i = 0; i < 120; ++i) {
    gen::PlanningScenario sc = gen::planning_scenario(rng, i % 2 == 1);
    auto rules = parse_program(sc.rules).rules;
    ActionDomain d = parse_domain(sc.actions, "gen.actions", rules);
    std::vector<Rule> all = rules;
    all.insert(all.end(), d.rules.begin(), d.rules.end());
    RuleProgram prog(all);
    FactSet state(parse_program(sc.site).facts);
    // keep the constant universe small for the enumeration
    if (oracle::universe({state.begin(), state.end()}).size() > 13) continue;
    DerivedModel m = prog.evaluate(state);
    oracle::AtomSet model(state.begin(), state.end());
    model.insert(m.derived.begin(), m.derived.end());
    std::set<oracle::OracleAction> want = oracle::enumerate_actions(model, d.schemas);
    std::set<oracle::OracleAction> got;
    for (const GroundAction& a : ground_applicable(state, m, d.schemas)) {
      got.insert({a.head(), {a.del.begin(), a.del.end()}, {a.add.begin(), a.add.end()}});
    }
    INFO(sc.site);
    REQUIRE(got == want);
    total += static_cast<int>(want.size());
  }
  CHECK(total > 100);
}

TEST_CASE("ground_applicable: stable order") {
  Site s = tehran_site();
  FactSet st = s.state;
  st.erase(parse_fact("fire('Imam Khomeini RIP Sq.','Hassanabad Sq.')"));
  DerivedModel m = s.program.evaluate(st);
  auto first = ground_applicable(st, m, s.domain.schemas);
  auto second = ground_applicable(st, m, s.domain.schemas);
  CHECK(first == second);
  CHECK(heads(first) == std::vector<std::string>{
                            "move_crane(crane_1,'Horr Sq.','Hassanabad Sq.')",
                            "move_crane(crane_2,'Imam Khomeini RIP Sq.','Hassanabad Sq.')",
                            "move_truck(truck_1,'Horr Sq.','Hassanabad Sq.')",
                        });
}

TEST_CASE("apply_action: frame property and ordering") {
  Site s = tehran_site();
  DerivedModel m = s.program.evaluate(s.state);
  FactView view(s.state, m.derived);
  GroundAction a = crane_move(view, s, "Horr Sq.", "Hassanabad Sq.");
  FactSet next = apply_action(s.state, a);
  CHECK_FALSE(next.contains(parse_fact("at(crane_1,'Horr Sq.')")));
  CHECK(next.contains(parse_fact("at(crane_1,'Hassanabad Sq.')")));
  CHECK(next.size() == s.state.size());
  for (const Atom& f : s.state) {
    if (f != parse_fact("at(crane_1,'Horr Sq.')")) CHECK(next.contains(f));
  }

  GroundAction nothing{"noop", {}, {}, {}};
  CHECK(apply_action(s.state, nothing).hash() == s.state.hash());

  Atom same = parse_fact("at(crane_1,'Horr Sq.')");
  GroundAction both{"stay", {}, {same}, {same}};
  CHECK(apply_action(s.state, both).contains(same));
}

TEST_CASE("instantiate: reasons") {
  Site s = tehran_site();
  DerivedModel m = s.program.evaluate(s.state);
  FactView view(s.state, m.derived);
  std::string why;
  std::vector<Term> args = {Term::constant("crane_1"), Term::constant("Horr Sq."), Term::constant("Saadi Sq.")};
  CHECK_FALSE(instantiate(s.domain.schemas[0], args, view, &why));
  CHECK(why == "precondition passable_fire failed");
  args[0] = Term::constant("truck_1");
  CHECK_FALSE(instantiate(s.domain.schemas[0], args, view, &why));
  CHECK(why == "agent guard crane failed");
}

TEST_CASE("validate_plan") {
  Site s = tehran_site();
  DerivedModel m = s.program.evaluate(s.state);
  FactView view(s.state, m.derived);
  std::vector<GroundAction> plan = {crane_move(view, s, "Horr Sq.", "Hassanabad Sq.")};
  {
    FactSet mid = apply_action(s.state, plan[0]);
    DerivedModel mm = s.program.evaluate(mid);
    plan.push_back(crane_move(FactView(mid, mm.derived), s, "Hassanabad Sq.", "Saadi Sq."));
  }
  auto goal = parse_goal("goal([at(crane_1,'Saadi Sq.')]).");
  CHECK(validate_plan(s.state, s.program, s.domain.schemas, plan, goal).valid);

  auto here = parse_goal("at(crane_1,'Horr Sq.')");
  CHECK(validate_plan(s.state, s.program, s.domain.schemas, {}, here).valid);

  FactSet burning = s.state;
  burning.insert(parse_fact("fire('Saadi Sq.','Hassanabad Sq.')"));
  burning.insert(parse_fact("fire('Hassanabad Sq.','Saadi Sq.')"));
  PlanValidation v = validate_plan(burning, s.program, s.domain.schemas, plan, goal);
  CHECK_FALSE(v.valid);
  CHECK(v.index == 1);
  CHECK(v.reason == "precondition passable_fire failed");

  PlanValidation short_plan = validate_plan(s.state, s.program, s.domain.schemas, std::span(plan).first(1), goal);
  CHECK_FALSE(short_plan.valid);
  CHECK(short_plan.index == 1);
  CHECK(short_plan.reason == "goal not satisfied");

  GroundAction fake{"teleport", {Term::constant("crane_1")}, {}, {}};
  PlanValidation unknown = validate_plan(s.state, s.program, s.domain.schemas, std::vector{fake}, goal);
  CHECK(unknown.index == 0);
  CHECK(unknown.reason == "unknown action teleport/1");
}
