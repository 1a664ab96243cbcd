#pragma once

// Seeded random inputs for the property tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace gen {

using Rng = std::mt19937_64;

// Stratified by construction: each derived predicate gets a level and only
// negates predicates of a lower level. At most `max_facts` facts and
// `max_rules` rules, all safe.
std::string stratified_program(Rng& rng, int max_facts = 30, int max_rules = 10);

struct PlanningScenario {
  std::string site;     // ground facts, including initial at/2
  std::string rules;    // domain rules
  std::string actions;  // fluents, schemas, helper rules
  std::string goal;     // goal([...]).
};

// A random road network with hazards and up to three mobile resources over
// the movement domain. With `dynamic_fire`, fire/2 is a fluent and firemen
// can put fires out, so derived facts change along a plan.
PlanningScenario planning_scenario(Rng& rng, bool dynamic_fire);

}  // namespace gen
