#include "rescueplan/planner.hpp"

#include <deque>
#include <unordered_set>

#include "rescueplan/syntax.hpp"

namespace rescueplan {

namespace {

constexpr std::size_t kMemoCapacity = 1 << 14;

std::vector<Rule> concat(std::vector<Rule> a, const std::vector<Rule>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

void PlannerConfig::validate() const {
  if (max_depth == 0 || max_expansions == 0 || time_budget.count() <= 0) {
    throw Error(ErrorKind::invalid_argument, "planner budgets must be positive");
  }
}

std::string SearchStats::line() const {
  return "expanded=" + std::to_string(expanded) + " generated=" + std::to_string(generated) +
         " elapsed_ms=" + std::to_string(elapsed.count());
}

std::string_view to_string(PlanStatus s) {
  switch (s) {
    case PlanStatus::solved: return "plan";
    case PlanStatus::unsolvable: return "unsolvable";
    case PlanStatus::exhausted: return "exhausted";
  }
  return "unknown";
}

PlanningDomain::PlanningDomain(std::vector<Rule> rules, ActionDomain actions)
    : rules_(concat(std::move(rules), actions.rules)), actions_(std::move(actions)), memo_(std::make_shared<Memo>()) {
  const auto& derived = rules_.derived_predicates();
  for (const PredicateKey& k : actions_.fluents) {
    if (derived.contains(k)) {
      throw Error(ErrorKind::invalid_domain, "predicate " + k.str() + " is declared fluent but defined by rules");
    }
  }
  for (const ActionSchema& s : actions_.schemas) {
    for (const Effect& e : s.effects) {
      PredicateKey k = e.atom.key();
      if (derived.contains(k)) {
        throw ParseError(ErrorKind::effect_on_derived_predicate, s.where,
                         "action " + s.name() + " changes derived predicate " + k.str());
      }
      if (!actions_.fluents.contains(k)) {
        throw ParseError(ErrorKind::effect_on_static_predicate, s.where,
                         "action " + s.name() + " changes " + k.str() + ", which is not declared fluent");
      }
    }
  }
}

std::shared_ptr<const DerivedModel> PlanningDomain::model(const FactSet& base) const {
  {
    std::lock_guard lock(memo_->mu);
    if (auto it = memo_->entries.find(base); it != memo_->entries.end()) return it->second;
  }
  auto computed = std::make_shared<const DerivedModel>(rules_.evaluate(base));
  std::lock_guard lock(memo_->mu);
  if (memo_->entries.size() >= kMemoCapacity) memo_->entries.clear();
  memo_->entries.emplace(base, computed);
  return computed;
}

std::pair<FactSet, FactSet> PlanningDomain::split(const FactSet& state) const {
  std::vector<Atom> fixed, fluent;
  for (const Atom& a : state) (is_fluent(a.key()) ? fluent : fixed).push_back(a);
  return {FactSet(std::move(fixed)), FactSet(std::move(fluent))};
}

std::vector<Literal> parse_goal(std::string_view text, std::string_view source) {
  using syntax::Node;
  auto nodes = syntax::read_sequence(text, source);
  if (nodes.size() == 1 && nodes[0].kind == Node::Kind::compound && nodes[0].text == "goal") {
    const Node& g = nodes[0];
    if (g.children.size() != 1 || g.children[0].kind != Node::Kind::list) syntax::fail(g, "expected goal([...])");
    std::vector<Literal> out;
    for (const Node& n : g.children[0].children) out.push_back(syntax::to_literal(n));
    return out;
  }
  std::vector<Literal> out;
  for (const Node& n : nodes) out.push_back(syntax::to_literal(n));
  return out;
}

std::string goal_to_string(std::span<const Literal> goal) {
  std::string out = "goal([";
  for (std::size_t i = 0; i < goal.size(); ++i) {
    if (i) out += ", ";
    out += to_string(goal[i]);
  }
  return out + "]).";
}

PlanResult plan(const PlanningDomain& domain, const FactSet& initial, std::span<const Literal> goal,
                const PlannerConfig& config) {
  using Clock = std::chrono::steady_clock;
  config.validate();
  check_query_safety(goal);
  auto started = Clock::now();

  auto [fixed, start] = domain.split(initial);

  struct Node {
    FactSet fluents;
    std::ptrdiff_t parent;
    std::size_t depth;
    GroundAction via;
  };
  std::vector<Node> nodes;
  nodes.push_back({std::move(start), -1, 0, {}});

  // Visited states, keyed through the node table.
  auto hasher = [&](std::size_t i) { return FactSetHasher{}(nodes[i].fluents); };
  auto equal = [&](std::size_t a, std::size_t b) { return nodes[a].fluents == nodes[b].fluents; };
  std::unordered_set<std::size_t, decltype(hasher), decltype(equal)> visited(64, hasher, equal);
  visited.insert(0);

  std::deque<std::size_t> frontier{0};
  PlanResult result;
  SearchStats& stats = result.stats;
  stats.max_frontier = 1;
  bool truncated = false;

  auto finish = [&](PlanStatus status) {
    result.status = status;
    stats.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
    return result;
  };

  while (!frontier.empty()) {
    if (stats.expanded >= config.max_expansions) {
      result.exhausted_reason = "max_expansions";
      return finish(PlanStatus::exhausted);
    }
    if ((stats.expanded & 63) == 0 && Clock::now() - started > config.time_budget) {
      result.exhausted_reason = "time_budget";
      return finish(PlanStatus::exhausted);
    }
    std::size_t current = frontier.front();
    frontier.pop_front();
    ++stats.expanded;

    FactSet base = merge(fixed, nodes[current].fluents);
    auto model = domain.model(base);
    if (FactView(base, model->derived).query(goal).holds()) {
      for (std::ptrdiff_t i = static_cast<std::ptrdiff_t>(current); nodes[static_cast<std::size_t>(i)].parent >= 0;
           i = nodes[static_cast<std::size_t>(i)].parent) {
        result.plan.steps.push_back(nodes[static_cast<std::size_t>(i)].via);
      }
      std::reverse(result.plan.steps.begin(), result.plan.steps.end());
      result.plan.proven_minimal = true;
      return finish(PlanStatus::solved);
    }

    bool at_limit = nodes[current].depth >= config.max_depth;
    for (GroundAction& a : ground_applicable(base, *model, domain.schemas())) {
      FactSet next = apply_action(nodes[current].fluents, a);
      ++stats.generated;
      nodes.push_back({std::move(next), static_cast<std::ptrdiff_t>(current), nodes[current].depth + 1, std::move(a)});
      std::size_t id = nodes.size() - 1;
      if (visited.contains(id)) {
        ++stats.duplicates_pruned;
        nodes.pop_back();
        continue;
      }
      if (at_limit) {
        // A new state lies beyond the depth bound: the space was not exhausted.
        truncated = true;
        nodes.pop_back();
        continue;
      }
      visited.insert(id);
      frontier.push_back(id);
    }
    stats.max_frontier = std::max(stats.max_frontier, frontier.size());
  }
  if (truncated) {
    result.exhausted_reason = "max_depth";
    return finish(PlanStatus::exhausted);
  }
  return finish(PlanStatus::unsolvable);
}

ReplanResult replan(const PlanningDomain& domain, const FactSet& current, std::span<const GroundAction> remaining,
                    std::span<const Literal> goal, const PlannerConfig& config) {
  ReplanResult out;
  out.validation = validate_plan(current, domain.rules(), domain.schemas(), remaining, goal);
  if (out.validation.valid) {
    out.status = ReplanStatus::keep_plan;
    return out;
  }
  out.search = plan(domain, current, goal, config);
  switch (out.search.status) {
    case PlanStatus::solved: out.status = ReplanStatus::new_plan; break;
    case PlanStatus::unsolvable: out.status = ReplanStatus::unsolvable; break;
    case PlanStatus::exhausted: out.status = ReplanStatus::exhausted; break;
  }
  return out;
}

}  // namespace rescueplan
