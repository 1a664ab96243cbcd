#include "rescueplan/inference.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <unordered_map>
#include <unordered_set>

namespace rescueplan {

namespace detail {

namespace {

struct Slot {
  enum class Kind { constant, variable, anonymous } kind;
  Term value = Term::anonymous();
  int var = -1;
};

struct Pattern {
  PredicateKey key;
  std::string predicate;
  std::vector<Slot> slots;
  bool has_anonymous = false;
};

struct Step {
  Pattern pattern;
  bool negated = false;
};

using Frame = std::vector<const Term*>;
using Rows = std::array<std::span<const Atom>, 2>;

class VarTable {
 public:
  int index(const std::string& name) {
    auto [it, inserted] = ids_.emplace(name, static_cast<int>(names_.size()));
    if (inserted) names_.push_back(name);
    return it->second;
  }
  int find(const std::string& name) const {
    auto it = ids_.find(name);
    return it == ids_.end() ? -1 : it->second;
  }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::map<std::string, int> ids_;
  std::vector<std::string> names_;
};

Pattern compile_atom(const Atom& a, VarTable& vars) {
  Pattern p;
  p.key = a.key();
  p.predicate = a.predicate;
  for (const Term& t : a.args) {
    Slot s{Slot::Kind::constant};
    if (t.is_variable()) {
      s.kind = Slot::Kind::variable;
      s.var = vars.index(t.name());
    } else if (t.is_anonymous()) {
      s.kind = Slot::Kind::anonymous;
      p.has_anonymous = true;
    } else {
      s.value = t;
    }
    p.slots.push_back(std::move(s));
  }
  return p;
}

bool match(const Pattern& p, const Atom& fact, Frame& frame, std::vector<int>& trail) {
  std::size_t mark = trail.size();
  for (std::size_t i = 0; i < p.slots.size(); ++i) {
    const Slot& s = p.slots[i];
    const Term& arg = fact.args[i];
    bool ok = true;
    switch (s.kind) {
      case Slot::Kind::constant: ok = s.value == arg; break;
      case Slot::Kind::anonymous: break;
      case Slot::Kind::variable:
        if (frame[s.var]) {
          ok = *frame[s.var] == arg;
        } else {
          frame[s.var] = &arg;
          trail.push_back(s.var);
        }
        break;
    }
    if (!ok) {
      while (trail.size() > mark) {
        frame[trail.back()] = nullptr;
        trail.pop_back();
      }
      return false;
    }
  }
  return true;
}

void undo(Frame& frame, std::vector<int>& trail, std::size_t mark) {
  while (trail.size() > mark) {
    frame[trail.back()] = nullptr;
    trail.pop_back();
  }
}

Atom instantiate(const Pattern& p, const Frame& frame) {
  Atom a{p.predicate, {}};
  a.args.reserve(p.slots.size());
  for (const Slot& s : p.slots) {
    a.args.push_back(s.kind == Slot::Kind::constant ? s.value : *frame[s.var]);
  }
  return a;
}

class Source {
 public:
  virtual ~Source() = default;
  virtual Rows rows(const PredicateKey& key) const = 0;
  virtual Rows delta_rows(const PredicateKey& key) const { return rows(key); }
  virtual bool contains(const Atom& ground) const = 0;
};

bool any_match(const Pattern& p, Frame& frame, const Source& src) {
  if (!p.has_anonymous) return src.contains(instantiate(p, frame));
  std::vector<int> trail;
  for (std::span<const Atom> part : src.rows(p.key)) {
    for (const Atom& a : part) {
      if (match(p, a, frame, trail)) {
        undo(frame, trail, 0);
        return true;
      }
    }
  }
  return false;
}

// Depth-first join over `steps`; `delta_step` (if any) reads delta rows.
void join(const std::vector<Step>& steps, std::size_t i, Frame& frame, std::vector<int>& trail,
          const Source& src, std::ptrdiff_t delta_step, const std::function<void(const Frame&)>& emit) {
  if (i == steps.size()) {
    emit(frame);
    return;
  }
  const Step& step = steps[i];
  if (step.negated) {
    if (!any_match(step.pattern, frame, src)) join(steps, i + 1, frame, trail, src, delta_step, emit);
    return;
  }
  Rows rows = static_cast<std::ptrdiff_t>(i) == delta_step ? src.delta_rows(step.pattern.key)
                                                          : src.rows(step.pattern.key);
  for (std::span<const Atom> part : rows) {
    for (const Atom& a : part) {
      std::size_t mark = trail.size();
      if (match(step.pattern, a, frame, trail)) {
        join(steps, i + 1, frame, trail, src, delta_step, emit);
        undo(frame, trail, mark);
      }
    }
  }
}

}  // namespace

struct CompiledRule {
  Pattern head;
  std::vector<Step> steps;
  std::size_t var_count = 0;
};

struct CompiledRules {
  std::vector<CompiledRule> rules;
  std::vector<std::vector<std::size_t>> by_stratum;
  std::vector<int> head_level;
};

namespace {

// Positive literals in written order; each negated literal runs as soon as
// its variables are bound.
CompiledRule compile_rule(const Rule& r) {
  VarTable vars;
  CompiledRule out;
  out.head = compile_atom(r.head, vars);
  std::vector<const Literal*> pending;
  std::set<std::string> bound;
  auto flush = [&] {
    for (auto it = pending.begin(); it != pending.end();) {
      bool ready = true;
      for (const std::string& v : variables_of((*it)->atom)) ready = ready && bound.contains(v);
      if (ready) {
        out.steps.push_back({compile_atom((*it)->atom, vars), true});
        it = pending.erase(it);
      } else {
        ++it;
      }
    }
  };
  for (const Literal& l : r.body) {
    if (l.negated) {
      pending.push_back(&l);
    } else {
      out.steps.push_back({compile_atom(l.atom, vars), false});
      bound.merge(variables_of(l.atom));
    }
    flush();
  }
  flush();
  out.var_count = vars.names().size();
  return out;
}

struct AtomHash {
  std::size_t operator()(const Atom& a) const noexcept { return static_cast<std::size_t>(atom_digest(a)); }
};

struct Relation {
  std::vector<Atom> rows;
  std::unordered_set<Atom, AtomHash> members;
  std::size_t delta_lo = 0;
  std::size_t delta_hi = 0;
};

class Database : public Source {
 public:
  Relation& relation(const PredicateKey& key) { return rels_[key]; }

  Rows rows(const PredicateKey& key) const override {
    auto it = rels_.find(key);
    if (it == rels_.end()) return {};
    return {std::span<const Atom>(it->second.rows), {}};
  }
  Rows delta_rows(const PredicateKey& key) const override {
    auto it = rels_.find(key);
    if (it == rels_.end()) return {};
    const Relation& r = it->second;
    return {std::span<const Atom>(r.rows).subspan(r.delta_lo, r.delta_hi - r.delta_lo), {}};
  }
  bool contains(const Atom& ground) const override {
    auto it = rels_.find(ground.key());
    return it != rels_.end() && it->second.members.contains(ground);
  }

 private:
  std::map<PredicateKey, Relation> rels_;
};

class ViewSource : public Source {
 public:
  explicit ViewSource(const FactView& view) : view_(view) {}
  Rows rows(const PredicateKey& key) const override { return view_.rows(key); }
  bool contains(const Atom& ground) const override { return view_.contains(ground); }

 private:
  const FactView& view_;
};

}  // namespace
}  // namespace detail

// --- stratification --------------------------------------------------------

int Stratification::height() const {
  int h = 0;
  for (const auto& [key, lvl] : level) h = std::max(h, lvl + 1);
  return h;
}

std::vector<Stratum> Stratification::strata() const {
  std::vector<Stratum> out(static_cast<std::size_t>(height()));
  for (const auto& [key, lvl] : level) out[static_cast<std::size_t>(lvl)].push_back(key);
  return out;
}

namespace {

struct DepEdge {
  std::size_t from;  // body predicate
  std::size_t to;    // head predicate
  bool negative;
};

// Tarjan SCC; returns component id per node.
std::vector<int> components(std::size_t n, const std::vector<std::vector<std::size_t>>& adj) {
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  int counter = 0, ncomp = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (std::size_t w : adj[v]) {
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      for (;;) {
        std::size_t w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        comp[w] = ncomp;
        if (w == v) break;
      }
      ++ncomp;
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] < 0) visit(v);
  }
  return comp;
}

}  // namespace

Stratification stratify(std::span<const Rule> rules) {
  std::map<PredicateKey, std::size_t> ids;
  std::vector<PredicateKey> keys;
  auto id = [&](const PredicateKey& k) {
    auto [it, inserted] = ids.emplace(k, keys.size());
    if (inserted) keys.push_back(k);
    return it->second;
  };
  std::vector<DepEdge> edges;
  for (const Rule& r : rules) {
    std::size_t h = id(r.head.key());
    for (const Literal& l : r.body) edges.push_back({id(l.atom.key()), h, l.negated});
  }
  std::size_t n = keys.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (const DepEdge& e : edges) adj[e.from].push_back(e.to);
  std::vector<int> comp = components(n, adj);

  for (const DepEdge& e : edges) {
    if (!e.negative || comp[e.from] != comp[e.to]) continue;
    // Path head -> ... -> body inside the component closes the cycle.
    std::vector<std::ptrdiff_t> parent(n, -1);
    std::deque<std::size_t> queue{e.to};
    parent[e.to] = static_cast<std::ptrdiff_t>(e.to);
    while (!queue.empty() && parent[e.from] < 0) {
      std::size_t v = queue.front();
      queue.pop_front();
      for (std::size_t w : adj[v]) {
        if (comp[w] == comp[e.to] && parent[w] < 0) {
          parent[w] = static_cast<std::ptrdiff_t>(v);
          queue.push_back(w);
        }
      }
    }
    std::vector<std::size_t> path{e.from};
    for (std::size_t v = e.from; v != e.to;) {
      v = static_cast<std::size_t>(parent[v]);
      path.push_back(v);
    }
    // path: body ... head; print as dependencies "head :- body".
    std::string msg = "negative cycle: " + keys[e.to].str() + " :- not " + keys[e.from].str();
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      msg += "; " + keys[path[i]].str() + " :- " + keys[path[i + 1]].str();
    }
    throw Error(ErrorKind::not_stratifiable, msg);
  }

  std::vector<int> level(n, 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (const DepEdge& e : edges) {
      int need = level[e.from] + (e.negative ? 1 : 0);
      if (level[e.to] < need) {
        level[e.to] = need;
        changed = true;
      }
    }
  }
  Stratification s;
  for (std::size_t i = 0; i < n; ++i) s.level.emplace(keys[i], level[i]);
  return s;
}

// --- evaluation ------------------------------------------------------------

RuleProgram::RuleProgram(std::vector<Rule> rules) : rules_(std::move(rules)) {
  for (const Rule& r : rules_) check_rule_safety(r);
  strat_ = stratify(rules_);
  auto compiled = std::make_shared<detail::CompiledRules>();
  compiled->by_stratum.resize(static_cast<std::size_t>(strat_.height()));
  for (std::size_t i = 0; i < rules_.size(); ++i) {
    heads_.insert(rules_[i].head.key());
    compiled->rules.push_back(detail::compile_rule(rules_[i]));
    int lvl = strat_.level.at(rules_[i].head.key());
    compiled->head_level.push_back(lvl);
    compiled->by_stratum[static_cast<std::size_t>(lvl)].push_back(i);
  }
  compiled_ = std::move(compiled);
}

DerivedModel RuleProgram::evaluate(const FactSet& base) const {
  DerivedModel model;
  model.strata_order = strat_.strata();
  if (!compiled_) return model;

  detail::Database db;
  for (const Atom& a : base) {
    detail::Relation& r = db.relation(a.key());
    if (r.members.insert(a).second) r.rows.push_back(a);
  }
  for (const PredicateKey& k : heads_) db.relation(k);

  const auto& rules = compiled_->rules;
  for (std::size_t s = 0; s < compiled_->by_stratum.size(); ++s) {
    const auto& ids = compiled_->by_stratum[s];
    if (ids.empty()) continue;

    std::vector<Atom> fresh;
    auto run = [&](const detail::CompiledRule& cr, std::ptrdiff_t delta_step) {
      detail::Frame frame(cr.var_count, nullptr);
      std::vector<int> trail;
      detail::join(cr.steps, 0, frame, trail, db, delta_step, [&](const detail::Frame& f) {
        Atom a = detail::instantiate(cr.head, f);
        if (!db.contains(a)) fresh.push_back(std::move(a));
      });
    };
    // Appends fresh atoms; returns true if anything new arrived.
    auto commit = [&] {
      std::set<PredicateKey> touched;
      for (const PredicateKey& k : heads_) {
        if (strat_.level.at(k) == static_cast<int>(s)) {
          detail::Relation& r = db.relation(k);
          r.delta_lo = r.delta_hi = r.rows.size();
        }
      }
      bool any = false;
      for (Atom& a : fresh) {
        detail::Relation& r = db.relation(a.key());
        if (r.members.insert(a).second) {
          r.rows.push_back(std::move(a));
          r.delta_hi = r.rows.size();
          any = true;
        }
      }
      fresh.clear();
      return any;
    };

    for (std::size_t id : ids) run(rules[id], -1);
    bool more = commit();
    while (more) {
      for (std::size_t id : ids) {
        const auto& cr = rules[id];
        for (std::size_t i = 0; i < cr.steps.size(); ++i) {
          const auto& step = cr.steps[i];
          if (step.negated || !heads_.contains(step.pattern.key)) continue;
          if (strat_.level.at(step.pattern.key) != static_cast<int>(s)) continue;
          run(cr, static_cast<std::ptrdiff_t>(i));
        }
      }
      more = commit();
    }
  }

  std::vector<Atom> derived;
  for (const PredicateKey& k : heads_) {
    for (std::span<const Atom> part : db.rows(k)) derived.insert(derived.end(), part.begin(), part.end());
  }
  model.derived = FactSet(std::move(derived));
  return model;
}

DerivedModel evaluate(const FactSet& base, std::span<const Rule> rules) {
  return RuleProgram(std::vector<Rule>(rules.begin(), rules.end())).evaluate(base);
}

// --- queries ---------------------------------------------------------------

bool FactView::contains(const Atom& ground) const {
  return base_->contains(ground) || derived_->contains(ground);
}

std::array<std::span<const Atom>, 2> FactView::rows(const PredicateKey& key) const {
  return {base_->range(key), derived_->range(key)};
}

std::vector<Term> FactView::constants() const {
  std::set<Term> out;
  for (const FactSet* s : {base_, derived_}) {
    for (const Atom& a : *s) out.insert(a.args.begin(), a.args.end());
  }
  return {out.begin(), out.end()};
}

void check_query_safety(std::span<const Literal> goal, const std::set<std::string>& prebound) {
  std::set<std::string> bound = prebound;
  for (const Literal& l : goal) {
    if (l.negated) {
      for (const std::string& v : variables_of(l.atom)) {
        if (!bound.contains(v)) {
          throw Error(ErrorKind::unsafe_query, "variable " + v + " in '" + to_string(l) +
                                                   "' is not bound by a positive literal to its left");
        }
      }
    } else {
      bound.merge(variables_of(l.atom));
    }
  }
}

QueryResult FactView::query(std::span<const Literal> goal, const Substitution& initial) const {
  std::set<std::string> prebound;
  for (const auto& [name, value] : initial.bindings()) prebound.insert(name);
  check_query_safety(goal, prebound);

  detail::VarTable vars;
  for (const std::string& name : prebound) vars.index(name);
  std::vector<detail::Step> steps;
  for (const Literal& l : goal) {
    Literal resolved = initial.apply(l);
    steps.push_back({detail::compile_atom(resolved.atom, vars), l.negated});
  }
  detail::Frame frame(vars.names().size(), nullptr);
  for (const auto& [name, value] : initial.bindings()) frame[static_cast<std::size_t>(vars.find(name))] = &value;

  std::set<Substitution> answers;
  std::vector<int> trail;
  detail::ViewSource src(*this);
  detail::join(steps, 0, frame, trail, src, -1, [&](const detail::Frame& f) {
    Substitution s;
    for (std::size_t i = 0; i < f.size(); ++i) {
      if (f[i]) s.bind(vars.names()[i], *f[i]);
    }
    answers.insert(std::move(s));
  });

  QueryResult result;
  result.answers.assign(answers.begin(), answers.end());
  result.grounded = variables_of(goal).empty();
  return result;
}

std::size_t FactView::satisfiable_prefix(std::span<const Literal> goal, const Substitution& initial) const {
  for (std::size_t k = 1; k <= goal.size(); ++k) {
    if (!query(goal.first(k), initial).holds()) return k - 1;
  }
  return goal.size();
}

QueryResult query(const FactSet& base, const DerivedModel& model, std::span<const Literal> goal) {
  return FactView(base, model.derived).query(goal);
}

}  // namespace rescueplan
