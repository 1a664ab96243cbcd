#include "rescueplan/world.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>

#include "rescueplan/syntax.hpp"

namespace rescueplan {

std::string_view to_string(ResourceKind k) { return k == ResourceKind::crane ? "crane" : "truck"; }

std::string_view to_string(EventOp op) { return op == EventOp::assert_fact ? "assert" : "retract"; }

// --- CSV -------------------------------------------------------------------

namespace {

using Record = std::vector<std::string>;

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void table_error(std::string_view table, std::size_t line, const std::string& msg) {
  throw Error(ErrorKind::invalid_table, std::string(table) + " line " + std::to_string(line) + ": " + msg);
}

// Returns (line number, fields) for each non-blank line.
std::vector<std::pair<std::size_t, Record>> split_csv(std::string_view text, std::string_view table) {
  std::vector<std::pair<std::size_t, Record>> out;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    Record rec;
    std::string field;
    bool quoted_field = false;
    std::size_t start_line = line;
    for (;;) {
      if (i >= text.size() || text[i] == '\n') {
        rec.push_back(quoted_field ? field : trim(field));
        if (i < text.size()) ++i;
        ++line;
        break;
      }
      char c = text[i];
      if (c == '"' && trim(field).empty()) {
        field.clear();
        quoted_field = true;
        ++i;
        for (;;) {
          if (i >= text.size()) table_error(table, start_line, "unterminated quoted field");
          if (text[i] == '"') {
            if (i + 1 < text.size() && text[i + 1] == '"') {
              field += '"';
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (text[i] == '\n') ++line;
          field += text[i++];
        }
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r')) ++i;
        if (i < text.size() && text[i] != ',' && text[i] != '\n') {
          table_error(table, start_line, "text after closing quote");
        }
        continue;
      }
      if (c == ',') {
        rec.push_back(quoted_field ? field : trim(field));
        field.clear();
        quoted_field = false;
        ++i;
        continue;
      }
      field += c;
      ++i;
    }
    bool blank = rec.size() == 1 && rec[0].empty();
    if (!blank) out.emplace_back(start_line, std::move(rec));
  }
  return out;
}

std::vector<std::pair<std::size_t, Record>> read_table(std::string_view text, std::string_view table,
                                                       const std::vector<std::string>& header) {
  auto rows = split_csv(text, table);
  if (rows.empty()) table_error(table, 1, "missing header row");
  std::string expected;
  for (const auto& h : header) expected += (expected.empty() ? "" : ",") + h;
  if (rows.front().second != header) table_error(table, rows.front().first, "header must be '" + expected + "'");
  rows.erase(rows.begin());
  for (const auto& [line, rec] : rows) {
    if (rec.size() != header.size()) {
      table_error(table, line, "expected " + std::to_string(header.size()) + " fields, found " +
                                   std::to_string(rec.size()));
    }
  }
  return rows;
}

double number_field(const std::string& s, std::string_view table, std::size_t line) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    table_error(table, line, "not a number: '" + s + "'");
  }
  return v;
}

}  // namespace

std::vector<RegionRow> read_regions_csv(std::string_view text) {
  std::vector<RegionRow> out;
  for (const auto& [line, rec] : read_table(text, "regions.csv", {"name", "x", "y"})) {
    out.push_back({rec[0], number_field(rec[1], "regions.csv", line), number_field(rec[2], "regions.csv", line)});
  }
  return out;
}

std::vector<RoadRow> read_roads_csv(std::string_view text) {
  std::vector<RoadRow> out;
  for (const auto& [line, rec] : read_table(text, "roads.csv", {"x1", "y1", "x2", "y2"})) {
    out.push_back({number_field(rec[0], "roads.csv", line), number_field(rec[1], "roads.csv", line),
                   number_field(rec[2], "roads.csv", line), number_field(rec[3], "roads.csv", line)});
  }
  return out;
}

std::vector<ObjectRow> read_objects_csv(std::string_view text) {
  std::vector<ObjectRow> out;
  for (const auto& [line, rec] : read_table(text, "objects.csv", {"id", "kind", "subtype", "x", "y"})) {
    out.push_back({rec[0], rec[1], rec[2], number_field(rec[3], "objects.csv", line),
                   number_field(rec[4], "objects.csv", line)});
  }
  return out;
}

// --- ingestion -------------------------------------------------------------

namespace {

void require_finite(double v, const std::string& what) {
  if (!std::isfinite(v)) throw Error(ErrorKind::non_finite_coordinate, "non-finite coordinate in " + what);
}

std::string fmt_point(double x, double y) {
  auto num = [](double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
  };
  return "(" + num(x) + "," + num(y) + ")";
}

Atom fact(std::string predicate, std::vector<Term> args) { return Atom{std::move(predicate), std::move(args)}; }

}  // namespace

IngestResult ingest_site(std::span<const RegionRow> regions, std::span<const RoadRow> roads,
                         std::span<const ObjectRow> objects) {
  if (regions.empty()) throw Error(ErrorKind::empty_regions_table, "regions table is empty");

  std::vector<RegionRow> sorted(regions.begin(), regions.end());
  std::sort(sorted.begin(), sorted.end(), [](const RegionRow& a, const RegionRow& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const RegionRow& r = sorted[i];
    if (r.name.empty()) throw Error(ErrorKind::invalid_table, "region with empty name");
    require_finite(r.x, "region '" + r.name + "'");
    require_finite(r.y, "region '" + r.name + "'");
    if (i > 0 && sorted[i - 1].name == r.name) {
      throw Error(ErrorKind::invalid_table, "duplicate region name '" + r.name + "'");
    }
  }
  for (const RoadRow& r : roads) {
    for (double v : {r.x1, r.y1, r.x2, r.y2}) require_finite(v, "roads table");
  }
  for (const ObjectRow& o : objects) {
    require_finite(o.x, "object '" + o.id + "'");
    require_finite(o.y, "object '" + o.id + "'");
  }

  // Regions are sorted by name, so a strict '<' keeps the smaller name on ties.
  auto snap = [&](double x, double y) -> const std::string& {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      double dx = sorted[i].x - x, dy = sorted[i].y - y;
      double d = dx * dx + dy * dy;
      if (d < best_d) {
        best_d = d;
        best = i;
      }
    }
    return sorted[best].name;
  };

  IngestResult out;
  std::vector<std::string> warnings;
  for (const RegionRow& r : sorted) {
    out.program.facts.push_back(fact("node", {Term::constant(r.name)}));
    out.graph.nodes.push_back({r.name, r.x, r.y});
  }

  // unordered pair -> (orientations seen, road count)
  std::map<std::pair<std::string, std::string>, std::pair<std::set<std::pair<std::string, std::string>>, int>> links;
  for (const RoadRow& r : roads) {
    const std::string& a = snap(r.x1, r.y1);
    const std::string& b = snap(r.x2, r.y2);
    if (a == b) {
      warnings.push_back("road " + fmt_point(r.x1, r.y1) + "-" + fmt_point(r.x2, r.y2) +
                         " has both ends in region '" + a + "'; dropped");
      continue;
    }
    auto& entry = links[std::minmax(a, b)];
    entry.first.emplace(a, b);
    ++entry.second;
  }
  std::vector<Atom> link_facts;
  for (const auto& [pair, entry] : links) {
    const auto& [orientations, count] = entry;
    // Both orientations seen: keep the lexicographically smaller one.
    const auto& chosen = orientations.size() == 1 ? *orientations.begin() : pair;
    link_facts.push_back(fact("link", {Term::constant(chosen.first), Term::constant(chosen.second)}));
    out.graph.edges.push_back({chosen.first, chosen.second});
    if (count > 1) {
      warnings.push_back(std::to_string(count) + " roads between '" + pair.first + "' and '" + pair.second +
                         "' collapsed into one link");
    }
  }
  std::sort(link_facts.begin(), link_facts.end());
  out.program.facts.insert(out.program.facts.end(), link_facts.begin(), link_facts.end());

  std::vector<ObjectRow> objs(objects.begin(), objects.end());
  std::sort(objs.begin(), objs.end(), [](const ObjectRow& a, const ObjectRow& b) { return a.id < b.id; });
  std::vector<Atom> kind_facts, at_facts;
  for (std::size_t i = 0; i < objs.size(); ++i) {
    const ObjectRow& o = objs[i];
    if (o.id.empty()) throw Error(ErrorKind::invalid_table, "object with empty id");
    if (i > 0 && objs[i - 1].id == o.id) throw Error(ErrorKind::invalid_table, "duplicate object id '" + o.id + "'");
    ResourceKind kind;
    if (o.kind == "crane") {
      kind = ResourceKind::crane;
    } else if (o.kind == "truck") {
      kind = ResourceKind::truck;
    } else {
      throw Error(ErrorKind::unknown_object_kind, "object '" + o.id + "' has unknown kind '" + o.kind +
                                                      "' (expected crane or truck)");
    }
    const std::string& where = snap(o.x, o.y);
    kind_facts.push_back(fact(o.kind, {Term::constant(o.id), Term::constant(o.subtype)}));
    at_facts.push_back(fact("at", {Term::constant(o.id), Term::constant(where)}));
    out.resources.push_back({o.id, kind, o.subtype, where});
  }
  std::sort(kind_facts.begin(), kind_facts.end());
  std::sort(at_facts.begin(), at_facts.end());
  out.program.facts.insert(out.program.facts.end(), kind_facts.begin(), kind_facts.end());
  out.program.facts.insert(out.program.facts.end(), at_facts.begin(), at_facts.end());

  for (const RegionRow& r : sorted) {
    out.program.facts.push_back(fact(std::string(kNodeXyPredicate),
                                     {Term::constant(r.name), Term::number(std::llround(r.x * kCoordinateScale)),
                                      Term::number(std::llround(r.y * kCoordinateScale))}));
  }

  std::sort(warnings.begin(), warnings.end());
  out.warnings = std::move(warnings);
  return out;
}

SiteGraph graph_from_facts(const FactSet& facts) {
  SiteGraph g;
  std::map<std::string, std::pair<double, double>> xy;
  for (const Atom& a : facts.range({std::string(kNodeXyPredicate), 3})) {
    if (a.args[0].kind() == TermKind::constant && a.args[1].kind() == TermKind::number &&
        a.args[2].kind() == TermKind::number) {
      xy[a.args[0].name()] = {static_cast<double>(a.args[1].value()) / kCoordinateScale,
                              static_cast<double>(a.args[2].value()) / kCoordinateScale};
    }
  }
  for (const Atom& a : facts.range({"node", 1})) {
    SiteNode n{a.args[0].name(), 0, 0};
    if (auto it = xy.find(n.name); it != xy.end()) std::tie(n.x, n.y) = it->second;
    g.nodes.push_back(std::move(n));
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const Atom& a : facts.range({"link", 2})) {
    const std::string& x = a.args[0].name();
    const std::string& y = a.args[1].name();
    if (seen.insert(std::minmax(x, y)).second) g.edges.push_back({x, y});
  }
  return g;
}

// --- events ----------------------------------------------------------------

EventOutcome apply_event(const FactSet& state, const EventRecord& e) {
  EventOutcome out{state, false};
  out.changed = e.op == EventOp::assert_fact ? out.state.insert(e.fact) : out.state.erase(e.fact);
  return out;
}

std::vector<EventRecord> parse_events(std::string_view text, std::string_view source) {
  using syntax::Node;
  std::vector<EventRecord> out;
  for (const syntax::Clause& c : syntax::read_clauses(text, source)) {
    const Node& h = c.head;
    if (!c.body.empty() || h.kind != Node::Kind::compound || h.text != "event" || h.children.size() != 3) {
      syntax::fail(h, "expected event(Time, assert|retract, Fact).");
    }
    const Node& t = h.children[0];
    const Node& op = h.children[1];
    if (t.kind != Node::Kind::number || t.number < 0) syntax::fail(t, "event time must be a non-negative integer");
    EventRecord e;
    e.timestamp = t.number;
    if (op.kind == Node::Kind::constant && !op.quoted && op.text == "assert") {
      e.op = EventOp::assert_fact;
    } else if (op.kind == Node::Kind::constant && !op.quoted && op.text == "retract") {
      e.op = EventOp::retract_fact;
    } else {
      syntax::fail(op, "event operation must be assert or retract");
    }
    e.fact = syntax::to_atom(h.children[2]);
    if (!e.fact.is_ground()) syntax::fail(h.children[2], "event fact must be ground: " + to_string(e.fact));
    out.push_back(std::move(e));
  }
  return out;
}

std::string to_string(const EventRecord& e) {
  return "event(" + std::to_string(e.timestamp) + "," + std::string(to_string(e.op)) + "," + to_string(e.fact) + ").";
}

Snapshot snapshot(const FactSet& state) {
  return {std::vector<Atom>(state.begin(), state.end()), state.hash()};
}

}  // namespace rescueplan
