#pragma once

// Site graph ingestion from 2-D map tables, observatory event records, and
// canonical snapshots of the live fact state.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rescueplan/fact_set.hpp"
#include "rescueplan/kb.hpp"

namespace rescueplan {

// Node coordinates travel through fact files as
// node_xy(Name, XMilli, YMilli), in thousandths of a map unit.
inline constexpr std::string_view kNodeXyPredicate = "node_xy";
inline constexpr double kCoordinateScale = 1000.0;

struct SiteNode {
  std::string name;
  double x = 0;
  double y = 0;
};

struct SiteEdge {
  std::string a;
  std::string b;
};

struct SiteGraph {
  std::vector<SiteNode> nodes;
  std::vector<SiteEdge> edges;  // unordered pairs, one entry each
};

enum class ResourceKind { crane, truck };

std::string_view to_string(ResourceKind k);

struct ResourceRecord {
  std::string id;
  ResourceKind kind = ResourceKind::crane;
  std::string subtype;
  std::string location;
};

// --- input tables ----------------------------------------------------------

struct RegionRow {
  std::string name;
  double x = 0;
  double y = 0;
};

struct RoadRow {
  double x1 = 0, y1 = 0, x2 = 0, y2 = 0;
};

struct ObjectRow {
  std::string id;
  std::string kind;
  std::string subtype;
  double x = 0;
  double y = 0;
};

// CSV readers. A header row with exactly the documented column names is
// required; fields may be double-quoted. Throw Error(invalid_table).
std::vector<RegionRow> read_regions_csv(std::string_view text);  // name,x,y
std::vector<RoadRow> read_roads_csv(std::string_view text);      // x1,y1,x2,y2
std::vector<ObjectRow> read_objects_csv(std::string_view text);  // id,kind,subtype,x,y

struct IngestResult {
  Program program;  // node/1, link/2, crane/2, truck/2, at/2, node_xy/3 facts
  SiteGraph graph;
  std::vector<ResourceRecord> resources;
  std::vector<std::string> warnings;
};

// Snaps road endpoints and objects to the nearest region centroid (ties go
// to the lexicographically smaller name). Output does not depend on row order.
IngestResult ingest_site(std::span<const RegionRow> regions, std::span<const RoadRow> roads,
                         std::span<const ObjectRow> objects);

// Reconstructs the graph from node/1, link/2 and node_xy/3 facts.
SiteGraph graph_from_facts(const FactSet& facts);

// --- events ----------------------------------------------------------------

enum class EventOp { assert_fact, retract_fact };

std::string_view to_string(EventOp op);

struct EventRecord {
  std::int64_t timestamp = 0;  // minutes since scenario start
  EventOp op = EventOp::assert_fact;
  Atom fact;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EventOutcome {
  FactSet state;
  bool changed = false;
};

EventOutcome apply_event(const FactSet& state, const EventRecord& e);

// Clauses `event(T, assert|retract, Fact).`
std::vector<EventRecord> parse_events(std::string_view text, std::string_view source = "<events>");
std::string to_string(const EventRecord& e);  // one clause, no newline

// --- snapshots -------------------------------------------------------------

struct Snapshot {
  std::vector<Atom> facts;  // canonical order
  std::uint64_t hash = 0;
};

Snapshot snapshot(const FactSet& state);

}  // namespace rescueplan
