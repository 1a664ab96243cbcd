#include "rescueplan/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <csignal>
#include <fstream>
#include <pthread.h>
#include <set>
#include <sstream>
#include <thread>

#include "rescueplan/service.hpp"
#include "rescueplan/session.hpp"
#include "rescueplan/world.hpp"

namespace rescueplan::cli {

namespace {

std::string read_file(const std::string& path, std::string_view flag) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, std::string(flag) + ": cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Loads the bundle and applies its recorded events, if any.
Session open_scenario(const std::string& dir) {
  Session s = Session::load(ScenarioBundle::from_directory(dir));
  for (const EventRecord& e : s.bundle_events()) s.post_event(e);
  return s;
}

std::vector<EventRecord> sorted_events(std::vector<EventRecord> events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const EventRecord& a, const EventRecord& b) { return a.timestamp < b.timestamp; });
  return events;
}

std::vector<Literal> goal_or_default(const Session& s, const std::string& text) {
  if (!text.empty()) return parse_goal(text, "--goal");
  if (s.bundle_goal()) return *s.bundle_goal();
  throw Error(ErrorKind::invalid_argument, "--goal is required (scenario has no goal.facts)");
}

struct PlanFlags {
  std::size_t max_depth = PlannerConfig{}.max_depth;
  std::size_t max_expansions = PlannerConfig{}.max_expansions;
  long long timeout_ms = PlannerConfig{}.time_budget.count();

  PlannerConfig config() const {
    PlannerConfig c;
    c.max_depth = max_depth;
    c.max_expansions = max_expansions;
    c.time_budget = std::chrono::milliseconds(timeout_ms);
    return c;
  }
};

void add_plan_flags(CLI::App* cmd, PlanFlags& f) {
  cmd->add_option("--max-depth", f.max_depth, "Longest plan considered")->check(CLI::PositiveNumber);
  cmd->add_option("--max-expansions", f.max_expansions, "Search node budget")->check(CLI::PositiveNumber);
  cmd->add_option("--timeout", f.timeout_ms, "Search time budget in milliseconds")->check(CLI::PositiveNumber);
}

int exit_for(PlanStatus s) {
  switch (s) {
    case PlanStatus::solved: return kSuccess;
    case PlanStatus::unsolvable: return kUnsolvable;
    case PlanStatus::exhausted: return kExhausted;
  }
  return kUsage;
}

void print_steps(std::ostream& out, const std::vector<GroundAction>& steps, std::string_view indent = "") {
  for (std::size_t i = 0; i < steps.size(); ++i) out << indent << (i + 1) << ". " << to_string(steps[i]) << '\n';
}

// --- subcommands -----------------------------------------------------------

int cmd_ingest(const std::string& regions, const std::string& roads, const std::string& objects,
               const std::string& out_path, std::ostream& out, std::ostream& err) {
  std::string regions_text = read_file(regions, "--regions");
  std::string roads_text = read_file(roads, "--roads");
  std::string objects_text = read_file(objects, "--objects");
  auto result = ingest_site(read_regions_csv(regions_text), read_roads_csv(roads_text), read_objects_csv(objects_text));
  for (const std::string& w : result.warnings) err << "warning: " << w << '\n';
  std::ofstream file(out_path, std::ios::binary);
  if (!file) throw Error(ErrorKind::io, "--out: cannot write '" + out_path + "'");
  file << "% Site graph generated by rescueplan ingest.\n" << format_program(result.program);
  file.close();
  if (!file) throw Error(ErrorKind::io, "--out: write failed for '" + out_path + "'");
  out << "wrote " << result.program.facts.size() << " facts (" << result.graph.nodes.size() << " nodes, "
      << result.graph.edges.size() << " links, " << result.resources.size() << " resources)\n";
  return kSuccess;
}

int cmd_query(const std::string& scenario, const std::string& text, std::ostream& out) {
  Session s = open_scenario(scenario);
  std::vector<Literal> goal = parse_literals(text, "--query");
  auto model = s.derived();
  QueryResult r = FactView(s.facts(), model->derived).query(goal);
  std::set<std::string> vars = variables_of(goal);
  std::vector<std::string> lines;
  for (const Substitution& a : r.answers) lines.push_back(a.restricted(vars).str());
  std::sort(lines.begin(), lines.end());
  lines.erase(std::unique(lines.begin(), lines.end()), lines.end());
  for (const std::string& l : lines) out << l << '\n';
  out << "answers: " << lines.size() << '\n';
  return kSuccess;
}

int cmd_plan(const std::string& scenario, const std::string& goal_text, const std::string& events_path,
             const PlanFlags& flags, std::ostream& out) {
  Session s = open_scenario(scenario);
  if (!events_path.empty()) {
    for (const EventRecord& e : sorted_events(parse_events(read_file(events_path, "--events"), events_path))) {
      s.post_event(e);
    }
  }
  std::vector<Literal> goal = goal_or_default(s, goal_text);
  PlanResult r = s.request_plan(goal, flags.config());
  switch (r.status) {
    case PlanStatus::solved:
      out << "plan: " << r.plan.steps.size() << " steps\n";
      print_steps(out, r.plan.steps);
      break;
    case PlanStatus::unsolvable: out << "unsolvable\n"; break;
    case PlanStatus::exhausted: out << "exhausted: " << r.exhausted_reason << '\n'; break;
  }
  out << "stats: " << r.stats.line() << '\n';
  return exit_for(r.status);
}

// One plan step per simulated minute; events are applied at the start of the
// minute they carry.
int cmd_simulate(const std::string& scenario, const std::string& goal_text, const std::string& events_path,
                 const PlanFlags& flags, std::ostream& out) {
  Session s = open_scenario(scenario);
  std::vector<EventRecord> events = sorted_events(parse_events(read_file(events_path, "--events"), events_path));
  std::vector<Literal> goal = goal_or_default(s, goal_text);
  PlannerConfig config = flags.config();

  std::int64_t t = s.clock();
  auto stuck = [&](PlanStatus status, const std::string& reason) {
    out << "STUCK@t=" << t;
    if (status == PlanStatus::exhausted) out << " exhausted: " << reason;
    out << '\n';
    return exit_for(status);
  };

  PlanResult first = s.request_plan(goal, config);
  if (first.status != PlanStatus::solved) {
    out << "PLAN@t=" << t << ' ' << to_string(first.status) << '\n';
    return stuck(first.status, first.exhausted_reason);
  }
  out << "PLAN@t=" << t << " steps=" << first.plan.steps.size() << '\n';
  print_steps(out, first.plan.steps, "  ");

  std::size_t next_event = 0;
  for (;;) {
    for (; next_event < events.size() && events[next_event].timestamp <= t; ++next_event) {
      const EventRecord& e = events[next_event];
      PostResult pr = s.post_event(e);
      out << "EVENT@t=" << t << ' ' << to_string(e.op) << ' ' << to_string(e.fact) << (pr.changed ? "" : " (no change)")
          << '\n';
    }
    if (s.plan_dirty()) {
      ReplanResult rr = s.replan(config);
      switch (rr.status) {
        case ReplanStatus::keep_plan:
          out << "KEEP@t=" << t << '\n';
          break;
        case ReplanStatus::new_plan:
          out << "REPLAN@t=" << t << " steps=" << rr.search.plan.steps.size() << " (" << rr.validation.reason
              << " at step " << rr.validation.index + 1 << ")\n";
          print_steps(out, rr.search.plan.steps, "  ");
          break;
        case ReplanStatus::unsolvable:
        case ReplanStatus::exhausted:
          out << "REPLAN@t=" << t << ' ' << to_string(rr.search.status) << " (" << rr.validation.reason
              << " at step " << rr.validation.index + 1 << ")\n";
          return stuck(rr.search.status, rr.search.exhausted_reason);
      }
    }
    auto model = s.derived();
    if (FactView(s.facts(), model->derived).query(goal).holds()) {
      out << "GOAL_REACHED\n";
      return kSuccess;
    }
    const auto& active = s.active_plan();
    if (!active || active->cursor >= active->steps.size()) return stuck(PlanStatus::unsolvable, "");
    StepResult step = s.execute_step();
    out << "STEP@t=" << t << ' ' << step.cursor << ". " << to_string(step.action) << '\n';
    ++t;
  }
}

int cmd_serve(const std::string& scenario, const std::string& listen, std::ostream& out, std::ostream& err) {
  auto colon = listen.rfind(':');
  int port = -1;
  if (colon != std::string::npos) {
    try {
      std::size_t used = 0;
      port = std::stoi(listen.substr(colon + 1), &used);
      if (used != listen.size() - colon - 1) port = -1;
    } catch (const std::exception&) {
      port = -1;
    }
  }
  if (port < 0 || port > 65535) {
    err << "error: --listen must be host:port, got '" << listen << "'\n";
    return kUsage;
  }
  std::string host = listen.substr(0, colon);
  api::Service service(open_scenario(scenario));

  sigset_t signals, previous;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, &previous);

  api::HttpServer server(service);
  if (!server.bind(host, port)) {
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    err << "error: --listen: cannot bind " << listen << '\n';
    return kUsage;
  }
  std::atomic<bool> finished = false;
  std::thread runner([&] {
    server.run();
    finished = true;
  });
  server.wait_until_ready();
  out << "listening on http://" << host << ':' << server.port() << "/api/v1" << std::endl;
  while (!finished) {
    timespec tick{0, 200'000'000};
    if (sigtimedwait(&signals, nullptr, &tick) > 0) break;
  }
  server.stop();
  runner.join();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  out << "shutdown" << std::endl;
  return kSuccess;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rule-based rescue resource planner", "rescueplan"};
  app.require_subcommand(1);

  std::string regions, roads, objects, out_path;
  auto* ingest = app.add_subcommand("ingest", "Build site.facts from region, road and object tables");
  ingest->add_option("--regions", regions, "regions.csv (name,x,y)")->required();
  ingest->add_option("--roads", roads, "roads.csv (x1,y1,x2,y2)")->required();
  ingest->add_option("--objects", objects, "objects.csv (id,kind,subtype,x,y)")->required();
  ingest->add_option("--out", out_path, "Output facts file")->required();

  std::string scenario, query_text;
  auto* query = app.add_subcommand("query", "Answer a conjunctive query against the derived model");
  query->add_option("--scenario", scenario, "Scenario bundle directory")->required();
  query->add_option("--query", query_text, "Literals, e.g. \"link(X,Y), not fire(X,Y)\"")->required();

  std::string goal_text, events_path;
  PlanFlags plan_flags;
  auto* plan_cmd = app.add_subcommand("plan", "Find a shortest plan for a goal");
  plan_cmd->add_option("--scenario", scenario, "Scenario bundle directory")->required();
  plan_cmd->add_option("--goal", goal_text, "Goal literals; defaults to the bundle's goal.facts");
  plan_cmd->add_option("--events", events_path, "Events to apply before planning");
  add_plan_flags(plan_cmd, plan_flags);

  auto* simulate = app.add_subcommand("simulate", "Execute a plan while replaying an event stream");
  simulate->add_option("--scenario", scenario, "Scenario bundle directory")->required();
  simulate->add_option("--goal", goal_text, "Goal literals; defaults to the bundle's goal.facts");
  simulate->add_option("--events", events_path, "Event stream")->required();
  add_plan_flags(simulate, plan_flags);

  std::string listen = "127.0.0.1:8080";
  auto* serve = app.add_subcommand("serve", "Serve the HTTP API for one session");
  serve->add_option("--scenario", scenario, "Scenario bundle directory")->required();
  serve->add_option("--listen", listen, "host:port")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*ingest) return cmd_ingest(regions, roads, objects, out_path, out, err);
    if (*query) return cmd_query(scenario, query_text, out);
    if (*plan_cmd) return cmd_plan(scenario, goal_text, events_path, plan_flags, out);
    if (*simulate) return cmd_simulate(scenario, goal_text, events_path, plan_flags, out);
    if (*serve) return cmd_serve(scenario, listen, out, err);
  } catch (const Error& e) {
    err << "error: " << kind_name(e.kind()) << ": " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace rescueplan::cli
