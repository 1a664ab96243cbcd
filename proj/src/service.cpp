#include "rescueplan/service.hpp"

#include <httplib.h>

#include <json.hpp>
#include <map>
#include <set>

namespace rescueplan::api {

using nlohmann::json;

namespace {

constexpr std::size_t kWorkerThreads = 32;

// Event predicates drawn as badges on graph edges.
const std::set<std::string, std::less<>> kOverlayPredicates = {"fire", "fireman_operation", "police_block"};

int status_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::timestamp_regression:
    case ErrorKind::dirty_plan:
    case ErrorKind::plan_complete:
      return 409;
    case ErrorKind::no_active_plan:
      return 404;
    default:
      return 400;
  }
}

Response json_response(int status, const json& j) { return {status, j.dump()}; }

Response client_error(std::string_view kind, const std::string& detail, int status = 400) {
  return json_response(status, {{"error", {{"kind", kind}, {"detail", detail}}}});
}

struct BadRequest {
  std::string detail;
};

json parse_body(const std::string& body) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw BadRequest{"request body must be a JSON object"};
  return j;
}

std::string string_field(const json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end() || !it->is_string()) throw BadRequest{std::string("field '") + name + "' must be a string"};
  return it->get<std::string>();
}

EventRecord event_from_json(const json& j, std::int64_t default_t) {
  if (!j.is_object()) throw BadRequest{"event must be an object"};
  EventRecord e;
  e.timestamp = default_t;
  if (auto it = j.find("t"); it != j.end()) {
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0) {
      throw BadRequest{"field 't' must be a non-negative integer"};
    }
    e.timestamp = it->get<std::int64_t>();
  } else if (default_t < 0) {
    throw BadRequest{"field 't' is required"};
  }
  std::string op = string_field(j, "op");
  if (op == "assert") {
    e.op = EventOp::assert_fact;
  } else if (op == "retract") {
    e.op = EventOp::retract_fact;
  } else {
    throw BadRequest{"field 'op' must be \"assert\" or \"retract\""};
  }
  e.fact = parse_fact(string_field(j, "fact"), "fact");
  return e;
}

PlannerConfig config_from_json(const json& body) {
  PlannerConfig c;
  auto it = body.find("config");
  if (it == body.end() || it->is_null()) return c;
  if (!it->is_object()) throw BadRequest{"field 'config' must be an object"};
  auto positive = [&](const char* name) -> std::optional<std::uint64_t> {
    auto f = it->find(name);
    if (f == it->end()) return std::nullopt;
    if (!f->is_number_integer() || f->get<std::int64_t>() <= 0) {
      throw BadRequest{std::string("config.") + name + " must be a positive integer"};
    }
    return f->get<std::uint64_t>();
  };
  if (auto v = positive("max_depth")) c.max_depth = *v;
  if (auto v = positive("max_expansions")) c.max_expansions = *v;
  if (auto v = positive("timeout_ms")) c.time_budget = std::chrono::milliseconds(*v);
  return c;
}

json plan_json(const PlanResult& r) {
  json steps = json::array();
  for (std::size_t i = 0; i < r.plan.steps.size(); ++i) {
    steps.push_back({{"n", i + 1}, {"action", to_string(r.plan.steps[i])}});
  }
  json out = {{"status", to_string(r.status)},
              {"steps", steps},
              {"stats",
               {{"expanded", r.stats.expanded},
                {"generated", r.stats.generated},
                {"elapsed_ms", r.stats.elapsed.count()}}}};
  if (r.status == PlanStatus::exhausted) out["reason"] = r.exhausted_reason;
  return out;
}

json graph_json(const FactSet& facts) {
  SiteGraph g = graph_from_facts(facts);
  // overlays keyed by unordered endpoint pair
  std::map<std::pair<std::string, std::string>, std::set<std::string>> overlays;
  for (const Atom& a : facts) {
    if (a.args.size() != 2 || !kOverlayPredicates.contains(a.predicate)) continue;
    overlays[std::minmax(a.args[0].name(), a.args[1].name())].insert(a.predicate);
  }
  json nodes = json::array(), edges = json::array();
  for (const SiteNode& n : g.nodes) nodes.push_back({{"name", n.name}, {"x", n.x}, {"y", n.y}});
  for (const SiteEdge& e : g.edges) {
    json badges = json::array();
    if (auto it = overlays.find(std::minmax(e.a, e.b)); it != overlays.end()) {
      for (const std::string& o : it->second) badges.push_back(o);
    }
    edges.push_back({{"a", e.a}, {"b", e.b}, {"overlays", badges}});
  }
  return {{"nodes", nodes}, {"edges", edges}};
}

json state_json(const Session& s) {
  json facts = json::array(), derived = json::array();
  for (const Atom& a : s.facts()) facts.push_back(to_string(a));
  for (const Atom& a : s.derived()->derived) derived.push_back(to_string(a));
  json plan = nullptr;
  if (const auto& p = s.active_plan()) {
    json steps = json::array();
    for (std::size_t i = 0; i < p->steps.size(); ++i) {
      steps.push_back({{"n", i + 1}, {"action", to_string(p->steps[i])}});
    }
    plan = {{"goal", goal_to_string(p->goal)}, {"steps", steps}, {"cursor", p->cursor}, {"dirty", s.plan_dirty()}};
  }
  return {{"facts", facts},
          {"derived", derived},
          {"clock", s.clock()},
          {"hash", hash_hex(s.snapshot_hash())},
          {"log_length", s.log().size()},
          {"plan", plan}};
}

}  // namespace

Response error_response(const Error& e) { return client_error(kind_name(e.kind()), e.what(), status_for(e.kind())); }

struct Service::Published {
  std::shared_ptr<const Session> session;
  std::string graph;
  std::string state;
};

Service::Service(Session session) : live_(std::move(session)) {
  std::lock_guard lock(write_mu_);
  publish();
}

Service::~Service() = default;

void Service::publish() {
  auto p = std::make_shared<Published>();
  p->session = std::make_shared<const Session>(live_);
  p->graph = graph_json(live_.facts()).dump();
  p->state = state_json(live_).dump();
  std::lock_guard lock(pub_mu_);
  published_ = std::move(p);
}

std::shared_ptr<const Service::Published> Service::current() const {
  std::lock_guard lock(pub_mu_);
  return published_;
}

Response Service::get_graph() const { return {200, current()->graph}; }

Response Service::get_state() const { return {200, current()->state}; }

Response Service::post_events(const std::string& body) {
  try {
    json j = parse_body(body);
    EventRecord e = event_from_json(j, -1);
    std::lock_guard lock(write_mu_);
    PostResult r = live_.post_event(e);
    publish();
    return json_response(200, {{"changed", r.changed}, {"plan_dirty", r.plan_dirty}});
  } catch (const BadRequest& b) {
    return client_error("bad_request", b.detail);
  } catch (const Error& e) {
    return error_response(e);
  }
}

Response Service::post_plan(const std::string& body) {
  try {
    json j = parse_body(body);
    std::vector<Literal> goal = parse_goal(string_field(j, "goal"));
    PlannerConfig config = config_from_json(j);
    std::lock_guard plan_lock(plan_mu_);
    Session work = *current()->session;
    std::uint64_t planned_on = work.snapshot_hash();
    PlanResult r = plan(work.domain(), work.facts(), goal, config);
    if (r.status == PlanStatus::solved) {
      std::lock_guard lock(write_mu_);
      live_.install_plan(goal, r.plan.steps, planned_on);
      publish();
    }
    return json_response(200, plan_json(r));
  } catch (const BadRequest& b) {
    return client_error("bad_request", b.detail);
  } catch (const Error& e) {
    return error_response(e);
  }
}

Response Service::post_whatif(const std::string& body) {
  try {
    json j = parse_body(body);
    std::vector<Literal> goal = parse_goal(string_field(j, "goal"));
    PlannerConfig config = config_from_json(j);
    std::vector<EventRecord> events;
    if (auto it = j.find("events"); it != j.end()) {
      if (!it->is_array()) throw BadRequest{"field 'events' must be an array"};
      for (const json& e : *it) events.push_back(event_from_json(e, 0));
    }
    std::lock_guard plan_lock(plan_mu_);
    auto snap = current()->session;
    return json_response(200, plan_json(snap->what_if(events, goal, config)));
  } catch (const BadRequest& b) {
    return client_error("bad_request", b.detail);
  } catch (const Error& e) {
    return error_response(e);
  }
}

Response Service::post_execute_step() {
  try {
    std::lock_guard lock(write_mu_);
    StepResult r = live_.execute_step();
    publish();
    return json_response(200, {{"cursor", r.cursor}, {"done", r.done}, {"action", to_string(r.action)}});
  } catch (const Error& e) {
    return error_response(e);
  }
}

// --- transport -------------------------------------------------------------

struct HttpServer::Impl {
  httplib::Server server;
};

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>()) {
  auto& svr = impl_->server;
  // SO_REUSEPORT (httplib's default) would let a second server share the port.
  svr.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  // Each keep-alive client pins a worker; size the pool for a handful of
  // consoles plus scripted clients.
  svr.new_task_queue = [] { return new httplib::ThreadPool(kWorkerThreads); };
  auto reply = [](httplib::Response& res, const Response& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  svr.Get("/api/v1/graph", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.get_graph());
  });
  svr.Get("/api/v1/state", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.get_state());
  });
  svr.Post("/api/v1/events", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.post_events(req.body));
  });
  svr.Post("/api/v1/plan", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.post_plan(req.body));
  });
  svr.Post("/api/v1/whatif", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.post_whatif(req.body));
  });
  svr.Post("/api/v1/execute-step", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.post_execute_step());
  });
  svr.set_error_handler([reply](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && res.body.empty()) {
      reply(res, client_error("not_found", "no route for " + req.method + " " + req.path, 404));
    }
  });
}

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const std::string& host, int port) {
  auto& svr = impl_->server;
  if (port == 0) {
    port_ = svr.bind_to_any_port(host);
    return port_ > 0;
  }
  if (!svr.bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace rescueplan::api
