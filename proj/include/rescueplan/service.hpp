#pragma once

// HTTP/JSON facade over one session. All endpoints live under /api/v1.
//
//   GET  /api/v1/graph         nodes with coordinates, edges with hazard overlays
//   GET  /api/v1/state         facts, derived facts, clock, snapshot hash
//   POST /api/v1/events        {t, op, fact}
//   POST /api/v1/plan          {goal, config?}
//   POST /api/v1/whatif        {events, goal, config?}
//   POST /api/v1/execute-step
//
// Mutations are serialised behind one writer lock. Reads are served from the
// last published snapshot and never wait for planning; at most one plan or
// what-if search runs at a time.

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>

#include "rescueplan/session.hpp"

namespace rescueplan::api {

struct Response {
  int status = 200;
  std::string body;  // JSON
};

class Service {
 public:
  explicit Service(Session session);
  ~Service();

  Response get_graph() const;
  Response get_state() const;
  Response post_events(const std::string& body);
  Response post_plan(const std::string& body);
  Response post_whatif(const std::string& body);
  Response post_execute_step();

 private:
  struct Published;
  std::shared_ptr<const Published> current() const;
  void publish();  // caller holds write_mu_

  Session live_;
  mutable std::mutex write_mu_;
  std::mutex plan_mu_;
  mutable std::mutex pub_mu_;
  std::shared_ptr<const Published> published_;
};

// HTTP transport for a Service.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port. Returns false if the address cannot be bound.
  bool bind(const std::string& host, int port);
  int port() const noexcept { return port_; }
  void run();  // blocks until stop()
  void stop();
  void wait_until_ready() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
};

// Maps an engine error to (HTTP status, JSON error body).
Response error_response(const Error& e);

}  // namespace rescueplan::api
