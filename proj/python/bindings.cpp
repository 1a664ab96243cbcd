#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rescueplan/session.hpp"

namespace py = pybind11;
using namespace rescueplan;

namespace {

PlannerConfig make_config(std::size_t max_depth, std::size_t max_expansions, long long timeout_ms) {
  PlannerConfig c;
  c.max_depth = max_depth;
  c.max_expansions = max_expansions;
  c.time_budget = std::chrono::milliseconds(timeout_ms);
  return c;
}

py::dict plan_dict(const PlanResult& r) {
  py::list steps;
  for (const GroundAction& a : r.plan.steps) steps.append(to_string(a));
  py::dict stats;
  stats["expanded"] = r.stats.expanded;
  stats["generated"] = r.stats.generated;
  stats["elapsed_ms"] = r.stats.elapsed.count();
  py::dict out;
  out["status"] = std::string(to_string(r.status));
  out["steps"] = steps;
  out["stats"] = stats;
  if (r.status == PlanStatus::exhausted) out["reason"] = r.exhausted_reason;
  return out;
}

EventRecord make_event(std::int64_t t, const std::string& op, const std::string& fact) {
  EventRecord e;
  e.timestamp = t;
  if (op == "assert") {
    e.op = EventOp::assert_fact;
  } else if (op == "retract") {
    e.op = EventOp::retract_fact;
  } else {
    throw Error(ErrorKind::invalid_argument, "op must be 'assert' or 'retract'");
  }
  e.fact = parse_fact(fact, "fact");
  return e;
}

std::vector<std::string> strings(const FactSet& s) {
  std::vector<std::string> out;
  for (const Atom& a : s) out.push_back(to_string(a));
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Rule-based rescue planning engine";

  // Lives as long as the interpreter; never released.
  static PyObject* error_type = PyErr_NewException("rescueplan._core.RescuePlanError", PyExc_RuntimeError, nullptr);
  m.attr("RescuePlanError") = py::handle(error_type);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      std::string kind(kind_name(e.kind()));
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(kind + ": " + e.what());
      exc.attr("kind") = kind;
      PyErr_SetObject(error_type, exc.ptr());
    }
  });

  m.def("format_program", [](const std::string& text) { return format_program(parse_program(text)); },
        py::arg("text"), "Parse clauses and print them back in canonical form.");

  py::class_<Session>(m, "Session")
      .def_static("load", [](const std::string& dir) { return Session::load(ScenarioBundle::from_directory(dir)); },
                  py::arg("directory"))
      .def_property_readonly("clock", &Session::clock)
      .def_property_readonly("snapshot_hash", [](const Session& s) { return hash_hex(s.snapshot_hash()); })
      .def_property_readonly("plan_dirty", &Session::plan_dirty)
      .def_property_readonly("log_length", [](const Session& s) { return s.log().size(); })
      .def("facts", [](const Session& s) { return strings(s.facts()); })
      .def("derived", [](const Session& s) { return strings(s.derived()->derived); })
      .def("summary",
           [](const Session& s) {
             const ScenarioSummary& x = s.summary();
             py::dict d;
             d["nodes"] = x.nodes;
             d["links"] = x.links;
             d["resources"] = x.resources;
             d["rules"] = x.rules;
             d["schemas"] = x.schemas;
             return d;
           })
      .def(
          "query",
          [](const Session& s, const std::string& text) {
            auto goal = parse_literals(text);
            auto model = s.derived();
            std::vector<std::map<std::string, std::string>> out;
            for (const Substitution& a : FactView(s.facts(), model->derived).query(goal).answers) {
              std::map<std::string, std::string> row;
              for (const auto& [k, v] : a.bindings()) row[k] = v.repr();
              out.push_back(std::move(row));
            }
            return out;
          },
          py::arg("query"))
      .def(
          "post_event",
          [](Session& s, std::int64_t t, const std::string& op, const std::string& fact) {
            PostResult r = s.post_event(make_event(t, op, fact));
            return py::make_tuple(r.changed, r.plan_dirty);
          },
          py::arg("t"), py::arg("op"), py::arg("fact"))
      .def(
          "request_plan",
          [](Session& s, const std::string& goal, std::size_t max_depth, std::size_t max_expansions,
             long long timeout_ms) {
            return plan_dict(s.request_plan(parse_goal(goal), make_config(max_depth, max_expansions, timeout_ms)));
          },
          py::arg("goal"), py::arg("max_depth") = 64, py::arg("max_expansions") = 1'000'000,
          py::arg("timeout_ms") = 30'000)
      .def(
          "what_if",
          [](const Session& s, const std::vector<std::tuple<std::int64_t, std::string, std::string>>& events,
             const std::string& goal) {
            std::vector<EventRecord> evs;
            for (const auto& [t, op, fact] : events) evs.push_back(make_event(t, op, fact));
            return plan_dict(s.what_if(evs, parse_goal(goal)));
          },
          py::arg("events"), py::arg("goal"))
      .def("execute_step",
           [](Session& s) {
             StepResult r = s.execute_step();
             py::dict d;
             d["action"] = to_string(r.action);
             d["cursor"] = r.cursor;
             d["done"] = r.done;
             return d;
           })
      .def("replan", [](Session& s) {
        switch (s.replan().status) {
          case ReplanStatus::keep_plan: return "keep_plan";
          case ReplanStatus::new_plan: return "new_plan";
          case ReplanStatus::unsolvable: return "unsolvable";
          case ReplanStatus::exhausted: return "exhausted";
        }
        return "unknown";
      });
}
