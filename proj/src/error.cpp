#include "rescueplan/error.hpp"

namespace rescueplan {

std::string_view kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::syntax: return "syntax_error";
    case ErrorKind::safety: return "safety_violation";
    case ErrorKind::not_stratifiable: return "not_stratifiable";
    case ErrorKind::unsafe_query: return "unsafe_query";
    case ErrorKind::unbound_effect_variable: return "unbound_effect_variable";
    case ErrorKind::effect_on_derived_predicate: return "effect_on_derived_predicate";
    case ErrorKind::effect_on_static_predicate: return "effect_on_static_predicate";
    case ErrorKind::invalid_domain: return "invalid_domain";
    case ErrorKind::unknown_object_kind: return "unknown_object_kind";
    case ErrorKind::empty_regions_table: return "empty_regions_table";
    case ErrorKind::non_finite_coordinate: return "non_finite_coordinate";
    case ErrorKind::invalid_table: return "invalid_table";
    case ErrorKind::timestamp_regression: return "timestamp_regression";
    case ErrorKind::dirty_plan: return "dirty_plan";
    case ErrorKind::no_active_plan: return "no_active_plan";
    case ErrorKind::plan_complete: return "plan_complete";
    case ErrorKind::missing_bundle_part: return "missing_bundle_part";
    case ErrorKind::io: return "io_error";
    case ErrorKind::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

std::string SourceLocation::str() const {
  std::string out = source.empty() ? std::string("<input>") : source;
  if (line > 0) {
    out += ':' + std::to_string(line) + ':' + std::to_string(column);
  }
  return out;
}

ParseError::ParseError(ErrorKind kind, SourceLocation where, const std::string& what)
    : Error(kind, where.str() + ": " + what), where_(std::move(where)), detail_(what) {}

}  // namespace rescueplan
