#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rescueplan {

// Every engine failure carries one of these kinds. The names are part of the
// HTTP contract (see kind_name) and must stay stable.
enum class ErrorKind {
  syntax,
  safety,
  not_stratifiable,
  unsafe_query,
  unbound_effect_variable,
  effect_on_derived_predicate,
  effect_on_static_predicate,
  invalid_domain,
  unknown_object_kind,
  empty_regions_table,
  non_finite_coordinate,
  invalid_table,
  timestamp_regression,
  dirty_plan,
  no_active_plan,
  plan_complete,
  missing_bundle_part,
  io,
  invalid_argument,
};

std::string_view kind_name(ErrorKind kind);

struct SourceLocation {
  std::string source;
  int line = 0;
  int column = 0;

  std::string str() const;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Syntax and safety errors point at a position in the source text.
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, SourceLocation where, const std::string& what);

  const SourceLocation& location() const noexcept { return where_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  SourceLocation where_;
  std::string detail_;
};

}  // namespace rescueplan
