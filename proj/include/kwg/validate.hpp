#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kwg/store.hpp"

namespace kwg::validate {

struct Constraint {
  std::vector<std::string> path;  // alternatives; values are counted across all of them
  int min_count = 0;
  std::optional<int> max_count;
  std::string datatype;     // empty: unchecked
  std::string value_class;  // empty: unchecked
};

struct Shape {
  std::string id;
  std::string target_class;  // instances of this class or any subclass
  std::vector<Constraint> constraints;
};

enum class ViolationKind { MinCount, MaxCount, Datatype, ValueClass };

struct Violation {
  std::string focus;
  std::string shape;
  std::size_t constraint = 0;  // index within the shape
  ViolationKind kind = ViolationKind::MinCount;
  std::string message;

  friend auto operator<=>(const Violation&, const Violation&) = default;
};

std::string_view to_string(ViolationKind k);

/// {"shapes":[{"id","target_class","constraints":[{"path","min_count",
/// "max_count","datatype","value_class"}]}]}. Compact IRIs are expanded.
std::vector<Shape> parse_shapes(const nlohmann::json& j);

/// Report sorted by (focus, shape, constraint).
std::vector<Violation> validate(const TripleStore& store, const std::vector<Shape>& shapes);

nlohmann::json report_json(const std::vector<Violation>& v);
std::string report_text(const std::vector<Violation>& v);

}  // namespace kwg::validate
