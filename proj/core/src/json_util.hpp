#pragma once

// Internal helpers shared by the JSON readers and writers.

#include <cmath>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "treeaudit/errors.hpp"
#include "treeaudit/schema.hpp"

namespace treeaudit::detail {

using Json = nlohmann::ordered_json;

inline const Json& require(const Json& obj, const char* field, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  auto it = obj.find(field);
  if (it == obj.end()) throw ParseError(path + ": missing field '" + field + "'");
  return *it;
}

inline double require_number(const Json& obj, const char* field, const std::string& path) {
  const auto& v = require(obj, field, path);
  if (!v.is_number()) throw ParseError(path + "." + field + ": expected a number");
  return v.get<double>();
}

inline std::string require_string(const Json& obj, const char* field, const std::string& path) {
  const auto& v = require(obj, field, path);
  if (!v.is_string()) throw ParseError(path + "." + field + ": expected a string");
  return v.get<std::string>();
}

// Interval endpoint: null stands for an infinite bound.
inline Json bound_to_json(double v) {
  if (std::isinf(v)) return nullptr;
  return v;
}

inline double bound_from_json(const Json& v, double infinity, const std::string& path) {
  if (v.is_null()) return infinity;
  if (!v.is_number()) throw ParseError(path + ": expected a number or null");
  return v.get<double>();
}

Json schema_to_json(const FeatureSchema& schema);
FeatureSchema schema_from_json(const Json& j, const std::string& path);

}  // namespace treeaudit::detail
