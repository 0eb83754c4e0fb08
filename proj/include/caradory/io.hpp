#pragma once

#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "caradory/core.hpp"
#include "caradory/geometry.hpp"
#include "caradory/instances.hpp"

namespace caradory {

namespace detail {

inline std::string source_label(const std::string& source) { return source.empty() ? "<input>" : source; }

inline nlohmann::json parse_json(std::istream& in, const std::string& source) {
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(source_label(source) + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
}

inline const nlohmann::json& field(const nlohmann::json& j, const char* key, const std::string& source) {
  if (!j.is_object()) throw InputError(source_label(source) + ": expected a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(source_label(source) + ": missing field '" + key + "'");
  return *it;
}

inline double number(const nlohmann::json& j, const std::string& where, const std::string& source) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Infinity") return kInf;
  }
  throw InputError(source_label(source) + ": field '" + where + "' must be a number");
}

inline std::vector<double> number_list(const nlohmann::json& j, const std::string& where, const std::string& source) {
  if (!j.is_array()) throw InputError(source_label(source) + ": field '" + where + "' must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(number(j[i], where + "[" + std::to_string(i) + "]", source));
  }
  return out;
}

inline VertexSet vertices_from(const nlohmann::json& j, std::optional<long long> n, const std::string& source) {
  if (!j.is_array()) throw InputError(source_label(source) + ": field 'vertices' must be an array");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < j.size(); ++i) {
    rows.push_back(number_list(j[i], "vertices[" + std::to_string(i) + "]", source));
    if (n && static_cast<long long>(rows.back().size()) != *n) {
      throw InputError(source_label(source) + ": field 'vertices[" + std::to_string(i) + "]' has " +
                       std::to_string(rows.back().size()) + " coordinates, expected n = " + std::to_string(*n));
    }
    if (rows.back().size() != rows.front().size()) {
      throw InputError(source_label(source) + ": field 'vertices[" + std::to_string(i) + "]' has " +
                       std::to_string(rows.back().size()) + " coordinates, expected " +
                       std::to_string(rows.front().size()));
    }
  }
  try {
    return VertexSet::from_rows(rows);
  } catch (const InputError& e) {
    throw InputError(source_label(source) + ": " + e.what());
  }
}

inline nlohmann::json rows_json(const Matrix& v) {
  nlohmann::json rows = nlohmann::json::array();
  for (Index j = 0; j < v.cols(); ++j) {
    std::vector<double> row(static_cast<std::size_t>(v.rows()));
    for (Index i = 0; i < v.rows(); ++i) row[static_cast<std::size_t>(i)] = v(i, j);
    rows.push_back(row);
  }
  return rows;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path + ": cannot open file");
  return in;
}

}  // namespace detail

/// {"n": int, "vertices": [[...], ...]}, one row per vertex.
inline nlohmann::json vertex_set_json(const VertexSet& set) {
  return {{"n", set.dim()}, {"vertices", detail::rows_json(set.matrix())}};
}

inline VertexSet vertex_set_from_json(const nlohmann::json& j, const std::string& source = "") {
  const auto& n = detail::field(j, "n", source);
  if (!n.is_number_integer() || n.get<long long>() < 1) {
    throw InputError(detail::source_label(source) + ": field 'n' must be a positive integer");
  }
  return detail::vertices_from(detail::field(j, "vertices", source), n.get<long long>(), source);
}

inline VertexSet load_vertex_set(const std::string& path) {
  auto in = detail::open_input(path);
  return vertex_set_from_json(detail::parse_json(in, path), path);
}

/// {"kind", "params", "vertices", "target", "p", "ground_truth_cardinality"}.
/// Ball instances carry their description in "params" and no vertices.
inline nlohmann::json instance_json(const Instance& inst) {
  nlohmann::json j{{"kind", inst.kind}, {"params", inst.params}};
  if (const auto* vs = std::get_if<VertexSet>(&inst.set)) {
    j["vertices"] = detail::rows_json(vs->matrix());
  } else {
    j["vertices"] = nullptr;
  }
  j["target"] = std::vector<double>(inst.target.data(), inst.target.data() + inst.target.size());
  if (std::isinf(inst.p)) {
    j["p"] = "inf";
  } else {
    j["p"] = inst.p;
  }
  j["ground_truth_cardinality"] =
      inst.ground_truth_cardinality ? nlohmann::json(*inst.ground_truth_cardinality) : nlohmann::json(nullptr);
  return j;
}

inline Instance instance_from_json(const nlohmann::json& j, const std::string& source = "") {
  const auto& kind = detail::field(j, "kind", source);
  if (!kind.is_string()) throw InputError(detail::source_label(source) + ": field 'kind' must be a string");
  nlohmann::json params = j.contains("params") ? j.at("params") : nlohmann::json::object();
  if (!params.is_object()) throw InputError(detail::source_label(source) + ": field 'params' must be an object");
  const std::vector<double> t = detail::number_list(detail::field(j, "target", source), "target", source);
  Vector target = Eigen::Map<const Vector>(t.data(), static_cast<Index>(t.size()));
  const double p = detail::number(detail::field(j, "p", source), "p", source);

  const auto& verts = detail::field(j, "vertices", source);
  std::optional<FeasibleSet> set;
  if (verts.is_null()) {
    if (kind.get<std::string>() != "ball") {
      throw InputError(detail::source_label(source) + ": field 'vertices' is null but kind is not 'ball'");
    }
    auto get = [&](const char* key) { return detail::number(detail::field(params, key, source), key, source); };
    try {
      set.emplace(LqBall(Vector::Zero(target.size()), get("radius"), get("q")));
    } catch (const InputError& e) {
      throw InputError(detail::source_label(source) + ": " + e.what());
    }
  } else {
    set.emplace(detail::vertices_from(verts, std::nullopt, source));
  }
  if (dimension(*set) != target.size()) {
    throw InputError(detail::source_label(source) + ": field 'target' has " + std::to_string(target.size()) +
                     " coordinates, expected " + std::to_string(dimension(*set)));
  }
  Instance inst{kind.get<std::string>(), params, std::move(*set), std::move(target), p};
  const auto& gt = j.contains("ground_truth_cardinality") ? j.at("ground_truth_cardinality") : nlohmann::json();
  if (!gt.is_null()) {
    if (!gt.is_number_integer() || gt.get<long long>() < 1) {
      throw InputError(detail::source_label(source) + ": field 'ground_truth_cardinality' must be a positive integer or null");
    }
    inst.ground_truth_cardinality = gt.get<std::size_t>();
  }
  if (inst.kind == "ball") inst.target_inside = lp_norm(inst.target, std::get<LqBall>(inst.set).q) <= std::get<LqBall>(inst.set).radius;
  return inst;
}

inline Instance load_instance(const std::string& path) {
  auto in = detail::open_input(path);
  return instance_from_json(detail::parse_json(in, path), path);
}

inline Instance parse_instance(const std::string& text, const std::string& source = "") {
  std::istringstream in(text);
  return instance_from_json(detail::parse_json(in, source), source);
}

}  // namespace caradory
