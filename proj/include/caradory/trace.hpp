#pragma once

#include <cmath>
#include <cstddef>
#include <iomanip>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "caradory/geometry.hpp"

namespace caradory {

enum class Status { Converged, IterCap, Degenerate };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Converged: return "converged";
    case Status::IterCap: return "iter-cap";
    case Status::Degenerate: return "degenerate";
  }
  return "unknown";
}

inline Status status_from_string(const std::string& s) {
  if (s == "converged") return Status::Converged;
  if (s == "iter-cap") return Status::IterCap;
  if (s == "degenerate") return Status::Degenerate;
  throw InputError("unknown status '" + s + "'");
}

/// State of iterate x_t. `gamma`, `beta` and `vertex_index` describe the step
/// taken from x_t and are empty on the terminal record.
struct IterationRecord {
  std::size_t t = 0;
  double f_value = 0.0;
  double primal_gap = 0.0;
  std::size_t cardinality = 0;
  std::optional<double> gamma;
  std::optional<double> beta;
  std::optional<std::size_t> vertex_index;
  double elapsed_ms = 0.0;

  bool operator==(const IterationRecord&) const = default;

  /// Equality ignoring wall-clock time.
  bool same_path(const IterationRecord& o) const {
    return t == o.t && f_value == o.f_value && primal_gap == o.primal_gap && cardinality == o.cardinality &&
           gamma == o.gamma && beta == o.beta && vertex_index == o.vertex_index;
  }
};

struct RunTrace {
  std::string algorithm;
  std::vector<IterationRecord> records;
  Status status = Status::IterCap;
  /// Value f(x*) (or min_C f) the primal gap is measured against; empty when
  /// the gap is reported against the best running value.
  std::optional<double> reference_value;
  /// Set when an inner correction stopped at its iteration cap.
  bool inner_cap_hit = false;

  bool operator==(const RunTrace&) const = default;

  bool same_path(const RunTrace& o) const {
    if (algorithm != o.algorithm || status != o.status || reference_value != o.reference_value ||
        records.size() != o.records.size()) {
      return false;
    }
    for (std::size_t i = 0; i < records.size(); ++i) {
      if (!records[i].same_path(o.records[i])) return false;
    }
    return true;
  }

  const IterationRecord& last() const { return records.back(); }
};

inline constexpr const char* kTraceCsvColumns = "t,f_value,primal_gap,cardinality,gamma,beta,vertex_index,elapsed_ms";

/// Writes the trace as CSV. `header` lines are emitted first as `# key` comments.
inline void write_trace_csv(std::ostream& os, const RunTrace& trace, const std::vector<std::string>& header = {}) {
  for (const auto& line : header) os << "# " << line << '\n';
  os << "# algorithm=" << trace.algorithm << " status=" << to_string(trace.status) << '\n';
  os << kTraceCsvColumns << '\n';
  os << std::setprecision(17);
  for (const auto& r : trace.records) {
    os << r.t << ',' << r.f_value << ',' << r.primal_gap << ',' << r.cardinality << ',';
    if (r.gamma) os << *r.gamma;
    os << ',';
    if (r.beta) os << *r.beta;
    os << ',';
    if (r.vertex_index) os << *r.vertex_index;
    os << ',' << r.elapsed_ms << '\n';
  }
}

namespace detail {
template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}
template <class T>
std::optional<T> optional_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}
}  // namespace detail

inline nlohmann::json to_json(const ConvexCombination& c) {
  nlohmann::json support = nlohmann::json::array();
  for (const Atom& a : c.support) support.push_back({{"index", a.index}, {"weight", a.weight}});
  nlohmann::json j{{"cardinality", c.cardinality()},
                   {"support", support},
                   {"point", std::vector<double>(c.point.data(), c.point.data() + c.point.size())}};
  if (!c.boundary_points.empty()) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Vector& v : c.boundary_points) pts.push_back(std::vector<double>(v.data(), v.data() + v.size()));
    j["boundary_points"] = pts;
  }
  return j;
}

inline ConvexCombination combination_from_json(const nlohmann::json& j) {
  ConvexCombination c;
  for (const auto& a : j.at("support")) c.support.push_back({a.at("index").get<std::size_t>(), a.at("weight").get<double>()});
  const auto pt = j.at("point").get<std::vector<double>>();
  c.point = Eigen::Map<const Vector>(pt.data(), static_cast<Index>(pt.size()));
  if (j.contains("boundary_points")) {
    for (const auto& p : j.at("boundary_points")) {
      const auto v = p.get<std::vector<double>>();
      c.boundary_points.emplace_back(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
    }
  }
  return c;
}

inline nlohmann::json to_json(const RunTrace& trace) {
  nlohmann::json records = nlohmann::json::array();
  for (const auto& r : trace.records) {
    records.push_back({{"t", r.t},
                       {"f_value", r.f_value},
                       {"primal_gap", r.primal_gap},
                       {"cardinality", r.cardinality},
                       {"gamma", detail::optional_json(r.gamma)},
                       {"beta", detail::optional_json(r.beta)},
                       {"vertex_index", detail::optional_json(r.vertex_index)},
                       {"elapsed_ms", r.elapsed_ms}});
  }
  return {{"algorithm", trace.algorithm},
          {"status", to_string(trace.status)},
          {"reference_value", detail::optional_json(trace.reference_value)},
          {"inner_cap_hit", trace.inner_cap_hit},
          {"records", records}};
}

inline RunTrace trace_from_json(const nlohmann::json& j) {
  RunTrace trace;
  trace.algorithm = j.at("algorithm").get<std::string>();
  trace.status = status_from_string(j.at("status").get<std::string>());
  trace.reference_value = detail::optional_from<double>(j, "reference_value");
  trace.inner_cap_hit = j.value("inner_cap_hit", false);
  for (const auto& r : j.at("records")) {
    IterationRecord rec;
    rec.t = r.at("t").get<std::size_t>();
    rec.f_value = r.at("f_value").get<double>();
    rec.primal_gap = r.at("primal_gap").get<double>();
    rec.cardinality = r.at("cardinality").get<std::size_t>();
    rec.gamma = detail::optional_from<double>(r, "gamma");
    rec.beta = detail::optional_from<double>(r, "beta");
    rec.vertex_index = detail::optional_from<std::size_t>(r, "vertex_index");
    rec.elapsed_ms = r.at("elapsed_ms").get<double>();
    trace.records.push_back(rec);
  }
  return trace;
}

}  // namespace caradory
