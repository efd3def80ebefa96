#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "metric_union/audit.hpp"
#include "metric_union/cover.hpp"
#include "metric_union/error.hpp"
#include "metric_union/glue.hpp"
#include "metric_union/linalg.hpp"
#include "metric_union/lower_bound.hpp"
#include "metric_union/metric.hpp"
#include "metric_union/union_embed.hpp"

namespace metric_union::io {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Deterministic text output: numbers always use 17 significant digits.

namespace detail {

inline void append_number(std::string& out, double v) {
  if (std::isnan(v)) {
    out += "null";
    return;
  }
  if (std::isinf(v)) {
    out += v > 0 ? "\"inf\"" : "\"-inf\"";
    return;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

inline void append_string(std::string& out, const std::string& s) {
  out += json(s).dump();
}

inline void write(std::string& out, const json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out += '\n';
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        append_string(out, it.key());
        out += indent < 0 ? ":" : ": ";
        write(out, it.value(), indent, depth + 1);
      }
      newline(depth);
      out += '}';
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      bool flat = true;
      for (const auto& e : j) flat = flat && !e.is_structured();
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += flat ? ", " : ",";
        first = false;
        if (!flat) newline(depth + 1);
        write(out, e, indent, depth + 1);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case json::value_t::number_float: append_number(out, j.get<double>()); return;
    default: out += j.dump(); return;
  }
}

}  // namespace detail

inline std::string dump(const json& j, int indent = 2) {
  std::string out;
  detail::write(out, j, indent, 0);
  out += '\n';
  return out;
}

// ---------------------------------------------------------------------------
// Parsing helpers.

inline std::vector<std::vector<double>> rows_of(const json& j, const char* what) {
  if (!j.is_array()) throw InputError("SchemaError", std::string(what) + " must be an array of rows");
  std::vector<std::vector<double>> rows;
  for (const auto& r : j) {
    if (!r.is_array()) throw InputError("SchemaError", std::string(what) + " rows must be arrays");
    std::vector<double> row;
    for (const auto& v : r) {
      if (!v.is_number()) throw InputError("SchemaError", std::string(what) + " entries must be numbers");
      row.push_back(v.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<std::size_t> indices_of(const json& j, const char* what) {
  if (!j.is_array()) throw InputError("SchemaError", std::string(what) + " must be an array of indices");
  std::vector<std::size_t> out;
  for (const auto& v : j) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw InputError("SchemaError", std::string(what) + " entries must be nonnegative integers");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

inline Matrix matrix_of(const json& j, const char* what) {
  const auto rows = rows_of(j, what);
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw InputError("SchemaError", std::string(what) + " is ragged", {i});
    for (std::size_t k = 0; k < m.cols(); ++k) m(i, k) = rows[i][k];
  }
  return m;
}

inline PointCloud points_of(const json& j, const char* what) {
  try {
    return PointCloud::from_rows(rows_of(j, what));
  } catch (const LengthMismatchError& e) {
    throw InputError("SchemaError", std::string(what) + ": " + e.what());
  }
}

/// A space is either {"distances": [[...]], "labels"?: [...]} or
/// {"points": [[...]]} (Euclidean distances).
inline FiniteMetricSpace space_of(const json& j) {
  if (!j.is_object()) throw InputError("SchemaError", "space must be an object");
  std::vector<std::string> labels;
  if (j.contains("labels")) {
    for (const auto& l : j.at("labels")) labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
  }
  if (j.contains("distances")) return validate_metric(matrix_of(j.at("distances"), "distances"), std::move(labels));
  if (j.contains("points")) return euclidean_space(points_of(j.at("points"), "points"), std::move(labels));
  throw InputError("SchemaError", "space needs \"distances\" or \"points\"");
}

inline UnionPartition partition_of(const FiniteMetricSpace& x, const json& j) {
  if (!j.is_object() || !j.contains("a") || !j.contains("b"))
    throw InputError("SchemaError", "partition must be {\"a\": [...], \"b\": [...]}");
  return build_partition(x, indices_of(j.at("a"), "partition.a"), indices_of(j.at("b"), "partition.b"));
}

inline GlueInstance glue_of(const json& j) {
  for (const char* k : {"u_points", "v_points", "a_idx", "b_idx"})
    if (!j.contains(k)) throw InputError("SchemaError", std::string("glue input needs \"") + k + "\"");
  GlueInstance g;
  g.u_points = points_of(j.at("u_points"), "u_points");
  g.v_points = points_of(j.at("v_points"), "v_points");
  g.a_idx = indices_of(j.at("a_idx"), "a_idx");
  g.b_idx = indices_of(j.at("b_idx"), "b_idx");
  if (j.contains("pairing")) g.pairing = indices_of(j.at("pairing"), "pairing");
  return g;
}

// ---------------------------------------------------------------------------
// Serialization.

inline json to_json(const PointCloud& pc) {
  json rows = json::array();
  for (std::size_t i = 0; i < pc.size(); ++i) {
    json r = json::array();
    for (double v : pc.point(i)) r.push_back(v);
    rows.push_back(std::move(r));
  }
  return rows;
}

inline json pair_json(std::pair<std::size_t, std::size_t> p) { return json::array({p.first, p.second}); }

inline json to_json(const DistortionReport& r) {
  return json{{"expansion", r.expansion},
              {"contraction", r.contraction},
              {"distortion", r.distortion},
              {"expansion_pair", pair_json(r.expansion_pair)},
              {"contraction_pair", pair_json(r.contraction_pair)},
              {"pairs", r.pairs}};
}

inline json to_json(const AuditEntry& e) {
  return json{{"name", e.name},
              {"relation", e.relation == AuditEntry::Relation::Upper ? "<=" : ">="},
              {"bound", e.bound},
              {"measured", e.measured},
              {"slack", e.slack},
              {"tolerance", e.tolerance},
              {"strict", e.strict},
              {"passed", e.passed},
              {"witness", pair_json(e.witness)},
              {"checked", e.checked}};
}

inline json to_json(const Audit& a) {
  json out = json::array();
  for (const auto& e : a) out.push_back(to_json(e));
  return out;
}

inline json to_json(const EmbedParams& p) {
  return json{{"alpha", p.alpha}, {"d_a", p.d_a}, {"d_b", p.d_b}, {"beta", p.beta}, {"gamma", p.gamma},
              {"tol", p.tol}};
}

inline json to_json(const CoverResult& c, double bound) {
  return json{{"alpha", c.alpha},     {"cover_idx", c.cover_idx}, {"nearest", c.nearest},
              {"lip_f", c.lip_f},     {"lip_bound", bound}};
}

inline json to_json(const UnionEmbedding& e) {
  return json{{"params", to_json(e.params)},
              {"input_scale", {{"a", e.side_a.scale}, {"b", e.side_b.scale}}},
              {"dimension", e.full.dim()},
              {"embedding", to_json(e.full)},
              {"report", to_json(e.report)},
              {"cover_sizes", {{"a", e.cover_a.cover_idx.size()}, {"b", e.cover_b.cover_idx.size()}}},
              {"claim_cases", json::array({e.claim.count[0], e.claim.count[1], e.claim.count[2]})},
              {"passed", e.passed()},
              {"audit", to_json(e.audit)}};
}

inline json to_json(const BipartiteSplit& s) {
  return json{{"n", s.n}, {"e1_count", s.e1.size()}, {"e2_count", s.e2.size()}, {"seed", s.seed},
              {"attempts", s.attempts + 1}};
}

/// Structured description of a library error for stderr.
inline json error_json(const Error& e) {
  json j{{"error", e.kind()}, {"message", e.what()}, {"witness", e.witness()}};
  if (e.has_value()) j["value"] = e.value();
  if (const auto* me = dynamic_cast<const MetricError*>(&e)) {
    json v = json::array();
    for (const auto& x : me->violations()) {
      json item{{"kind", to_string(x.kind)}, {"i", x.i}, {"j", x.j}};
      if (x.kind == MetricViolation::Kind::Triangle) item["k"] = x.k;
      item["slack"] = x.slack;
      v.push_back(std::move(item));
    }
    j["violations"] = std::move(v);
    j["truncated"] = me->truncated();
  }
  return j;
}

}  // namespace metric_union::io
