#pragma once

// JSON encodings of fitted models and run manifests. Requires nlohmann/json
// ("json.hpp") on the include path.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "archetypal.hpp"
#include "hull.hpp"
#include "io.hpp"
#include "matrix.hpp"
#include "pipeline.hpp"
#include "sketch.hpp"

namespace aakit {

using Json = nlohmann::ordered_json;

/// Columns as nested arrays: [[x(0,0), x(1,0), …], [x(0,1), …], …].
inline Json columns_to_json(const DenseMatrix& x) {
  Json out = Json::array();
  for (std::size_t j = 0; j < x.cols(); ++j) out.push_back(Json(std::vector<double>(x.col(j).begin(), x.col(j).end())));
  return out;
}

inline DenseMatrix columns_from_json(const Json& j, std::size_t rows) {
  DenseMatrix x(rows, j.size());
  for (std::size_t c = 0; c < j.size(); ++c) {
    const auto col = j[c].get<std::vector<double>>();
    detail::require(col.size() == rows, "columns_from_json: column length mismatch");
    std::copy(col.begin(), col.end(), x.col(c).begin());
  }
  return x;
}

/// Nonzero entries as [row, col, value] triplets in column-major order.
inline Json sparse_triplets(const DenseMatrix& x) {
  Json entries = Json::array();
  for (std::size_t j = 0; j < x.cols(); ++j)
    for (std::size_t i = 0; i < x.rows(); ++i)
      if (x(i, j) != 0.0) entries.push_back(Json::array({i, j, x(i, j)}));
  return Json{{"rows", x.rows()}, {"cols", x.cols()}, {"entries", std::move(entries)}};
}

inline DenseMatrix from_sparse_triplets(const Json& j) {
  DenseMatrix x(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  for (const auto& e : j.at("entries")) {
    const auto r = e.at(0).get<std::size_t>();
    const auto c = e.at(1).get<std::size_t>();
    detail::require(r < x.rows() && c < x.cols(), "from_sparse_triplets: index out of range");
    x(r, c) = e.at(2).get<double>();
  }
  return x;
}

inline Json to_json(const AAModel& m) {
  return Json{{"k", m.a.cols()},
              {"objective_trace", m.objective_trace},
              {"converged", m.converged},
              {"outer_iterations", m.outer_iterations},
              {"d", m.archetypes.rows()},
              {"archetypes", columns_to_json(m.archetypes)},
              {"A", sparse_triplets(m.a.matrix())},
              {"B", columns_to_json(m.b.matrix())}};
}

inline AAModel model_from_json(const Json& j) {
  AAModel m;
  const auto k = j.at("k").get<std::size_t>();
  m.objective_trace = j.at("objective_trace").get<std::vector<double>>();
  m.converged = j.at("converged").get<bool>();
  m.outer_iterations = j.value("outer_iterations", std::size_t{0});
  m.archetypes = columns_from_json(j.at("archetypes"), j.at("d").get<std::size_t>());
  m.a = StochasticMatrix(from_sparse_triplets(j.at("A")));
  m.b = StochasticMatrix(columns_from_json(j.at("B"), k));
  return m;
}

inline Json to_json(const HullSupport& t) {
  return Json{{"indices", t.indices},
              {"L", t.L},
              {"eta", t.eta},
              {"cum_curvature_estimate", t.cum_curvature_estimate},
              {"clamped", t.clamped}};
}

/// Sketch metadata; the matrices themselves go to the binary cache.
inline Json sketch_metadata(const SketchResult& s) {
  return Json{{"p", s.p},
              {"p_requested", s.p_requested},
              {"s", s.s},
              {"s_requested", s.s_requested},
              {"seed", s.seed},
              {"warnings", s.warnings}};
}

inline Json to_json(const StageTimings& t) {
  return Json{{"sketch_ms", t.sketch_ms}, {"hull_ms", t.hull_ms}, {"fit_ms", t.fit_ms}};
}

/// With `include_timings` false the timings field is null, which keeps the
/// document a pure function of the inputs.
inline Json to_json(const AAAResult& r, bool include_timings) {
  return Json{{"model", to_json(r.model)},
              {"support", to_json(r.support)},
              {"sketch", sketch_metadata(r.sketch)},
              {"timings", include_timings ? to_json(r.timings) : Json(nullptr)},
              {"reduced_objective", r.reduced_objective},
              {"original_objective", r.original_objective}};
}

/// Provenance attached to every file the command-line tool writes.
struct RunManifest {
  std::string command;
  Json parameters = Json::object();
  std::uint64_t seed = 0;
  std::uint64_t input_digest = 0;
  std::optional<std::map<std::string, double>> timings;  // absent in reproducible runs
  std::string build_id;
  std::size_t workers = 1;
};

inline Json to_json(const RunManifest& m) {
  Json timings = nullptr;
  if (m.timings) {
    timings = Json::object();
    for (const auto& [k, v] : *m.timings) timings[k] = v;
  }
  return Json{{"command", m.command},
              {"parameters", m.parameters},
              {"seed", m.seed},
              {"input_digest", hex64(m.input_digest)},
              {"timings", std::move(timings)},
              {"build_id", m.build_id},
              {"workers", m.workers}};
}

}  // namespace aakit
