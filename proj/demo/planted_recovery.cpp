// Plants a 4-vertex polytope in R^20, runs the approximate pipeline and the
// exact alternating fit, and prints how well each recovers the vertices.

#include <cmath>
#include <cstdio>
#include <limits>

#include "aakit/aakit.hpp"

namespace {

double vertex_error(const aakit::DenseMatrix& found, const aakit::DenseMatrix& planted) {
  double worst = 0.0;
  for (std::size_t v = 0; v < planted.cols(); ++v) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < found.cols(); ++a)
      best = std::min(best, std::sqrt(aakit::detail::squared_distance(planted.col(v), found.col(a))));
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace

int main() {
  const auto pp = aakit::planted_polytope(2000, 20, 4, 0.0, 7);

  aakit::AAAConfig cfg;
  cfg.k = 4;
  cfg.p = 10;
  cfg.eta = 0.01;
  cfg.seed = 7;
  const auto approx = aakit::fit_aaa(pp.points, cfg);
  std::printf("approximate: |T| = %zu of %zu points, objective %.3e, worst vertex error %.3e, %.1f ms\n",
              approx.support.indices.size(), pp.points.cols(), approx.original_objective,
              vertex_error(approx.model.archetypes, pp.vertices),
              approx.timings.sketch_ms + approx.timings.hull_ms + approx.timings.fit_ms);

  aakit::AAConfig exact_cfg;
  exact_cfg.k = 4;
  exact_cfg.seed = 7;
  const auto exact = aakit::fit(pp.points, pp.points, exact_cfg);
  std::printf("exact:       objective %.3e, worst vertex error %.3e, %zu outer iterations\n",
              exact.objective_trace.back(), vertex_error(exact.archetypes, pp.vertices), exact.outer_iterations);
  return 0;
}
