#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <numeric>
#include <span>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "simplex.hpp"

namespace aakit {

/// Per-point argmax counts from M random directions.
struct HitCounts {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
  std::size_t workers = 1;  // chunking used; counts depend on (seed, workers)
};

/// Retained extreme-point candidates T.
struct HullSupport {
  std::vector<std::size_t> indices;  // sorted ascending
  double cum_curvature_estimate = 0.0;
  double eta = 0.0;
  std::size_t L = 0;
  bool clamped = false;  // L was raised by the dimension rule
};

/// Uniform direction on the unit sphere S^{d−1}.
inline std::vector<double> sample_sphere_direction(std::size_t d, CounterRng& rng) {
  detail::require(d >= 1, "sample_sphere_direction: d must be positive");
  std::vector<double> v(d);
  double n = 0.0;
  do {
    for (double& e : v) e = rng.gaussian();
    n = norm2(v);
  } while (n == 0.0);
  for (double& e : v) e /= n;
  return v;
}

/// For each of m uniform directions v, increments the count of
/// argmax_j vᵀx_j (lowest index wins ties). Directions are split into
/// `workers` contiguous chunks, chunk c drawing from substream c of the seed.
inline HitCounts estimate_hit_counts(const DenseMatrix& x, std::uint64_t m, std::uint64_t seed,
                                     std::size_t workers = 1) {
  detail::require(m >= 1, "estimate_hit_counts: m must be positive");
  detail::require(x.cols() >= 1, "estimate_hit_counts: no points");
  const std::size_t n = x.cols();
  const std::size_t d = x.rows();
  workers = std::max<std::size_t>(1, std::min<std::uint64_t>(resolve_workers(workers), m));

  HitCounts out;
  out.counts.assign(n, 0);
  out.total = m;
  out.workers = workers;
  std::vector<std::vector<std::uint64_t>> local(workers, std::vector<std::uint64_t>(n, 0));
  const CounterRng root(seed);

  parallel_chunks(static_cast<std::size_t>(m), workers,
                  [&](std::size_t begin, std::size_t end, std::size_t chunk) {
                    CounterRng rng = root.split(chunk);
                    auto& hits = local[chunk];
                    constexpr std::size_t kBatch = 64;
                    DenseMatrix dirs(d, kBatch);
                    std::vector<double> best(kBatch);
                    std::vector<std::size_t> arg(kBatch);
                    for (std::size_t start = begin; start < end; start += kBatch) {
                      const std::size_t count = std::min(kBatch, end - start);
                      for (std::size_t b = 0; b < count; ++b) {
                        const auto v = sample_sphere_direction(d, rng);
                        std::copy(v.begin(), v.end(), dirs.col(b).begin());
                        best[b] = -INFINITY;
                        arg[b] = 0;
                      }
                      for (std::size_t j = 0; j < n; ++j) {
                        const auto xj = x.col(j);
                        for (std::size_t b = 0; b < count; ++b) {
                          const double score = dot(xj, dirs.col(b));
                          if (score > best[b]) {
                            best[b] = score;
                            arg[b] = j;
                          }
                        }
                      }
                      for (std::size_t b = 0; b < count; ++b) ++hits[arg[b]];
                    }
                  });
  for (const auto& hits : local)
    for (std::size_t j = 0; j < n; ++j) out.counts[j] += hits[j];
  return out;
}

/// Sorts points by count (descending, ties by index), keeps the shortest
/// prefix whose mass exceeds 1 − eta/3, then raises its length to at least
/// d + 1 (capped at N).
inline HullSupport select_support(const HitCounts& counts, double eta, std::size_t d) {
  detail::require(eta > 0.0 && eta < 3.0, "select_support: eta must lie in (0, 3)");
  detail::require(counts.total >= 1, "select_support: no samples");
  const std::size_t n = counts.counts.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return counts.counts[a] > counts.counts[b];
  });

  const double total = static_cast<double>(counts.total);
  const double threshold = 1.0 - eta / 3.0;
  std::size_t length = n;
  std::uint64_t prefix = 0;
  for (std::size_t l = 0; l < n; ++l) {
    prefix += counts.counts[order[l]];
    if (static_cast<double>(prefix) / total > threshold) {
      length = l + 1;
      break;
    }
  }
  HullSupport out;
  out.eta = eta;
  const std::size_t floor = std::min(d + 1, n);
  if (length < floor) {
    length = floor;
    out.clamped = true;
  }
  std::uint64_t mass = 0;
  for (std::size_t l = 0; l < length; ++l) mass += counts.counts[order[l]];
  out.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(length));
  std::sort(out.indices.begin(), out.indices.end());
  out.L = length;
  out.cum_curvature_estimate = static_cast<double>(mass) / total;
  return out;
}

/// Monte-Carlo approximate convex hull of the columns of x.
inline HullSupport approx_convex_hull(const DenseMatrix& x, std::uint64_t m, double eta,
                                      std::uint64_t seed, std::size_t workers = 1) {
  detail::require(eta > 0.0 && eta < 3.0, "approx_convex_hull: eta must lie in (0, 3)");
  return select_support(estimate_hit_counts(x, m, seed, workers), eta, x.rows());
}

/// Exact curvature of planar points: the normal-cone angle of each hull
/// vertex divided by 2π, zero for every other point. Hull by Andrew's
/// monotone chain; among exactly coincident points the lowest index is the vertex.
inline std::vector<double> exact_curvature_2d(const DenseMatrix& points) {
  detail::require(points.rows() == 2, "exact_curvature_2d: points must be 2-D");
  const std::size_t n = points.cols();
  detail::require(n >= 3, "exact_curvature_2d: need at least three points");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points(0, a) != points(0, b)) return points(0, a) < points(0, b);
    if (points(1, a) != points(1, b)) return points(1, a) < points(1, b);
    return a < b;
  });
  order.erase(std::unique(order.begin(), order.end(),
                          [&](std::size_t a, std::size_t b) {
                            return points(0, a) == points(0, b) && points(1, a) == points(1, b);
                          }),
              order.end());

  auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
    return (points(0, a) - points(0, o)) * (points(1, b) - points(1, o)) -
           (points(1, a) - points(1, o)) * (points(0, b) - points(0, o));
  };
  std::vector<std::size_t> hull(2 * order.size());
  std::size_t h = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    while (h >= 2 && cross(hull[h - 2], hull[h - 1], order[i]) <= 0.0) --h;
    hull[h++] = order[i];
  }
  for (std::size_t i = order.size() - 1, lower = h + 1; i-- > 0;) {
    while (h >= lower && cross(hull[h - 2], hull[h - 1], order[i]) <= 0.0) --h;
    hull[h++] = order[i];
  }
  hull.resize(h - 1);  // last point repeats the first
  if (hull.size() < 3) throw DegenerateGeometry("exact_curvature_2d: points are collinear");

  std::vector<double> kappa(n, 0.0);
  const std::size_t hs = hull.size();
  for (std::size_t i = 0; i < hs; ++i) {
    const std::size_t prev = hull[(i + hs - 1) % hs];
    const std::size_t cur = hull[i];
    const std::size_t next = hull[(i + 1) % hs];
    const double in_angle = std::atan2(points(1, cur) - points(1, prev), points(0, cur) - points(0, prev));
    const double out_angle = std::atan2(points(1, next) - points(1, cur), points(0, next) - points(0, cur));
    double turn = out_angle - in_angle;
    while (turn <= 0.0) turn += 2.0 * std::numbers::pi;
    while (turn > 2.0 * std::numbers::pi) turn -= 2.0 * std::numbers::pi;
    kappa[cur] = turn / (2.0 * std::numbers::pi);
  }
  return kappa;
}

/// Hausdorff distance between conv(x[:, T]) and conv(x): the largest
/// distance from a column of x to conv(x[:, T]).
inline double hausdorff_to_subhull(const DenseMatrix& x, const HullSupport& t) {
  detail::require(!t.indices.empty(), "hausdorff_to_subhull: empty support");
  const DenseMatrix sub = select_columns(x, t.indices);
  const SimplexLeastSquares solver(sub);
  double worst = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j)
    worst = std::max(worst, solver.solve(x.col(j)).residual_norm);
  return worst;
}

}  // namespace aakit
