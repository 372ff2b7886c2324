#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "random.hpp"

namespace aakit {

struct PlantedPolytope {
  DenseMatrix points;    // d x n
  DenseMatrix vertices;  // d x k
};

/// k standard-Gaussian vertices in ℝ^d and n points drawn as Dirichlet(1)
/// mixtures of them plus isotropic Gaussian noise of scale `noise`. With
/// `include_vertices` the first k points are the vertices themselves,
/// noise-free, so the planted polytope is attained by the data.
inline PlantedPolytope planted_polytope(std::size_t n, std::size_t d, std::size_t k, double noise,
                                        std::uint64_t seed, bool include_vertices = true) {
  detail::require(d >= 1 && k >= 1, "planted_polytope: d and k must be positive");
  detail::require(n >= (include_vertices ? k : 1), "planted_polytope: n too small");
  detail::require(noise >= 0.0, "planted_polytope: noise must be nonnegative");
  const CounterRng root(seed);

  PlantedPolytope out{DenseMatrix(d, n), DenseMatrix(d, k)};
  CounterRng vrng = root.split(0);
  for (std::size_t j = 0; j < k; ++j)
    for (double& e : out.vertices.col(j)) e = vrng.gaussian();

  std::vector<double> w(k);
  for (std::size_t j = 0; j < n; ++j) {
    auto col = out.points.col(j);
    if (include_vertices && j < k) {
      std::copy(out.vertices.col(j).begin(), out.vertices.col(j).end(), col.begin());
      continue;
    }
    CounterRng rng = root.split(1 + j);
    double total = 0.0;
    for (double& e : w) total += (e = rng.exponential());
    for (std::size_t c = 0; c < k; ++c) axpy(w[c] / total, out.vertices.col(c), col);
    if (noise > 0.0)
      for (double& e : col) e += noise * rng.gaussian();
  }
  return out;
}

/// G·H/√rank + noise·E with G (d x rank), H (rank x n) and E standard Gaussian.
inline DenseMatrix lowrank_noise(std::size_t n, std::size_t d, std::size_t rank, double noise,
                                 std::uint64_t seed) {
  detail::require(rank >= 1 && rank <= std::min(n, d), "lowrank_noise: rank out of range");
  detail::require(noise >= 0.0, "lowrank_noise: noise must be nonnegative");
  const CounterRng root(seed);
  DenseMatrix g(d, rank), h(rank, n);
  CounterRng grng = root.split(0);
  for (double& e : g.data()) e = grng.gaussian();
  for (std::size_t j = 0; j < n; ++j) {
    CounterRng hrng = root.split(1 + j);
    for (double& e : h.col(j)) e = hrng.gaussian() / std::sqrt(static_cast<double>(rank));
  }
  DenseMatrix x = matmul(g, h);
  if (noise > 0.0) {
    for (std::size_t j = 0; j < n; ++j) {
      CounterRng nrng = root.split(1 + n + j);
      for (double& e : x.col(j)) e += noise * nrng.gaussian();
    }
  }
  return x;
}

struct CurvaturePolygon {
  DenseMatrix points;            // 2 x (vertices + interior)
  std::vector<double> curvature;  // exact κ per point, zero for interior points
};

/// Convex polygon circumscribed about the unit circle whose j-th vertex has
/// exterior angle 2π·profile[j], followed by `interior` points drawn
/// uniformly from the disk of radius 0.9 (strictly inside the polygon).
/// The profile must be positive, each entry below 1/2, and sum to 1. The
/// whole figure is rotated by a seed-dependent angle.
inline CurvaturePolygon polygon_from_curvature(const std::vector<double>& profile, std::size_t interior,
                                               std::uint64_t seed) {
  detail::require(profile.size() >= 3, "polygon_from_curvature: need at least three vertices");
  double sum = 0.0;
  for (double k : profile) {
    detail::require(k > 0.0 && k < 0.5, "polygon_from_curvature: each curvature must lie in (0, 1/2)");
    sum += k;
  }
  detail::require(std::abs(sum - 1.0) < 1e-9, "polygon_from_curvature: curvatures must sum to 1");

  const double two_pi = 2.0 * std::numbers::pi;
  const CounterRng root(seed);
  CounterRng rng = root.split(0);
  const std::size_t nv = profile.size();
  CurvaturePolygon out{DenseMatrix(2, nv + interior), std::vector<double>(nv + interior, 0.0)};

  // Vertex j's normal cone spans [phi, phi + 2π·κ_j]; it sits on the bisector
  // at distance 1/cos(half-angle) from the origin.
  double phi = two_pi * rng.uniform();
  for (std::size_t j = 0; j < nv; ++j) {
    const double half = 0.5 * two_pi * profile[j];
    const double r = 1.0 / std::cos(half);
    out.points(0, j) = r * std::cos(phi + half);
    out.points(1, j) = r * std::sin(phi + half);
    out.curvature[j] = profile[j];
    phi += 2.0 * half;
  }
  for (std::size_t i = 0; i < interior; ++i) {
    const double radius = 0.9 * std::sqrt(rng.uniform());
    const double theta = two_pi * rng.uniform();
    out.points(0, nv + i) = radius * std::cos(theta);
    out.points(1, nv + i) = radius * std::sin(theta);
  }
  return out;
}

inline CurvaturePolygon regular_polygon(std::size_t sides, std::size_t interior, std::uint64_t seed) {
  return polygon_from_curvature(std::vector<double>(sides, 1.0 / static_cast<double>(sides)), interior,
                                seed);
}

}  // namespace aakit
