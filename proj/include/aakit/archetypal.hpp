#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "simplex.hpp"

namespace aakit {

struct AAConfig {
  std::size_t k = 1;
  double rel_tol = 1e-3;
  std::size_t max_outer_iters = 200;
  std::size_t kmeans_iters = 25;
  std::uint64_t seed = 0;
  bool degenerate_reset = true;
  std::size_t workers = 1;

  void validate() const {
    detail::require(k >= 1, "AAConfig: k must be positive");
    detail::require(rel_tol > 0.0 && rel_tol < 1.0, "AAConfig: rel_tol must lie in (0, 1)");
  }
};

/// Fitted archetypal model: x ≈ dict · a · b, archetypes = dict · a.
struct AAModel {
  StochasticMatrix a;  // n_dict x k
  StochasticMatrix b;  // k x N
  DenseMatrix archetypes;
  std::vector<double> objective_trace;  // after every half-step
  bool converged = false;
  std::size_t outer_iterations = 0;
};

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

}  // namespace detail

/// Initial archetypes by k-means: k-means++ seeding, up to `iters` Lloyd
/// steps, then each center snapped to its nearest column (lowest index on
/// ties, skipping columns already taken). Returns the selection matrix A.
inline StochasticMatrix kmeans_init(const DenseMatrix& x, std::size_t k, std::uint64_t seed,
                                    std::size_t iters) {
  const std::size_t n = x.cols();
  detail::require(k >= 1, "kmeans_init: k must be positive");
  detail::require(k <= n, "kmeans_init: k exceeds the number of points");
  CounterRng rng = CounterRng(seed).split(0x6b6d);

  // k-means++ seeding.
  std::vector<std::size_t> seeds;
  std::vector<bool> taken(n, false);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  seeds.push_back(static_cast<std::size_t>(rng.below(n)));
  taken[seeds.back()] = true;
  while (seeds.size() < k) {
    const auto last = x.col(seeds.back());
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      d2[j] = std::min(d2[j], detail::squared_distance(x.col(j), last));
      if (!taken[j]) total += d2[j];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (std::size_t j = 0; j < n; ++j) {
        if (taken[j] || d2[j] == 0.0) continue;
        pick = j;
        u -= d2[j];
        if (u < 0.0) break;
      }
    } else {
      // Fewer distinct points than k: pick uniformly among the untaken ones.
      std::size_t r = static_cast<std::size_t>(rng.below(n - seeds.size()));
      for (std::size_t j = 0; j < n; ++j) {
        if (taken[j]) continue;
        if (r-- == 0) {
          pick = j;
          break;
        }
      }
    }
    seeds.push_back(pick);
    taken[pick] = true;
  }

  // Lloyd iterations on the centers.
  const std::size_t d = x.rows();
  DenseMatrix centers = select_columns(x, seeds);
  std::vector<std::size_t> label(n, k);
  for (std::size_t it = 0; it < iters; ++it) {
    bool changed = false;
    for (std::size_t j = 0; j < n; ++j) {
      std::size_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double dist = detail::squared_distance(x.col(j), centers.col(c));
        if (dist < best_d) {
          best_d = dist;
          best = c;
        }
      }
      if (label[j] != best) {
        label[j] = best;
        changed = true;
      }
    }
    if (!changed) break;
    DenseMatrix sums(d, k);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t j = 0; j < n; ++j) {
      axpy(1.0, x.col(j), sums.col(label[j]));
      ++sizes[label[j]];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;  // empty cluster keeps its center
      auto dst = centers.col(c);
      auto src = sums.col(c);
      for (std::size_t i = 0; i < d; ++i) dst[i] = src[i] / static_cast<double>(sizes[c]);
    }
  }

  // Snap centers to distinct data columns.
  std::vector<std::size_t> chosen;
  std::vector<bool> used(n, false);
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t best = n;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) continue;
      const double dist = detail::squared_distance(x.col(j), centers.col(c));
      if (dist < best_d) {
        best_d = dist;
        best = j;
      }
    }
    used[best] = true;
    chosen.push_back(best);
  }
  return StochasticMatrix::selection(n, chosen);
}

/// Projection coefficients of every column of x onto conv(z).
inline StochasticMatrix update_b(const DenseMatrix& x, const DenseMatrix& z,
                                 const StochasticMatrix* warm = nullptr, std::size_t workers = 1) {
  detail::require(z.rows() == x.rows(), "update_b: z.rows != x.rows");
  const bool use_warm = warm != nullptr && warm->rows() == z.cols() && warm->cols() == x.cols();
  const SimplexLeastSquares solver(z);
  DenseMatrix b(z.cols(), x.cols());
  parallel_chunks(x.cols(), workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t j = begin; j < end; ++j) {
      const QPSolution sol = use_warm ? solver.solve(x.col(j), warm->col(j)) : solver.solve(x.col(j));
      std::copy(sol.point.coeffs().begin(), sol.point.coeffs().end(), b.col(j).begin());
    }
  });
  return StochasticMatrix(std::move(b));
}

/// One Gauss-Seidel sweep over the archetypes. For each i in turn the
/// column a[:, i] is re-solved against the target
///   t_i = D_i · b[i, :]ᵀ / ‖b[i, :]‖²,  D_i = x − Σ_{s≠i} z_s b[s, :],
/// with the residual R = x − Z·B kept up to date between steps. An archetype
/// whose row of b is numerically zero is moved, when `reset_degenerate` is
/// set, to the best convex fit (over dict) of the worst-fit column of x.
inline StochasticMatrix update_a_gauss_seidel(const DenseMatrix& x, const DenseMatrix& dict,
                                              const StochasticMatrix& a, const StochasticMatrix& b,
                                              const SimplexLeastSquares& solver,
                                              bool reset_degenerate = true) {
  detail::require(dict.rows() == x.rows(), "update_a: dict.rows != x.rows");
  detail::require(a.rows() == dict.cols() && a.cols() == b.rows() && b.cols() == x.cols(),
                  "update_a: inconsistent factor shapes");
  detail::require(&solver.dictionary() == &dict, "update_a: solver built for another dictionary");
  const std::size_t k = a.cols();
  const std::size_t n = x.cols();
  const std::size_t d = x.rows();

  DenseMatrix anew = a.matrix();
  DenseMatrix z = matmul(dict, anew);
  DenseMatrix r = x - matmul(z, b.matrix());

  std::vector<double> row(n), target(d), delta(d);
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < n; ++j) row[j] = b(i, j);
    const double row_sq = dot(row, row);
    std::vector<double> coeffs;
    if (std::sqrt(row_sq) < 1e-12) {
      if (!reset_degenerate) continue;
      std::size_t worst = 0;
      double worst_sq = -1.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double s = dot(r.col(j), r.col(j));
        if (s > worst_sq) {
          worst_sq = s;
          worst = j;
        }
      }
      const QPSolution sol = solver.solve(x.col(worst));
      coeffs.assign(sol.point.coeffs().begin(), sol.point.coeffs().end());
    } else {
      // t = z_i + R·rowᵀ / ‖row‖²
      std::copy(z.col(i).begin(), z.col(i).end(), target.begin());
      for (std::size_t j = 0; j < n; ++j)
        if (row[j] != 0.0) axpy(row[j] / row_sq, r.col(j), target);
      const QPSolution sol = solver.solve(target, anew.col(i));
      coeffs.assign(sol.point.coeffs().begin(), sol.point.coeffs().end());
    }
    std::copy(coeffs.begin(), coeffs.end(), anew.col(i).begin());
    const std::vector<double> zi = matvec(dict, coeffs);
    for (std::size_t q = 0; q < d; ++q) delta[q] = z(q, i) - zi[q];
    std::copy(zi.begin(), zi.end(), z.col(i).begin());
    // R ← R + (z_old − z_new)·row
    for (std::size_t j = 0; j < n; ++j)
      if (row[j] != 0.0) axpy(row[j], delta, r.col(j));
  }
  return StochasticMatrix(std::move(anew));
}

inline StochasticMatrix update_a_gauss_seidel(const DenseMatrix& x, const DenseMatrix& dict,
                                              const StochasticMatrix& a, const StochasticMatrix& b,
                                              bool reset_degenerate = true) {
  const SimplexLeastSquares solver(dict);
  return update_a_gauss_seidel(x, dict, a, b, solver, reset_degenerate);
}

/// Alternating minimization: B-update, Gauss-Seidel A-update, repeated
/// until the relative decrease over a full iteration drops below rel_tol,
/// then a final B-update. The objective is recorded after every half-step.
inline AAModel fit(const DenseMatrix& x, const DenseMatrix& dict, const AAConfig& cfg) {
  cfg.validate();
  detail::require(dict.rows() == x.rows(), "fit: dict.rows != x.rows");
  detail::require(cfg.k <= dict.cols(), "fit: k exceeds the number of dictionary columns");
  detail::require(x.cols() >= 1, "fit: no data points");

  AAModel model;
  StochasticMatrix a = kmeans_init(dict, cfg.k, cfg.seed, cfg.kmeans_iters);
  const SimplexLeastSquares dict_solver(dict);
  std::optional<StochasticMatrix> b;

  auto record = [&](const StochasticMatrix& bb) {
    const double obj = aa_objective(x, dict, a, bb);
    model.objective_trace.push_back(obj);
    if (!std::isfinite(obj))
      throw NumericFailure("fit: objective became non-finite", model.objective_trace);
    return obj;
  };

  double baseline = 0.0;
  for (std::size_t it = 0; it < cfg.max_outer_iters; ++it) {
    b = update_b(x, matmul(dict, a.matrix()), b ? &*b : nullptr, cfg.workers);
    const double after_b = record(*b);
    if (it == 0) baseline = after_b;
    if (baseline == 0.0) {
      model.converged = true;
      model.outer_iterations = it;
      break;
    }
    a = update_a_gauss_seidel(x, dict, a, *b, dict_solver, cfg.degenerate_reset);
    const double after_a = record(*b);
    model.outer_iterations = it + 1;
    if (after_a == 0.0 || (baseline - after_a) / baseline < cfg.rel_tol) {
      model.converged = true;
      break;
    }
    baseline = after_a;
  }
  b = update_b(x, matmul(dict, a.matrix()), b ? &*b : nullptr, cfg.workers);
  record(*b);

  model.archetypes = matmul(dict, a.matrix());
  model.a = std::move(a);
  model.b = std::move(*b);
  return model;
}

}  // namespace aakit
