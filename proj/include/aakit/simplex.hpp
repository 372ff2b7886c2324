#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "matrix.hpp"

namespace aakit {

/// A point of the probability simplex. Entries below 1e-12 are stored as 0.
class SimplexVector {
 public:
  static constexpr double kZeroCutoff = 1e-12;

  SimplexVector() = default;

  /// Takes coefficients that are already (numerically) on the simplex,
  /// zeroes entries below the cutoff and renormalizes.
  explicit SimplexVector(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    detail::require(!coeffs_.empty(), "SimplexVector: empty");
    double sum = 0.0;
    for (double& c : coeffs_) {
      detail::require(std::isfinite(c) && c > -1e-10, "SimplexVector: negative or non-finite entry");
      if (c < kZeroCutoff) c = 0.0;
      sum += c;
    }
    detail::require(sum > 0.0, "SimplexVector: all entries vanish");
    for (double& c : coeffs_) c /= sum;
  }

  static SimplexVector uniform(std::size_t k) {
    return SimplexVector(std::vector<double>(k, 1.0 / static_cast<double>(k)));
  }

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  double operator[](std::size_t i) const noexcept { return coeffs_[i]; }

 private:
  std::vector<double> coeffs_;
};

namespace detail {

/// Sort-and-threshold projection of v onto the simplex, written to `out`.
/// `sorted` is scratch space of the same length.
inline void project_simplex_into(std::span<const double> v, std::span<double> out, std::span<double> sorted) {
  std::copy(v.begin(), v.end(), sorted.begin());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prefix = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    prefix += sorted[j];
    const double candidate = (prefix - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::max(v[i] - theta, 0.0);
}

}  // namespace detail

/// Euclidean projection onto {w : w >= 0, Σw = 1} by sort and threshold.
inline SimplexVector project_onto_simplex(std::span<const double> v) {
  detail::require(!v.empty(), "project_onto_simplex: empty input");
  std::vector<double> sorted(v.size()), w(v.size());
  detail::project_simplex_into(v, w, sorted);
  return SimplexVector(std::move(w));
}

struct QPSolution {
  SimplexVector point;
  double residual_norm = 0.0;  // ‖Z b − y‖₂ at `point`
  double kkt_residual = 0.0;   // ‖b − Π(b − ∇f(b))‖∞ at `point`
  std::size_t iterations = 0;
  bool converged = false;  // false when the iteration cap was hit
  std::vector<double> restart_trace;  // best objective value recorded at each momentum restart
};

struct SimplexLsqOptions {
  double kkt_tolerance = 1e-10;  // scaled by max(1, ‖y‖₂)
  std::size_t max_iterations = 50000;
  // The nearest-point iteration below takes over after `finish_after`
  // gradient steps (the warm start is still checked first) whenever its
  // working set, at most min(cols, rows + 1) columns, is bounded by
  // `finish_max_support`. Gradient steps resume if it cannot certify. A
  // value of at least max_iterations disables the hand-off.
  std::size_t finish_after = 0;
  std::size_t finish_max_support = 256;
};

namespace detail {

/// Wolfe's nearest-point iteration for min ‖Z λ − y‖ over the simplex,
/// started from vertex `start`. The working set ("corral") stays affinely
/// independent, so it never exceeds rows + 1 columns and the iteration ends
/// after finitely many steps. Writes λ into `lambda` and returns whether the
/// Frank-Wolfe gap fell below `gap_tol`.
inline bool nearest_point_in_hull(const DenseMatrix& z, std::span<const double> y, std::size_t start,
                                  double gap_tol, std::size_t max_major, std::span<double> lambda) {
  const std::size_t k = z.cols();
  const std::size_t d = z.rows();
  const std::size_t cap = std::min(k, d + 1) + 1;
  // gram(a, e) = 1 + ⟨z_a − y, z_e − y⟩ over the corral; chol is its factor.
  std::vector<double> work(2 * cap * cap + 2 * cap + 2 * d);
  double* gram = work.data();
  double* chol = gram + cap * cap;
  double* w = chol + cap * cap;
  double* alpha = w + cap;
  std::span<double> r(alpha + cap, d);
  std::span<double> shifted(alpha + cap + d, d);
  std::size_t corral[66];
  std::vector<std::size_t> corral_heap;
  std::size_t* set = corral;
  if (cap > 66) {
    corral_heap.resize(cap);
    set = corral_heap.data();
  }
  std::size_t size = 0;

  auto add = [&](std::size_t j) {
    for (std::size_t t = 0; t < d; ++t) shifted[t] = z(t, j) - y[t];
    for (std::size_t a = 0; a < size; ++a) {
      double g = 1.0;
      for (std::size_t t = 0; t < d; ++t) g += (z(t, set[a]) - y[t]) * shifted[t];
      gram[a * cap + size] = gram[size * cap + a] = g;
    }
    gram[size * cap + size] = 1.0 + dot(shifted, shifted);
    set[size] = j;
    w[size] = 0.0;
    ++size;
  };
  auto remove = [&](std::size_t a) {
    for (std::size_t i = a; i + 1 < size; ++i) {
      set[i] = set[i + 1];
      w[i] = w[i + 1];
    }
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t e = a; e + 1 < size; ++e) gram[i * cap + e] = gram[i * cap + e + 1];
    for (std::size_t i = a; i + 1 < size; ++i)
      for (std::size_t e = 0; e + 1 < size; ++e) gram[i * cap + e] = gram[(i + 1) * cap + e];
    --size;
  };
  // alpha = gram⁻¹1 / 1ᵀgram⁻¹1, the affine minimizer over the corral.
  auto affine_minimizer = [&]() {
    for (std::size_t a = 0; a < size; ++a)
      for (std::size_t e = 0; e <= a; ++e) {
        double sum = gram[a * cap + e];
        for (std::size_t t = 0; t < e; ++t) sum -= chol[a * cap + t] * chol[e * cap + t];
        if (a == e) {
          if (!(sum > 1e-14 * gram[a * cap + a])) return false;
          chol[a * cap + a] = std::sqrt(sum);
        } else {
          chol[a * cap + e] = sum / chol[e * cap + e];
        }
      }
    for (std::size_t a = 0; a < size; ++a) {
      double v = 1.0;
      for (std::size_t t = 0; t < a; ++t) v -= chol[a * cap + t] * alpha[t];
      alpha[a] = v / chol[a * cap + a];
    }
    for (std::size_t a = size; a-- > 0;) {
      double v = alpha[a];
      for (std::size_t t = a + 1; t < size; ++t) v -= chol[t * cap + a] * alpha[t];
      alpha[a] = v / chol[a * cap + a];
    }
    double total = 0.0;
    for (std::size_t a = 0; a < size; ++a) total += alpha[a];
    if (!(total > 0.0)) return false;
    for (std::size_t a = 0; a < size; ++a) alpha[a] /= total;
    return true;
  };
  auto finish = [&](bool certified) {
    std::fill(lambda.begin(), lambda.end(), 0.0);
    for (std::size_t a = 0; a < size; ++a) lambda[set[a]] = w[a];
    return certified;
  };

  add(start);
  w[0] = 1.0;
  for (std::size_t major = 0; major < max_major; ++major) {
    for (std::size_t t = 0; t < d; ++t) r[t] = -y[t];
    for (std::size_t a = 0; a < size; ++a) axpy(w[a], z.col(set[a]), r);
    // Frank-Wolfe vertex and gap: Σλᵢ⟨r, zᵢ⟩ − minⱼ⟨r, zⱼ⟩ bounds f(λ) − f*.
    double current = 0.0;
    for (std::size_t a = 0; a < size; ++a) current += w[a] * dot(r, z.col(set[a]));
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
      const double v = dot(r, z.col(j));
      if (v < best_value) {
        best_value = v;
        best = j;
      }
    }
    if (current - best_value <= gap_tol) return finish(true);
    if (std::find(set, set + size, best) != set + size || size > d) return finish(false);
    add(best);

    while (true) {
      if (!affine_minimizer()) {
        if (w[size - 1] == 0.0) remove(size - 1);
        return finish(false);
      }
      double theta = 1.0;
      for (std::size_t a = 0; a < size; ++a)
        if (alpha[a] <= 0.0) theta = std::min(theta, w[a] / (w[a] - alpha[a]));
      if (theta >= 1.0) {
        std::copy(alpha, alpha + size, w);
        break;
      }
      if (theta <= 0.0 && alpha[size - 1] <= 0.0 && set[size - 1] == best) {
        // The new vertex cannot enter: no progress is possible in floating point.
        remove(size - 1);
        return finish(false);
      }
      for (std::size_t a = 0; a < size; ++a) w[a] = theta * alpha[a] + (1.0 - theta) * w[a];
      // Drop the coefficients that reached zero, at least the most negative one.
      std::size_t worst = 0;
      for (std::size_t a = 1; a < size; ++a)
        if (w[a] < w[worst]) worst = a;
      w[worst] = 0.0;
      for (std::size_t a = size; a-- > 0;)
        if (alpha[a] <= 0.0 && w[a] <= 1e-15) remove(a);
      if (size == 0) return finish(false);
      double total = 0.0;
      for (std::size_t a = 0; a < size; ++a) total += w[a];
      for (std::size_t a = 0; a < size; ++a) w[a] /= total;
    }
  }
  return finish(false);
}

}  // namespace detail

/// Solver for min ½‖Z b − y‖² over the probability simplex. Holds a
/// reference to Z and its Lipschitz constant so that many right-hand sides
/// can share one setup. Z must outlive the solver.
class SimplexLeastSquares {
 public:
  explicit SimplexLeastSquares(const DenseMatrix& z, SimplexLsqOptions options = {})
      : z_(&z), options_(options) {
    detail::require(z.cols() >= 1, "simplex_lsq: dictionary needs at least one column");
    // Power iteration approaches σ_max from below; pad so 1/L stays a safe step.
    const double s = spectral_norm(z);
    lipschitz_ = s * s * (1.0 + 1e-8);
  }

  double lipschitz() const noexcept { return lipschitz_; }
  const DenseMatrix& dictionary() const noexcept { return *z_; }

  /// Accelerated projected gradient with function-value restart. Starts at
  /// the projection of `warm` when given, otherwise at the barycenter.
  QPSolution solve(std::span<const double> y, std::span<const double> warm = {}) const {
    const DenseMatrix& z = *z_;
    const std::size_t k = z.cols();
    const std::size_t d = z.rows();
    detail::require(y.size() == d, "simplex_lsq: z.rows != length(y)");
    detail::require(warm.empty() || warm.size() == k, "simplex_lsq: warm start has wrong length");

    QPSolution out;
    const double ynorm = norm2(y);
    if (lipschitz_ == 0.0) {
      out.point = SimplexVector::uniform(k);
      out.residual_norm = ynorm;
      out.converged = true;
      return out;
    }
    const double step = 1.0 / lipschitz_;
    const double tol = options_.kkt_tolerance * std::max(1.0, ynorm);

    std::vector<double> work(10 * k + d);
    auto slot = [&](std::size_t i) { return std::span<double>(work.data() + i * k, k); };
    std::span<double> b = slot(0), gb = slot(1), yk = slot(2), gy = slot(3), bn = slot(4), gn = slot(5);
    std::span<double> scratch = slot(6), projected = slot(7), sort_buffer = slot(8), lambda = slot(9);
    std::span<double> r(work.data() + 10 * k, d);

    // r = Z b − y; returns ½‖r‖² and writes ∇f = Zᵀ r into g.
    auto evaluate = [&](std::span<const double> v, std::span<double> g) {
      for (std::size_t t = 0; t < d; ++t) r[t] = -y[t];
      for (std::size_t j = 0; j < k; ++j)
        if (v[j] != 0.0) axpy(v[j], z.col(j), r);
      for (std::size_t j = 0; j < k; ++j) g[j] = dot(z.col(j), r);
      return 0.5 * dot(r, r);
    };
    auto kkt = [&](std::span<const double> v, std::span<const double> g) {
      for (std::size_t j = 0; j < k; ++j) scratch[j] = v[j] - g[j];
      detail::project_simplex_into(scratch, projected, sort_buffer);
      double m = 0.0;
      for (std::size_t j = 0; j < k; ++j) m = std::max(m, std::abs(v[j] - projected[j]));
      return m;
    };

    if (warm.empty()) {
      std::fill(b.begin(), b.end(), 1.0 / static_cast<double>(k));
    } else {
      detail::project_simplex_into(warm, b, sort_buffer);
    }
    double fb = evaluate(b, gb);
    double kkt_b = kkt(b, gb);
    std::size_t it = 0;
    bool stalled = false;

    // Iterates from b until the KKT test passes, a stall, or `limit` total iterations.
    auto accelerate = [&](std::size_t limit) {
      std::copy(b.begin(), b.end(), yk.begin());
      std::copy(gb.begin(), gb.end(), gy.begin());
      double t = 1.0;
      while (kkt_b >= tol && it < limit) {
        ++it;
        for (std::size_t j = 0; j < k; ++j) scratch[j] = yk[j] - step * gy[j];
        detail::project_simplex_into(scratch, bn, sort_buffer);
        const double fn = evaluate(bn, gn);
        if (fn > fb) {
          // Momentum overshot: restart from the best iterate with a plain gradient step.
          out.restart_trace.push_back(fb);
          if (std::equal(yk.begin(), yk.end(), b.begin())) {
            // Even the plain step failed to descend; b is optimal to rounding.
            stalled = true;
            return;
          }
          std::copy(b.begin(), b.end(), yk.begin());
          std::copy(gb.begin(), gb.end(), gy.begin());
          t = 1.0;
          continue;
        }
        const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double beta = (t - 1.0) / tn;
        for (std::size_t j = 0; j < k; ++j) {
          yk[j] = bn[j] + beta * (bn[j] - b[j]);
          gy[j] = gn[j] + beta * (gn[j] - gb[j]);  // ∇f is affine
        }
        std::swap(b, bn);
        std::swap(gb, gn);
        fb = fn;
        t = tn;
        kkt_b = kkt(b, gb);
      }
    };

    const bool finish = options_.finish_after < options_.max_iterations &&
                        std::min(k, d + 1) <= options_.finish_max_support && k > 1;
    accelerate(finish ? options_.finish_after : options_.max_iterations);
    bool certified = false;
    if (finish && kkt_b >= tol && !stalled) {
      const std::size_t start = static_cast<std::size_t>(std::max_element(b.begin(), b.end()) - b.begin());
      const double gap_tol = 1e-15 * std::max(1.0, lipschitz_);
      const bool ok = detail::nearest_point_in_hull(z, y, start, gap_tol, 4 * (d + k) + 100, lambda);
      const double fl = evaluate(lambda, gn);
      if (fl <= fb) {
        std::copy(lambda.begin(), lambda.end(), b.begin());
        std::copy(gn.begin(), gn.end(), gb.begin());
        fb = fl;
        kkt_b = kkt(b, gb);
        certified = ok;
      }
      if (!certified && kkt_b >= tol) accelerate(options_.max_iterations);
    }

    out.point = SimplexVector(std::vector<double>(b.begin(), b.end()));
    std::span<const double> pb = out.point.coeffs();
    out.residual_norm = std::sqrt(2.0 * evaluate(pb, gn));
    out.kkt_residual = kkt(pb, gn);
    out.iterations = it;
    out.converged = certified || stalled || kkt_b < tol;
    return out;
  }

 private:
  const DenseMatrix* z_;
  SimplexLsqOptions options_;
  double lipschitz_ = 0.0;
};

/// One-shot min ‖z b − y‖₂ over the probability simplex.
inline QPSolution simplex_lsq(const DenseMatrix& z, std::span<const double> y,
                              SimplexLsqOptions options = {}) {
  return SimplexLeastSquares(z, options).solve(y);
}

}  // namespace aakit
