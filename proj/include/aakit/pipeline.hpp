#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "archetypal.hpp"
#include "errors.hpp"
#include "hull.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "random.hpp"
#include "sketch.hpp"

namespace aakit {

struct AAAConfig {
  std::size_t k = 1;
  std::size_t p = 20;
  std::optional<std::size_t> s;  // default: krylov_default_s(N)
  LogBase s_log_base = LogBase::Natural;
  std::uint64_t m = 10000;
  double eta = 0.003;
  std::uint64_t seed = 0;
  AAConfig aa;  // aa.k and aa.seed are overwritten from k and seed
  std::size_t workers = 1;

  void validate() const {
    detail::require(k >= 1, "AAAConfig: k must be positive");
    detail::require(p >= 1, "AAAConfig: p must be positive");
    detail::require(m >= 1, "AAAConfig: m must be positive");
    detail::require(eta > 0.0 && eta < 3.0, "AAAConfig: eta must lie in (0, 3)");
  }
};

struct StageTimings {
  double sketch_ms = 0.0;
  double hull_ms = 0.0;
  double fit_ms = 0.0;
};

struct AAAResult {
  AAModel model;  // a is N x k, zero outside support; archetypes = x · a
  HullSupport support;
  SketchResult sketch;
  StageTimings timings;
  double reduced_objective = 0.0;   // on x_tilde against x_tilde[:, T]
  double original_objective = 0.0;  // aa_objective(x, x, a, b)
};

namespace detail {

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double elapsed_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

// Independent stage seeds derived from one user seed.
inline std::uint64_t stage_seed(std::uint64_t seed, std::uint64_t stage) {
  return CounterRng(seed).split(stage).next_u64();
}

}  // namespace detail

/// Approximate archetypal analysis: sketch X to rank p, keep the
/// high-curvature columns of the sketch, fit AA on the sketch against that
/// reduced dictionary, then lift A back to N rows with zeros elsewhere.
inline AAAResult fit_aaa(const DenseMatrix& x, const AAAConfig& cfg) {
  cfg.validate();
  const std::size_t n = x.cols();
  detail::require(n >= 2, "fit_aaa: need at least two points");

  AAAResult out;
  const std::size_t s = cfg.s.value_or(krylov_default_s(n, cfg.s_log_base));

  detail::Stopwatch clock;
  out.sketch = block_krylov_sketch(x, cfg.p, s, detail::stage_seed(cfg.seed, 1), cfg.workers);
  out.timings.sketch_ms = clock.elapsed_ms();

  detail::Stopwatch hull_clock;
  out.support = approx_convex_hull(out.sketch.x_tilde, cfg.m, cfg.eta, detail::stage_seed(cfg.seed, 2),
                                   cfg.workers);
  out.timings.hull_ms = hull_clock.elapsed_ms();

  const std::size_t t_size = out.support.indices.size();
  if (cfg.k > t_size)
    throw ConfigError("fit_aaa: k=" + std::to_string(cfg.k) + " exceeds the " +
                      std::to_string(t_size) +
                      " retained hull points |T|; decrease eta or increase the number of projections");

  detail::Stopwatch fit_clock;
  AAConfig aa = cfg.aa;
  aa.k = cfg.k;
  aa.seed = detail::stage_seed(cfg.seed, 3);
  aa.workers = cfg.workers;
  const DenseMatrix dict = select_columns(out.sketch.x_tilde, out.support.indices);
  AAModel reduced = fit(out.sketch.x_tilde, dict, aa);
  out.timings.fit_ms = fit_clock.elapsed_ms();
  out.reduced_objective = reduced.objective_trace.back();

  DenseMatrix lifted(n, cfg.k);
  for (std::size_t c = 0; c < cfg.k; ++c)
    for (std::size_t r = 0; r < t_size; ++r) lifted(out.support.indices[r], c) = reduced.a(r, c);

  out.model.a = StochasticMatrix(std::move(lifted));
  out.model.b = std::move(reduced.b);
  out.model.archetypes = matmul(x, out.model.a.matrix(), cfg.workers);
  out.model.objective_trace = std::move(reduced.objective_trace);
  out.model.converged = reduced.converged;
  out.model.outer_iterations = reduced.outer_iterations;
  out.original_objective = aa_objective(x, x, out.model.a, out.model.b);
  return out;
}

struct SvdAAResult {
  AAModel model;  // a is N x k, archetypes = x · a
  std::size_t rank = 0;
  double original_objective = 0.0;
};

namespace detail {

inline SvdAAResult fit_on_svd_representation(const DenseMatrix& x, const SVDFactors& f, std::size_t rank,
                                             const AAConfig& cfg) {
  DenseMatrix rep(rank, x.cols());
  for (std::size_t i = 0; i < rank; ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) rep(i, j) = f.sigma[i] * f.v(j, i);
  SvdAAResult out;
  out.rank = rank;
  out.model = fit(rep, rep, cfg);
  out.model.archetypes = matmul(x, out.model.a.matrix(), cfg.workers);
  out.original_objective = aa_objective(x, x, out.model.a, out.model.b);
  return out;
}

}  // namespace detail

/// Smallest p with Σ_{i≤p} σᵢ² ≥ variance_keep · Σ σᵢ² (at least 1).
inline std::size_t rank_for_variance(const std::vector<double>& sigma, double variance_keep) {
  double total = 0.0;
  for (double s : sigma) total += s * s;
  if (total == 0.0) return std::min<std::size_t>(1, sigma.size());
  double acc = 0.0;
  for (std::size_t p = 0; p < sigma.size(); ++p) {
    acc += sigma[p] * sigma[p];
    // Relative slack absorbs rounding when variance_keep = 1.
    if (acc >= variance_keep * total * (1.0 - 1e-14)) return p + 1;
  }
  return sigma.size();
}

/// AA on the exact truncated SVD representation Σ_p V_pᵀ, with p chosen to
/// keep `variance_keep` of Σσᵢ². The objective is re-evaluated on x.
inline SvdAAResult fit_svd_aa(const DenseMatrix& x, std::size_t k, double variance_keep,
                              const AAConfig& cfg) {
  detail::require(variance_keep > 0.0 && variance_keep <= 1.0, "fit_svd_aa: variance_keep must lie in (0, 1]");
  const SVDFactors f = svd_dense(x);
  AAConfig c = cfg;
  c.k = k;
  return detail::fit_on_svd_representation(x, f, rank_for_variance(f.sigma, variance_keep), c);
}

/// AA on Σ_p V_pᵀ for a fixed rank p.
inline SvdAAResult fit_svd_aa_rank(const DenseMatrix& x, std::size_t k, std::size_t rank,
                                   const AAConfig& cfg) {
  const SVDFactors f = svd_dense(x);
  detail::require(rank >= 1 && rank <= f.sigma.size(), "fit_svd_aa_rank: rank out of range");
  AAConfig c = cfg;
  c.k = k;
  return detail::fit_on_svd_representation(x, f, rank, c);
}

/// 1 − ‖x − x·A·B‖_F² / Σᵢ‖xᵢ − x̄‖², for a model whose A indexes columns of x.
inline double explained_variance(const DenseMatrix& x, const AAModel& model) {
  detail::require(model.a.rows() == x.cols() && model.b.cols() == x.cols(),
                  "explained_variance: model does not index the columns of x");
  const double n = static_cast<double>(x.cols());
  const double residual_sq = std::pow(aa_objective(x, x, model.a, model.b), 2) * n;
  bool constant = true;
  double scale = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) {
    constant = constant && std::equal(x.col(j).begin(), x.col(j).end(), x.col(0).begin());
    scale += dot(x.col(j), x.col(j));
  }
  if (constant) {
    // Archetypes built from identical columns reproduce them up to rounding.
    if (residual_sq <= 1e-24 * std::max(scale, 1.0)) return 1.0;
    throw NumericFailure("explained_variance: data has zero variance but nonzero residual");
  }
  std::vector<double> mean(x.rows(), 0.0);
  for (std::size_t j = 0; j < x.cols(); ++j) axpy(1.0 / n, x.col(j), mean);
  double total = 0.0;
  for (std::size_t j = 0; j < x.cols(); ++j) total += detail::squared_distance(x.col(j), mean);
  return 1.0 - residual_sq / total;
}

}  // namespace aakit
