#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "linalg.hpp"
#include "matrix.hpp"
#include "random.hpp"

namespace aakit {

/// Reduced representation of a d x N matrix X: X ≈ basis · x_tilde with
/// basis (d x p) orthonormal and x_tilde (p x N).
struct SketchResult {
  DenseMatrix x_tilde;
  DenseMatrix basis;
  std::size_t p = 0;            // columns of basis actually produced
  std::size_t p_requested = 0;
  std::size_t s = 0;            // Krylov depth actually used
  std::size_t s_requested = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;
};

enum class LogBase { Natural, Two };

/// Default Krylov depth ⌈log n⌉, clamped below at 2.
inline std::size_t krylov_default_s(std::size_t n, LogBase base = LogBase::Natural) {
  detail::require(n >= 2, "krylov_default_s: n must be at least 2");
  const double l = base == LogBase::Natural ? std::log(static_cast<double>(n))
                                            : std::log2(static_cast<double>(n));
  return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(l)));
}

namespace detail {

inline DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols, const CounterRng& root) {
  DenseMatrix g(rows, cols);
  for (std::size_t j = 0; j < cols; ++j) {
    CounterRng rng = root.split(j);
    for (double& e : g.col(j)) e = rng.gaussian();
  }
  return g;
}

inline DenseMatrix hcat(const std::vector<DenseMatrix>& blocks, std::size_t rows) {
  std::size_t cols = 0;
  for (const auto& b : blocks) cols += b.cols();
  DenseMatrix out(rows, cols);
  std::size_t c = 0;
  for (const auto& b : blocks)
    for (std::size_t j = 0; j < b.cols(); ++j, ++c)
      std::copy_n(b.col(j).begin(), rows, out.col(c).begin());
  return out;
}

}  // namespace detail

/// Randomized block Krylov iteration.
///
/// Builds K = [XS, (XXᵀ)XS, …, (XXᵀ)^{s−1}XS] for Gaussian S (N x p), takes
/// Q from the QR of K, the SVD X_emd = XᵀQ = U Σ Vᵀ, and returns
/// basis = Q·V[:, :p] and x_tilde = Σ[:p, :p]·U[:, :p]ᵀ so that
/// basis · x_tilde = basis basisᵀ X.
///
/// Every block is re-orthonormalized after each application of XXᵀ; the
/// spanned subspace is unchanged in exact arithmetic. When p·s exceeds
/// min(d, N), s is lowered to ⌊min(d, N)/p⌋ and a warning is recorded. If X
/// has rank below p the basis has fewer than p columns.
inline SketchResult block_krylov_sketch(const DenseMatrix& x, std::size_t p, std::size_t s,
                                        std::uint64_t seed, std::size_t workers = 1) {
  const std::size_t d = x.rows();
  const std::size_t n = x.cols();
  const std::size_t cap = std::min(d, n);
  detail::require(p >= 1, "block_krylov_sketch: p must be positive");
  detail::require(s >= 1, "block_krylov_sketch: s must be positive");
  detail::require(p <= cap, "block_krylov_sketch: p exceeds min(d, N)");

  SketchResult out;
  out.p_requested = p;
  out.s_requested = s;
  out.seed = seed;
  if (p * s > cap) {
    const std::size_t reduced = std::max<std::size_t>(1, cap / p);
    out.warnings.push_back("krylov depth s=" + std::to_string(s) + " reduced to " +
                           std::to_string(reduced) + " because p*s exceeds min(d, N)=" +
                           std::to_string(cap));
    s = reduced;
  }
  out.s = s;

  const CounterRng root(seed);
  const DenseMatrix gauss = detail::gaussian_matrix(n, p, root.split(0));

  std::vector<DenseMatrix> blocks;
  blocks.reserve(s);
  DenseMatrix block = qr_householder(matmul(x, gauss, workers)).q;
  for (std::size_t j = 0; j < s && block.cols() > 0; ++j) {
    if (j > 0) block = qr_householder(matmul(x, matmul_tn(x, block, workers), workers)).q;
    blocks.push_back(block);
  }
  const DenseMatrix q = qr_householder(detail::hcat(blocks, d)).q;

  const DenseMatrix x_emd = matmul_tn(x, q, workers);  // N x r
  const SVDFactors f = svd_dense(x_emd);
  const std::size_t rank = std::min(p, f.sigma.size());
  if (rank < p)
    out.warnings.push_back("data rank " + std::to_string(rank) + " is below requested p=" +
                           std::to_string(p) + "; sketch has " + std::to_string(rank) + " columns");

  out.p = rank;
  out.x_tilde = DenseMatrix(rank, n);
  for (std::size_t i = 0; i < rank; ++i) {
    const auto ui = f.u.col(i);
    for (std::size_t j = 0; j < n; ++j) out.x_tilde(i, j) = f.sigma[i] * ui[j];
  }
  out.basis = matmul(q, leading_columns(f.v, rank), workers);

  // basis · x_tilde must equal basis basisᵀ X.
  const DenseMatrix implied = matmul(out.basis, matmul_tn(out.basis, x, workers), workers);
  const DenseMatrix read_off = matmul(out.basis, out.x_tilde, workers);
  const double scale = std::max(frobenius_norm(x), std::numeric_limits<double>::min());
  if (frobenius_norm(implied - read_off) > 1e-7 * scale)
    throw NumericFailure("block_krylov_sketch: reduced representation disagrees with LLᵀX");
  return out;
}

/// basis · x_tilde.
inline DenseMatrix sketch_reconstruction(const SketchResult& sketch) {
  return matmul(sketch.basis, sketch.x_tilde);
}

/// ‖X − basis · x_tilde‖₂.
inline double sketch_spectral_error(const DenseMatrix& x, const SketchResult& sketch) {
  return spectral_norm(x - sketch_reconstruction(sketch));
}

}  // namespace aakit
