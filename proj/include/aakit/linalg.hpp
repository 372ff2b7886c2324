#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"
#include "random.hpp"

namespace aakit {

struct QRFactors {
  DenseMatrix q;  // m x r, orthonormal columns
  DenseMatrix r;  // r x n, upper staircase (row echelon)
  std::vector<std::size_t> kept_columns;  // input columns that produced a pivot
};

/// Householder QR. A column whose remaining norm falls below
/// `drop_tolerance` times the largest input column norm is treated as
/// dependent: it gets no reflector and Q loses the corresponding column.
/// QR = a still holds for every column, dropped or not.
inline QRFactors qr_householder(const DenseMatrix& a, double drop_tolerance = 1e-12) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  DenseMatrix w = a;

  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, norm2(a.col(j)));
  const double threshold = drop_tolerance * scale;

  std::vector<std::vector<double>> reflectors;  // v for rows [rank, m), stored in order
  std::vector<std::size_t> kept;
  std::size_t rank = 0;
  for (std::size_t j = 0; j < n && scale > 0.0; ++j) {
    if (rank == m) break;
    auto cj = w.col(j);
    double sq = 0.0;
    for (std::size_t i = rank; i < m; ++i) sq += cj[i] * cj[i];
    const double norm = std::sqrt(sq);
    if (!(norm > threshold)) continue;

    const double alpha = cj[rank] >= 0.0 ? -norm : norm;
    std::vector<double> v(cj.begin() + static_cast<std::ptrdiff_t>(rank), cj.end());
    v[0] -= alpha;
    const double vnorm2 = dot(v, v);
    for (std::size_t c = j; c < n; ++c) {
      auto col = w.col(c);
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * col[rank + i];
      const double f = 2.0 * s / vnorm2;
      for (std::size_t i = 0; i < v.size(); ++i) col[rank + i] -= f * v[i];
    }
    cj[rank] = alpha;
    for (std::size_t i = rank + 1; i < m; ++i) cj[i] = 0.0;
    reflectors.push_back(std::move(v));
    kept.push_back(j);
    ++rank;
  }

  QRFactors out;
  out.r = DenseMatrix(rank, n);
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < rank; ++i) out.r(i, j) = w(i, j);

  // Q = H_0 H_1 ... H_{r-1} applied to the first r columns of the identity.
  out.q = DenseMatrix(m, rank);
  for (std::size_t i = 0; i < rank; ++i) out.q(i, i) = 1.0;
  for (std::size_t h = rank; h-- > 0;) {
    const auto& v = reflectors[h];
    const double vnorm2 = dot(v, v);
    for (std::size_t c = h; c < rank; ++c) {
      auto col = out.q.col(c);
      double s = 0.0;
      for (std::size_t i = 0; i < v.size(); ++i) s += v[i] * col[h + i];
      const double f = 2.0 * s / vnorm2;
      for (std::size_t i = 0; i < v.size(); ++i) col[h + i] -= f * v[i];
    }
  }
  out.kept_columns = std::move(kept);
  return out;
}

/// Thin SVD: a = U · diag(sigma) · Vᵀ with r = min(m, n).
struct SVDFactors {
  DenseMatrix u;              // m x r
  std::vector<double> sigma;  // r, nonincreasing, >= 0
  DenseMatrix v;              // n x r
};

namespace detail {

inline double hypot_safe(double a, double b) noexcept {
  const double aa = std::abs(a);
  const double ab = std::abs(b);
  if (aa > ab) return aa * std::sqrt(1.0 + (ab / aa) * (ab / aa));
  return ab == 0.0 ? 0.0 : ab * std::sqrt(1.0 + (aa / ab) * (aa / ab));
}

inline double with_sign(double magnitude, double sign_of) noexcept {
  return sign_of >= 0.0 ? std::abs(magnitude) : -std::abs(magnitude);
}

// Golub–Reinsch on a tall matrix (m >= n), overwritten by U. Returns w and V
// unsorted.
inline void svd_tall_inplace(DenseMatrix& a, std::vector<double>& w, DenseMatrix& v) {
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  w.assign(n, 0.0);
  v = DenseMatrix(n, n);
  std::vector<double> rv1(n, 0.0);
  std::vector<double> rowdot(m, 0.0);

  // Householder reduction to bidiagonal form.
  double g = 0.0, scale = 0.0, anorm = 0.0;
  std::size_t l = 0;
  for (std::size_t i = 0; i < n; ++i) {
    l = i + 1;
    rv1[i] = scale * g;
    g = 0.0;
    double s = 0.0;
    scale = 0.0;
    if (i < m) {
      auto ci = a.col(i);
      for (std::size_t k = i; k < m; ++k) scale += std::abs(ci[k]);
      if (scale != 0.0) {
        for (std::size_t k = i; k < m; ++k) {
          ci[k] /= scale;
          s += ci[k] * ci[k];
        }
        const double f = ci[i];
        g = -with_sign(std::sqrt(s), f);
        const double h = f * g - s;
        ci[i] = f - g;
        for (std::size_t j = l; j < n; ++j) {
          auto cj = a.col(j);
          double sj = 0.0;
          for (std::size_t k = i; k < m; ++k) sj += ci[k] * cj[k];
          const double fj = sj / h;
          for (std::size_t k = i; k < m; ++k) cj[k] += fj * ci[k];
        }
        for (std::size_t k = i; k < m; ++k) ci[k] *= scale;
      }
    }
    w[i] = scale * g;
    g = 0.0;
    s = 0.0;
    scale = 0.0;
    if (i < m && i + 1 != n) {
      for (std::size_t k = l; k < n; ++k) scale += std::abs(a(i, k));
      if (scale != 0.0) {
        for (std::size_t k = l; k < n; ++k) {
          a(i, k) /= scale;
          s += a(i, k) * a(i, k);
        }
        const double f = a(i, l);
        g = -with_sign(std::sqrt(s), f);
        const double h = f * g - s;
        a(i, l) = f - g;
        for (std::size_t k = l; k < n; ++k) rv1[k] = a(i, k) / h;
        std::fill(rowdot.begin() + static_cast<std::ptrdiff_t>(l), rowdot.end(), 0.0);
        for (std::size_t k = l; k < n; ++k) {
          const double aik = a(i, k);
          auto ck = a.col(k);
          for (std::size_t j = l; j < m; ++j) rowdot[j] += ck[j] * aik;
        }
        for (std::size_t k = l; k < n; ++k) {
          const double r = rv1[k];
          auto ck = a.col(k);
          for (std::size_t j = l; j < m; ++j) ck[j] += rowdot[j] * r;
        }
        for (std::size_t k = l; k < n; ++k) a(i, k) *= scale;
      }
    }
    anorm = std::max(anorm, std::abs(w[i]) + std::abs(rv1[i]));
  }

  // Accumulate right-hand transformations.
  for (std::size_t i = n; i-- > 0;) {
    if (i + 1 < n) {
      if (g != 0.0) {
        for (std::size_t j = l; j < n; ++j) v(j, i) = (a(i, j) / a(i, l)) / g;
        for (std::size_t j = l; j < n; ++j) {
          double s = 0.0;
          for (std::size_t k = l; k < n; ++k) s += a(i, k) * v(k, j);
          for (std::size_t k = l; k < n; ++k) v(k, j) += s * v(k, i);
        }
      }
      for (std::size_t j = l; j < n; ++j) {
        v(i, j) = 0.0;
        v(j, i) = 0.0;
      }
    }
    v(i, i) = 1.0;
    g = rv1[i];
    l = i;
  }

  // Accumulate left-hand transformations.
  for (std::size_t i = std::min(m, n); i-- > 0;) {
    l = i + 1;
    g = w[i];
    for (std::size_t j = l; j < n; ++j) a(i, j) = 0.0;
    auto ci = a.col(i);
    if (g != 0.0) {
      g = 1.0 / g;
      for (std::size_t j = l; j < n; ++j) {
        auto cj = a.col(j);
        double s = 0.0;
        for (std::size_t k = l; k < m; ++k) s += ci[k] * cj[k];
        const double f = (s / ci[i]) * g;
        for (std::size_t k = i; k < m; ++k) cj[k] += f * ci[k];
      }
      for (std::size_t j = i; j < m; ++j) ci[j] *= g;
    } else {
      for (std::size_t j = i; j < m; ++j) ci[j] = 0.0;
    }
    ci[i] += 1.0;
  }

  // Diagonalize the bidiagonal form by implicit-shift QR.
  const double eps = std::numeric_limits<double>::epsilon();
  const std::size_t max_sweeps = 100 * std::max<std::size_t>(n, 1);
  std::size_t sweeps = 0;
  auto rotate_cols = [](DenseMatrix& mat, std::size_t p, std::size_t q, double c, double s) {
    auto cp = mat.col(p);
    auto cq = mat.col(q);
    for (std::size_t r = 0; r < cp.size(); ++r) {
      const double y = cp[r];
      const double z = cq[r];
      cp[r] = y * c + z * s;
      cq[r] = z * c - y * s;
    }
  };

  for (std::size_t k = n; k-- > 0;) {
    for (;;) {
      bool need_cancel = true;
      std::size_t lo = k;
      for (;; --lo) {
        if (lo == 0 || std::abs(rv1[lo]) <= eps * anorm) {
          need_cancel = false;
          break;
        }
        if (std::abs(w[lo - 1]) <= eps * anorm) break;
      }
      if (need_cancel) {
        // w[lo-1] is negligible: chase rv1[lo] out with Givens rotations.
        const std::size_t nm = lo - 1;
        double c = 0.0, s = 1.0;
        for (std::size_t i = lo; i <= k; ++i) {
          const double f = s * rv1[i];
          rv1[i] = c * rv1[i];
          if (std::abs(f) <= eps * anorm) break;
          g = w[i];
          double h = hypot_safe(f, g);
          w[i] = h;
          h = 1.0 / h;
          c = g * h;
          s = -f * h;
          rotate_cols(a, nm, i, c, s);
        }
      }
      const double z = w[k];
      if (lo == k) {
        if (z < 0.0) {
          w[k] = -z;
          for (double& e : v.col(k)) e = -e;
        }
        break;
      }
      if (++sweeps > max_sweeps) {
        double wmax = 0.0, wmin = std::numeric_limits<double>::infinity();
        for (double e : w) {
          wmax = std::max(wmax, std::abs(e));
          wmin = std::min(wmin, std::abs(e));
        }
        throw NumericFailure("svd_dense: no convergence after " + std::to_string(max_sweeps) +
                             " QR sweeps (condition estimate " +
                             std::to_string(wmin > 0.0 ? wmax / wmin : INFINITY) + ")");
      }
      double x = w[lo];
      const std::size_t nm = k - 1;
      double y = w[nm];
      g = rv1[nm];
      double h = rv1[k];
      double f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
      g = hypot_safe(f, 1.0);
      f = ((x - z) * (x + z) + h * ((y / (f + with_sign(g, f))) - h)) / x;
      double c = 1.0, s = 1.0;
      for (std::size_t j = lo; j <= nm; ++j) {
        const std::size_t i = j + 1;
        g = rv1[i];
        y = w[i];
        h = s * g;
        g = c * g;
        double zz = hypot_safe(f, h);
        rv1[j] = zz;
        c = f / zz;
        s = h / zz;
        f = x * c + g * s;
        g = g * c - x * s;
        h = y * s;
        y *= c;
        rotate_cols(v, j, i, c, s);
        zz = hypot_safe(f, h);
        w[j] = zz;
        if (zz != 0.0) {
          zz = 1.0 / zz;
          c = f * zz;
          s = h * zz;
        }
        f = c * g + s * y;
        x = c * y - s * g;
        rotate_cols(a, j, i, c, s);
      }
      rv1[lo] = 0.0;
      rv1[k] = f;
      w[k] = x;
    }
  }
}

}  // namespace detail

/// Thin SVD by Householder bidiagonalization and implicit-shift QR on the
/// bidiagonal (Golub–Reinsch). Singular values are returned nonincreasing.
inline SVDFactors svd_dense(const DenseMatrix& a) {
  detail::require(a.all_finite(), "svd_dense: non-finite entries");
  const bool wide = a.rows() < a.cols();
  DenseMatrix work = wide ? transpose(a) : a;
  SVDFactors out;
  if (work.cols() == 0) {
    out.u = DenseMatrix(a.rows(), 0);
    out.v = DenseMatrix(a.cols(), 0);
    return out;
  }
  std::vector<double> w;
  DenseMatrix v;
  detail::svd_tall_inplace(work, w, v);

  const std::size_t r = w.size();
  std::vector<std::size_t> order(r);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t p, std::size_t q) { return w[p] > w[q]; });

  DenseMatrix left(work.rows(), r), right(v.rows(), r);
  out.sigma.resize(r);
  for (std::size_t c = 0; c < r; ++c) {
    out.sigma[c] = w[order[c]];
    std::copy_n(work.col(order[c]).begin(), work.rows(), left.col(c).begin());
    std::copy_n(v.col(order[c]).begin(), v.rows(), right.col(c).begin());
  }
  if (wide) {
    out.u = std::move(right);
    out.v = std::move(left);
  } else {
    out.u = std::move(left);
    out.v = std::move(right);
  }
  return out;
}

/// U_p · diag(sigma_p) · V_pᵀ.
inline DenseMatrix reconstruct(const SVDFactors& f, std::size_t rank) {
  rank = std::min(rank, f.sigma.size());
  DenseMatrix us(f.u.rows(), rank);
  for (std::size_t c = 0; c < rank; ++c) {
    auto src = f.u.col(c);
    auto dst = us.col(c);
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * f.sigma[c];
  }
  DenseMatrix vt(rank, f.v.rows());
  for (std::size_t c = 0; c < rank; ++c)
    for (std::size_t i = 0; i < f.v.rows(); ++i) vt(c, i) = f.v(i, c);
  return matmul(us, vt);
}

/// Largest singular value by power iteration on aᵀa.
inline double spectral_norm(const DenseMatrix& a, double rel_tol = 1e-10, std::size_t max_iter = 10000) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  CounterRng rng(0x5eed5eedULL);
  std::vector<double> x(a.cols());
  for (double& e : x) e = rng.gaussian();
  double nx = norm2(x);
  for (double& e : x) e /= nx;

  double sigma = 0.0;
  for (std::size_t it = 0; it < max_iter; ++it) {
    const std::vector<double> ax = matvec(a, x);
    const double next = norm2(ax);
    if (next == 0.0) {
      // x fell into the null space; only possible for the zero matrix in exact arithmetic.
      if (frobenius_norm(a) == 0.0) return 0.0;
      for (double& e : x) e = rng.gaussian();
      nx = norm2(x);
      for (double& e : x) e /= nx;
      continue;
    }
    std::vector<double> y = matvec_t(a, ax);
    const double ny = norm2(y);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = y[i] / ny;
    const bool done = std::abs(next - sigma) <= rel_tol * next;
    sigma = next;
    if (done) break;
  }
  // Final Rayleigh estimate from the normalized iterate.
  return std::max(sigma, norm2(matvec(a, x)));
}

}  // namespace aakit
