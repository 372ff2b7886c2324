#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "parallel.hpp"

namespace aakit {

/// Column-major dense matrix of doubles. Columns are data points: a d x N
/// data set has `rows() == d` features and `cols() == N` points.
class DenseMatrix {
 public:
  DenseMatrix() = default;

  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> column_major)
      : rows_(rows), cols_(cols), data_(std::move(column_major)) {
    detail::require(data_.size() == rows_ * cols_, "DenseMatrix: data length != rows * cols");
  }

  /// Build from nested row lists, e.g. {{1, 2}, {3, 4}}. Convenient for small literals.
  static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    DenseMatrix m(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      detail::require(row.size() == c, "DenseMatrix::from_rows: ragged rows");
      std::size_t j = 0;
      for (double v : row) m(i, j++) = v;
      ++i;
    }
    return m;
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[j * rows_ + i]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[j * rows_ + i]; }

  std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }
  std::span<const double> col(std::size_t j) const noexcept {
    return {data_.data() + j * rows_, rows_};
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  bool all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Vector helpers over spans.

inline double dot(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(std::span<const double> a) noexcept { return std::sqrt(dot(a, a)); }

inline double norm_inf(std::span<const double> a) noexcept {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

/// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) noexcept {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

// ---------------------------------------------------------------------------
// Matrix operations.

/// Dense product a * b. Output columns may be split across workers; every
/// output entry is produced by exactly one worker, so the result does not
/// depend on the worker count.
inline DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b, std::size_t workers = 1) {
  detail::require(a.cols() == b.rows(), "matmul: a.cols != b.rows");
  DenseMatrix c(a.rows(), b.cols());
  parallel_chunks(b.cols(), workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t j = begin; j < end; ++j) {
      auto cj = c.col(j);
      for (std::size_t l = 0; l < a.cols(); ++l) {
        const double blj = b(l, j);
        if (blj != 0.0) axpy(blj, a.col(l), cj);
      }
    }
  });
  return c;
}

/// aᵀ * b without forming the transpose.
inline DenseMatrix matmul_tn(const DenseMatrix& a, const DenseMatrix& b, std::size_t workers = 1) {
  detail::require(a.rows() == b.rows(), "matmul_tn: a.rows != b.rows");
  DenseMatrix c(a.cols(), b.cols());
  parallel_chunks(b.cols(), workers, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t j = begin; j < end; ++j)
      for (std::size_t i = 0; i < a.cols(); ++i) c(i, j) = dot(a.col(i), b.col(j));
  });
  return c;
}

/// a * x for a vector x.
inline std::vector<double> matvec(const DenseMatrix& a, std::span<const double> x) {
  detail::require(a.cols() == x.size(), "matvec: dimension mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t j = 0; j < a.cols(); ++j)
    if (x[j] != 0.0) axpy(x[j], a.col(j), y);
  return y;
}

/// aᵀ * x for a vector x.
inline std::vector<double> matvec_t(const DenseMatrix& a, std::span<const double> x) {
  detail::require(a.rows() == x.size(), "matvec_t: dimension mismatch");
  std::vector<double> y(a.cols());
  for (std::size_t j = 0; j < a.cols(); ++j) y[j] = dot(a.col(j), x);
  return y;
}

inline DenseMatrix transpose(const DenseMatrix& a) {
  DenseMatrix t(a.cols(), a.rows());
  for (std::size_t j = 0; j < a.cols(); ++j)
    for (std::size_t i = 0; i < a.rows(); ++i) t(j, i) = a(i, j);
  return t;
}

inline DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
  detail::require(a.rows() == b.rows() && a.cols() == b.cols(), "subtract: shape mismatch");
  DenseMatrix c = a;
  auto cd = c.data();
  auto bd = b.data();
  for (std::size_t i = 0; i < cd.size(); ++i) cd[i] -= bd[i];
  return c;
}

inline double frobenius_norm(const DenseMatrix& a) noexcept { return norm2(a.data()); }

/// Columns of `a` listed in `indices`, in that order.
inline DenseMatrix select_columns(const DenseMatrix& a, std::span<const std::size_t> indices) {
  DenseMatrix out(a.rows(), indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j) {
    detail::require(indices[j] < a.cols(), "select_columns: index out of range");
    std::copy_n(a.col(indices[j]).begin(), a.rows(), out.col(j).begin());
  }
  return out;
}

/// Leading `count` columns.
inline DenseMatrix leading_columns(const DenseMatrix& a, std::size_t count) {
  detail::require(count <= a.cols(), "leading_columns: count exceeds cols");
  std::vector<double> data(a.data().begin(), a.data().begin() + static_cast<std::ptrdiff_t>(a.rows() * count));
  return DenseMatrix(a.rows(), count, std::move(data));
}

/// Indices of the first occurrence of every distinct column, in order.
inline std::vector<std::size_t> distinct_column_indices(const DenseMatrix& a) {
  std::vector<std::size_t> order(a.cols());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto col_less = [&](std::size_t p, std::size_t q) {
    auto cp = a.col(p);
    auto cq = a.col(q);
    for (std::size_t i = 0; i < a.rows(); ++i)
      if (cp[i] != cq[i]) return cp[i] < cq[i];
    return p < q;
  };
  std::sort(order.begin(), order.end(), col_less);
  std::vector<std::size_t> keep;
  for (std::size_t n = 0; n < order.size(); ++n) {
    if (n > 0 && std::equal(a.col(order[n]).begin(), a.col(order[n]).end(),
                            a.col(order[n - 1]).begin()))
      continue;
    keep.push_back(order[n]);
  }
  std::sort(keep.begin(), keep.end());
  return keep;
}

// ---------------------------------------------------------------------------

/// Entrywise nonnegative matrix whose columns each sum to one. Entries in
/// [-tolerance, 0) are clamped to zero on construction.
class StochasticMatrix {
 public:
  static constexpr double kDefaultTolerance = 1e-10;

  StochasticMatrix() = default;

  explicit StochasticMatrix(DenseMatrix m, double tolerance = kDefaultTolerance)
      : inner_(std::move(m)), tolerance_(tolerance) {
    for (std::size_t j = 0; j < inner_.cols(); ++j) {
      double sum = 0.0;
      for (double& v : inner_.col(j)) {
        if (!std::isfinite(v) || v < -tolerance_)
          throw ContractViolation("StochasticMatrix: entry " + std::to_string(v) + " in column " +
                                  std::to_string(j) + " is negative or non-finite");
        if (v < 0.0) v = 0.0;
        sum += v;
      }
      if (std::abs(sum - 1.0) > tolerance_)
        throw ContractViolation("StochasticMatrix: column " + std::to_string(j) + " sums to " +
                                std::to_string(sum));
    }
  }

  /// n x k matrix whose column c is the indicator of row indices[c].
  static StochasticMatrix selection(std::size_t n, std::span<const std::size_t> indices) {
    DenseMatrix m(n, indices.size());
    for (std::size_t c = 0; c < indices.size(); ++c) {
      detail::require(indices[c] < n, "StochasticMatrix::selection: index out of range");
      m(indices[c], c) = 1.0;
    }
    return StochasticMatrix(std::move(m));
  }

  static StochasticMatrix uniform(std::size_t rows, std::size_t cols) {
    detail::require(rows >= 1, "StochasticMatrix::uniform: rows must be positive");
    return StochasticMatrix(DenseMatrix(rows, cols, 1.0 / static_cast<double>(rows)));
  }

  const DenseMatrix& matrix() const noexcept { return inner_; }
  std::size_t rows() const noexcept { return inner_.rows(); }
  std::size_t cols() const noexcept { return inner_.cols(); }
  double tolerance() const noexcept { return tolerance_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return inner_(i, j); }
  std::span<const double> col(std::size_t j) const noexcept { return inner_.col(j); }

  friend bool operator==(const StochasticMatrix& a, const StochasticMatrix& b) {
    return a.inner_ == b.inner_;
  }

 private:
  DenseMatrix inner_;
  double tolerance_ = kDefaultTolerance;
};

/// (1/√N)·‖x − dict·a·b‖_F. With dict = x this is the archetypal analysis
/// objective; with dict = x[:, T] it is the objective restricted to conv(x_T).
inline double aa_objective(const DenseMatrix& x, const DenseMatrix& dict, const StochasticMatrix& a,
                           const StochasticMatrix& b) {
  detail::require(dict.rows() == x.rows(), "aa_objective: dict.rows != x.rows");
  detail::require(dict.cols() == a.rows(), "aa_objective: dict.cols != a.rows");
  detail::require(a.cols() == b.rows(), "aa_objective: a.cols != b.rows");
  detail::require(b.cols() == x.cols(), "aa_objective: b.cols != x.cols");
  if (x.cols() == 0) return 0.0;
  const DenseMatrix z = matmul(dict, a.matrix());
  double sq = 0.0;
  std::vector<double> r(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    std::copy(x.col(j).begin(), x.col(j).end(), r.begin());
    for (std::size_t l = 0; l < z.cols(); ++l) {
      const double w = b(l, j);
      if (w != 0.0) axpy(-w, z.col(l), r);
    }
    sq += dot(r, r);
  }
  return std::sqrt(sq / static_cast<double>(x.cols()));
}

}  // namespace aakit
