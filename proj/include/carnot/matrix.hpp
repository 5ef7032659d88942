#pragma once

// Dense matrices over an exact field (Rat or CRat) and deterministic linear
// solving: reduced row echelon form with leftmost pivots, particular
// solutions under the free-variable-zero convention, and nullspace bases.
// No magnitude pivoting anywhere -- arithmetic is exact, and determinism of
// the solver output is part of the contract.

#include "carnot/rational.hpp"

#include <initializer_list>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace carnot {

template <typename T>
class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(int rows, int cols)
      : rows_(rows), cols_(cols),
        a_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), T(0)) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("Mat: negative shape");
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Mat from_rows(std::initializer_list<std::initializer_list<T>> rows) {
    return from_rows(std::vector<std::vector<T>>(rows.begin(), rows.end()));
  }

  static Mat from_rows(const std::vector<std::vector<T>>& rows) {
    int r = static_cast<int>(rows.size());
    int c = r == 0 ? 0 : static_cast<int>(rows.front().size());
    Mat m(r, c);
    for (int i = 0; i < r; ++i) {
      if (static_cast<int>(rows[i].size()) != c)
        throw std::invalid_argument("Mat::from_rows: ragged rows");
      for (int j = 0; j < c; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  T& operator()(int i, int j) { return a_[idx(i, j)]; }
  const T& operator()(int i, int j) const { return a_[idx(i, j)]; }

  friend bool operator==(const Mat& a, const Mat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }
  friend bool operator!=(const Mat& a, const Mat& b) { return !(a == b); }

  Mat operator-() const {
    Mat r(rows_, cols_);
    for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] = -a_[i];
    return r;
  }

  friend Mat operator+(const Mat& a, const Mat& b) {
    a.check_same_shape(b);
    Mat r(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] + b.a_[i];
    return r;
  }
  friend Mat operator-(const Mat& a, const Mat& b) {
    a.check_same_shape(b);
    Mat r(a.rows_, a.cols_);
    for (std::size_t i = 0; i < a.a_.size(); ++i) r.a_[i] = a.a_[i] - b.a_[i];
    return r;
  }
  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.cols_ != b.rows_) throw std::invalid_argument("Mat: shape mismatch in product");
    Mat r(a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == T(0)) continue;
        for (int j = 0; j < b.cols_; ++j) r(i, j) += aik * b(k, j);
      }
    return r;
  }
  friend Mat operator*(const T& s, const Mat& m) {
    Mat r(m.rows_, m.cols_);
    for (std::size_t i = 0; i < m.a_.size(); ++i) r.a_[i] = s * m.a_[i];
    return r;
  }

  std::vector<T> apply(const std::vector<T>& v) const {
    if (static_cast<int>(v.size()) != cols_)
      throw std::invalid_argument("Mat::apply: size mismatch");
    std::vector<T> r(static_cast<std::size_t>(rows_), T(0));
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j)
        if (!((*this)(i, j) == T(0))) r[i] += (*this)(i, j) * v[j];
    return r;
  }

  Mat transpose() const {
    Mat r(cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) r(j, i) = (*this)(i, j);
    return r;
  }

  bool is_zero() const {
    for (const T& x : a_)
      if (!(x == T(0))) return false;
    return true;
  }

 private:
  std::size_t idx(int i, int j) const {
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
      throw std::out_of_range("Mat: index out of range");
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(j);
  }
  void check_same_shape(const Mat& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_)
      throw std::invalid_argument("Mat: shape mismatch");
  }

  int rows_;
  int cols_;
  std::vector<T> a_;
};

using RatMatrix = Mat<Rat>;
using CMatrix = Mat<CRat>;

template <typename T>
std::ostream& operator<<(std::ostream& os, const Mat<T>& m) {
  os << "[";
  for (int i = 0; i < m.rows(); ++i) {
    os << (i ? "; " : "");
    for (int j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j);
  }
  return os << "]";
}

template <typename T>
struct RrefResult {
  Mat<T> R;
  std::vector<int> pivots;  // pivot column indices, ascending
  int rank() const { return static_cast<int>(pivots.size()); }
};

// Gauss-Jordan, deterministic: scan columns left to right, take the first
// row with a nonzero entry as the pivot row, normalize to 1, clear the rest.
template <typename T>
RrefResult<T> rref(Mat<T> M) {
  std::vector<int> pivots;
  int prow = 0;
  for (int col = 0; col < M.cols() && prow < M.rows(); ++col) {
    int sel = -1;
    for (int r = prow; r < M.rows(); ++r)
      if (!(M(r, col) == T(0))) {
        sel = r;
        break;
      }
    if (sel < 0) continue;
    if (sel != prow)
      for (int j = 0; j < M.cols(); ++j) std::swap(M(sel, j), M(prow, j));
    T inv = T(1) / M(prow, col);
    for (int j = col; j < M.cols(); ++j) M(prow, j) = inv * M(prow, j);
    for (int r = 0; r < M.rows(); ++r) {
      if (r == prow || M(r, col) == T(0)) continue;
      T f = M(r, col);
      for (int j = col; j < M.cols(); ++j) M(r, j) = M(r, j) - f * M(prow, j);
    }
    pivots.push_back(col);
    ++prow;
  }
  return {std::move(M), std::move(pivots)};
}

template <typename T>
struct AffineSolution {
  std::vector<T> particular;              // free variables set to zero
  std::vector<std::vector<T>> nullbasis;  // one vector per free column, ascending
};

// Solves A x = b exactly; std::nullopt means the system is infeasible.
template <typename T>
std::optional<AffineSolution<T>> solve_affine(const Mat<T>& A, const std::vector<T>& b) {
  if (static_cast<int>(b.size()) != A.rows())
    throw std::invalid_argument("solve_affine: rhs size mismatch");
  const int n = A.cols();
  Mat<T> aug(A.rows(), n + 1);
  for (int i = 0; i < A.rows(); ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = A(i, j);
    aug(i, n) = b[i];
  }
  RrefResult<T> rr = rref(std::move(aug));
  for (int p : rr.pivots)
    if (p == n) return std::nullopt;  // pivot in the augmented column

  AffineSolution<T> sol;
  sol.particular.assign(static_cast<std::size_t>(n), T(0));
  for (std::size_t i = 0; i < rr.pivots.size(); ++i)
    sol.particular[static_cast<std::size_t>(rr.pivots[i])] = rr.R(static_cast<int>(i), n);

  std::vector<bool> is_pivot(static_cast<std::size_t>(n), false);
  for (int p : rr.pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  for (int f = 0; f < n; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    std::vector<T> v(static_cast<std::size_t>(n), T(0));
    v[static_cast<std::size_t>(f)] = T(1);
    for (std::size_t i = 0; i < rr.pivots.size(); ++i)
      v[static_cast<std::size_t>(rr.pivots[i])] = -rr.R(static_cast<int>(i), f);
    sol.nullbasis.push_back(std::move(v));
  }
  return sol;
}

template <typename T>
std::optional<Mat<T>> inverse(const Mat<T>& M) {
  if (!M.is_square()) throw std::invalid_argument("inverse: not square");
  const int n = M.rows();
  Mat<T> aug(n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) aug(i, j) = M(i, j);
    aug(i, n + i) = T(1);
  }
  RrefResult<T> rr = rref(std::move(aug));
  if (rr.rank() < n || rr.pivots.back() >= n) return std::nullopt;
  Mat<T> inv(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv(i, j) = rr.R(i, n + j);
  return inv;
}

template <typename T>
T det(Mat<T> M) {
  if (!M.is_square()) throw std::invalid_argument("det: not square");
  const int n = M.rows();
  T result(1);
  for (int col = 0; col < n; ++col) {
    int sel = -1;
    for (int r = col; r < n; ++r)
      if (!(M(r, col) == T(0))) {
        sel = r;
        break;
      }
    if (sel < 0) return T(0);
    if (sel != col) {
      for (int j = 0; j < n; ++j) std::swap(M(sel, j), M(col, j));
      result = -result;
    }
    result = result * M(col, col);
    T inv = T(1) / M(col, col);
    for (int r = col + 1; r < n; ++r) {
      if (M(r, col) == T(0)) continue;
      T f = inv * M(r, col);
      for (int j = col; j < n; ++j) M(r, j) = M(r, j) - f * M(col, j);
    }
  }
  return result;
}

template <typename T>
int rank(const Mat<T>& M) {
  return rref(M).rank();
}

template <typename T>
Mat<T> transpose(const Mat<T>& M) {
  return M.transpose();
}

}  // namespace carnot
