#pragma once

// Dense vectors/matrices over Scalar, plus exact integer linear algebra
// (Hermite normal form, integer kernels, unimodular completion) over GMP
// integers. Sizes here are tiny (d <= 6 ambient, a handful of relations), so
// everything is straightforward Gaussian/Euclidean elimination.

#include "gonlab/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

namespace gonlab {

using Vec = std::vector<Scalar>;
using IntVec = std::vector<mpz_class>;

inline Vec operator+(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw scalar_error("vector size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}
inline Vec operator-(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw scalar_error("vector size mismatch");
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
inline Vec operator*(const Scalar& c, const Vec& a) {
  Vec r(a.size());
  for (size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
  return r;
}
inline Scalar dot(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw scalar_error("vector size mismatch");
  Scalar s(0);
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

class Mat {
 public:
  Mat() : rows_(0), cols_(0) {}
  Mat(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, Scalar(0)) {}
  static Mat identity(size_t n) {
    Mat m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = Scalar(1);
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  Scalar& operator()(size_t i, size_t j) { return a_[i * cols_ + j]; }
  const Scalar& operator()(size_t i, size_t j) const { return a_[i * cols_ + j]; }

  Vec col(size_t j) const {
    Vec v(rows_);
    for (size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  Vec row(size_t i) const {
    Vec v(cols_);
    for (size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
    return v;
  }
  void set_col(size_t j, const Vec& v) {
    for (size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  Mat transpose() const {
    Mat t(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  friend Mat operator*(const Mat& x, const Mat& y) {
    if (x.cols_ != y.rows_) throw scalar_error("matrix shape mismatch");
    Mat r(x.rows_, y.cols_);
    for (size_t i = 0; i < x.rows_; ++i)
      for (size_t k = 0; k < x.cols_; ++k) {
        if (x(i, k).is_rational() && x(i, k).rat() == 0) continue;
        for (size_t j = 0; j < y.cols_; ++j) r(i, j) += x(i, k) * y(k, j);
      }
    return r;
  }
  friend Vec operator*(const Mat& x, const Vec& v) {
    if (x.cols_ != v.size()) throw scalar_error("matrix shape mismatch");
    Vec r(x.rows_, Scalar(0));
    for (size_t i = 0; i < x.rows_; ++i)
      for (size_t j = 0; j < x.cols_; ++j) r[i] += x(i, j) * v[j];
    return r;
  }
  friend bool operator==(const Mat& x, const Mat& y) {
    if (x.rows_ != y.rows_ || x.cols_ != y.cols_) return false;
    for (size_t i = 0; i < x.a_.size(); ++i)
      if (!(x.a_[i] == y.a_[i])) return false;
    return true;
  }

  // Determinant by fraction-free-ish Gaussian elimination on a working copy.
  // Exact for exact entries (division is exact in the scalar field).
  Scalar det() const {
    if (rows_ != cols_) throw scalar_error("det of non-square matrix");
    Mat w = *this;
    Scalar d(1);
    for (size_t c = 0; c < cols_; ++c) {
      size_t p = c;
      while (p < rows_ && pivot_unusable_(w(p, c))) ++p;
      if (p == rows_) return Scalar(0);
      if (p != c) {
        for (size_t j = 0; j < cols_; ++j) std::swap(w(p, j), w(c, j));
        d = -d;
      }
      d *= w(c, c);
      for (size_t r = c + 1; r < rows_; ++r) {
        if (w(r, c).is_exact() && w(r, c).sign() == 0) continue;
        Scalar f = w(r, c) / w(c, c);
        for (size_t j = c; j < cols_; ++j) w(r, j) -= f * w(c, j);
      }
    }
    return d;
  }

  Mat inverse() const {
    if (rows_ != cols_) throw scalar_error("inverse of non-square matrix");
    Mat w = *this;
    Mat inv = identity(rows_);
    for (size_t c = 0; c < cols_; ++c) {
      size_t p = c;
      while (p < rows_ && pivot_unusable_(w(p, c))) ++p;
      if (p == rows_) throw scalar_error("singular matrix");
      if (p != c)
        for (size_t j = 0; j < cols_; ++j) {
          std::swap(w(p, j), w(c, j));
          std::swap(inv(p, j), inv(c, j));
        }
      Scalar piv = w(c, c);
      for (size_t j = 0; j < cols_; ++j) {
        w(c, j) /= piv;
        inv(c, j) /= piv;
      }
      for (size_t r = 0; r < rows_; ++r) {
        if (r == c) continue;
        Scalar f = w(r, c);
        if (f.is_exact() && f.sign() == 0) continue;
        for (size_t j = 0; j < cols_; ++j) {
          w(r, j) -= f * w(c, j);
          inv(r, j) -= f * inv(c, j);
        }
      }
    }
    return inv;
  }

  // Rank; exact only for exact entries.
  size_t rank() const {
    Mat w = *this;
    size_t r = 0;
    for (size_t c = 0; c < cols_ && r < rows_; ++c) {
      size_t p = r;
      while (p < rows_ && pivot_unusable_(w(p, c))) ++p;
      if (p == rows_) continue;
      for (size_t j = 0; j < cols_; ++j) std::swap(w(p, j), w(r, j));
      for (size_t i = r + 1; i < rows_; ++i) {
        if (w(i, c).is_exact() && w(i, c).sign() == 0) continue;
        Scalar f = w(i, c) / w(r, c);
        for (size_t j = c; j < cols_; ++j) w(i, j) -= f * w(r, j);
      }
      ++r;
    }
    return r;
  }

  // Solve A x = b for square exact A.
  Vec solve(const Vec& b) const { return inverse() * b; }

 private:
  static bool pivot_unusable_(const Scalar& s) {
    if (s.is_exact()) return s.sign() == 0;
    return s.big().contains_zero();
  }

  size_t rows_, cols_;
  std::vector<Scalar> a_;
};

// ---------------------------------------------------------------------------
// Integer matrices (rows of mpz) and the lattice utilities built on them.

class IntMat {
 public:
  IntMat() : rows_(0), cols_(0) {}
  IntMat(size_t rows, size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0) {}
  static IntMat identity(size_t n) {
    IntMat m(n, n);
    for (size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }
  static IntMat from_rows(const std::vector<IntVec>& rows) {
    if (rows.empty()) return IntMat(0, 0);
    IntMat m(rows.size(), rows[0].size());
    for (size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw scalar_error("ragged rows");
      for (size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
    }
    return m;
  }

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  mpz_class& operator()(size_t i, size_t j) { return a_[i * cols_ + j]; }
  const mpz_class& operator()(size_t i, size_t j) const { return a_[i * cols_ + j]; }

  IntVec row(size_t i) const {
    IntVec v(cols_);
    for (size_t j = 0; j < cols_; ++j) v[j] = (*this)(i, j);
    return v;
  }
  IntVec col(size_t j) const {
    IntVec v(rows_);
    for (size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  friend IntMat operator*(const IntMat& x, const IntMat& y) {
    if (x.cols_ != y.rows_) throw scalar_error("matrix shape mismatch");
    IntMat r(x.rows_, y.cols_);
    for (size_t i = 0; i < x.rows_; ++i)
      for (size_t k = 0; k < x.cols_; ++k) {
        if (x(i, k) == 0) continue;
        for (size_t j = 0; j < y.cols_; ++j) r(i, j) += x(i, k) * y(k, j);
      }
    return r;
  }
  friend IntVec operator*(const IntMat& x, const IntVec& v) {
    if (x.cols_ != v.size()) throw scalar_error("matrix shape mismatch");
    IntVec r(x.rows_, 0);
    for (size_t i = 0; i < x.rows_; ++i)
      for (size_t j = 0; j < x.cols_; ++j) r[i] += x(i, j) * v[j];
    return r;
  }
  friend bool operator==(const IntMat& x, const IntMat& y) {
    return x.rows_ == y.rows_ && x.cols_ == y.cols_ && x.a_ == y.a_;
  }

  IntMat transpose() const {
    IntMat t(cols_, rows_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  mpz_class det() const {
    if (rows_ != cols_) throw scalar_error("det of non-square matrix");
    // Bareiss fraction-free elimination.
    IntMat w = *this;
    mpz_class prev = 1;
    int sign = 1;
    for (size_t k = 0; k + 1 < rows_; ++k) {
      if (w(k, k) == 0) {
        size_t p = k + 1;
        while (p < rows_ && w(p, k) == 0) ++p;
        if (p == rows_) return 0;
        for (size_t j = 0; j < cols_; ++j) std::swap(w(p, j), w(k, j));
        sign = -sign;
      }
      for (size_t i = k + 1; i < rows_; ++i)
        for (size_t j = k + 1; j < cols_; ++j) {
          w(i, j) = (w(i, j) * w(k, k) - w(i, k) * w(k, j)) / prev;
        }
      prev = w(k, k);
    }
    return sign * w(rows_ - 1, cols_ - 1);
  }

  Mat to_scalar() const {
    Mat m(rows_, cols_);
    for (size_t i = 0; i < rows_; ++i)
      for (size_t j = 0; j < cols_; ++j) m(i, j) = Scalar(mpq_class((*this)(i, j)));
    return m;
  }

  size_t rank() const {
    // integer rank = rational rank; reuse scalar elimination
    return to_scalar().rank();
  }

 private:
  size_t rows_, cols_;
  std::vector<mpz_class> a_;
};

// Column-style Hermite normal form: returns H with the same column span
// (as a lattice) as A, in column echelon form. Pivots are positive and are
// the first nonzero entry of their column; entries to the right of a pivot,
// in the pivot row, are reduced into [0, pivot). Zero columns are dropped.
// If U != nullptr it receives a unimodular matrix with A*U = [H | 0].
inline IntMat hermite_normal_form(const IntMat& A, IntMat* U = nullptr) {
  size_t m = A.rows(), n = A.cols();
  IntMat H = A;
  IntMat T = IntMat::identity(n);
  size_t pivot_col = 0;
  for (size_t r = 0; r < m && pivot_col < n; ++r) {
    // Euclidean reduction across columns pivot_col..n-1 on row r.
    while (true) {
      size_t nz = pivot_col;
      size_t count = 0, last = pivot_col;
      for (size_t c = pivot_col; c < n; ++c)
        if (H(r, c) != 0) { ++count; last = c; nz = (count == 1) ? c : nz; }
      if (count == 0) break;
      if (count == 1) {
        if (nz != pivot_col) {
          for (size_t i = 0; i < m; ++i) std::swap(H(i, nz), H(i, pivot_col));
          for (size_t i = 0; i < n; ++i) std::swap(T(i, nz), T(i, pivot_col));
        }
        break;
      }
      // find column with smallest nonzero |entry| in row r
      size_t best = last;
      for (size_t c = pivot_col; c < n; ++c) {
        if (H(r, c) == 0) continue;
        if (cmp(abs(H(r, c)), abs(H(r, best))) < 0) best = c;
      }
      if (best != pivot_col) {
        for (size_t i = 0; i < m; ++i) std::swap(H(i, best), H(i, pivot_col));
        for (size_t i = 0; i < n; ++i) std::swap(T(i, best), T(i, pivot_col));
      }
      for (size_t c = pivot_col + 1; c < n; ++c) {
        if (H(r, c) == 0) continue;
        mpz_class q = H(r, c) / H(r, pivot_col);  // truncated division is fine here
        if (q != 0) {
          for (size_t i = 0; i < m; ++i) H(i, c) -= q * H(i, pivot_col);
          for (size_t i = 0; i < n; ++i) T(i, c) -= q * T(i, pivot_col);
        }
      }
      // loop until row r has a single nonzero among the working columns
    }
    if (H(r, pivot_col) == 0) continue;  // no pivot in this row
    // normalize pivot sign
    if (H(r, pivot_col) < 0) {
      for (size_t i = 0; i < m; ++i) H(i, pivot_col) = -H(i, pivot_col);
      for (size_t i = 0; i < n; ++i) T(i, pivot_col) = -T(i, pivot_col);
    }
    // reduce earlier columns' entries in this row into [0, pivot)
    for (size_t c = 0; c < pivot_col; ++c) {
      mpz_class q;
      mpz_fdiv_q(q.get_mpz_t(), H(r, c).get_mpz_t(), H(r, pivot_col).get_mpz_t());
      if (q != 0)
        for (size_t i = 0; i < m; ++i) H(i, c) -= q * H(i, pivot_col);
      if (q != 0)
        for (size_t i = 0; i < n; ++i) T(i, c) -= q * T(i, pivot_col);
    }
    ++pivot_col;
  }
  // move pivot columns first (they already are), drop trailing zero columns
  size_t keep = pivot_col;
  IntMat out(m, keep);
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < keep; ++j) out(i, j) = H(i, j);
  if (U) *U = T;
  return out;
}

// Basis of { z : row . z = 0 for every row }, Hermite-reduced (canonical).
// An empty row list yields the identity basis of Z^width.
inline std::vector<IntVec> integer_kernel(const std::vector<IntVec>& rows, size_t width) {
  for (const auto& r : rows)
    if (r.size() != width) throw scalar_error("kernel rows must share a length");
  if (rows.empty()) {
    std::vector<IntVec> basis;
    for (size_t i = 0; i < width; ++i) {
      IntVec e(width, 0);
      e[i] = 1;
      basis.push_back(e);
    }
    return basis;
  }
  IntMat A = IntMat::from_rows(rows);
  IntMat U;
  IntMat H = hermite_normal_form(A, &U);
  size_t r = H.cols();  // number of pivot columns = rank
  // Columns of U beyond the rank map to zero columns of A*U.
  std::vector<IntVec> ker;
  for (size_t c = r; c < U.cols(); ++c) ker.push_back(U.col(c));
  if (ker.empty()) return {};
  // canonicalize: HNF of the kernel basis (as columns), returned as vectors
  IntMat K(width, ker.size());
  for (size_t j = 0; j < ker.size(); ++j)
    for (size_t i = 0; i < width; ++i) K(i, j) = ker[j][i];
  IntMat KH = hermite_normal_form(K);
  std::vector<IntVec> out;
  for (size_t j = 0; j < KH.cols(); ++j) out.push_back(KH.col(j));
  return out;
}

inline bool is_primitive(const IntVec& b) {
  mpz_class g = 0;
  for (const auto& x : b) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
  return g == 1;
}

// Unimodular gamma with last row b^T and det +1 (b primitive, length >= 2;
// for length 1 the determinant equals b itself). gamma^T e_q = b.
inline IntMat complete_primitive(const IntVec& b) {
  size_t q = b.size();
  if (q == 0) throw scalar_error("empty vector");
  if (!is_primitive(b)) throw scalar_error("vector is not primitive");
  if (q == 1) {
    IntMat g(1, 1);
    g(0, 0) = b[0];
    return g;
  }
  // Reduce b to e_q by integer row operations; accumulate them in U, so
  // U b = e_q with det U = 1, then gamma = (U^{-1})^T = adj(U)^T.
  IntMat U = IntMat::identity(q);
  IntVec w = b;
  auto shear = [&](size_t i, size_t j, const mpz_class& k) {
    // w_i -= k w_j, row_i(U) -= k row_j(U)
    w[i] -= k * w[j];
    for (size_t c = 0; c < q; ++c) U(i, c) -= k * U(j, c);
  };
  // Euclid over all coordinates against a working pivot position.
  while (true) {
    // smallest nonzero |w_i|
    size_t piv = q;
    for (size_t i = 0; i < q; ++i) {
      if (w[i] == 0) continue;
      if (piv == q || cmp(abs(w[i]), abs(w[piv])) < 0) piv = i;
    }
    bool others = false;
    for (size_t i = 0; i < q; ++i)
      if (i != piv && w[i] != 0) {
        mpz_class k;
        mpz_fdiv_q(k.get_mpz_t(), w[i].get_mpz_t(), w[piv].get_mpz_t());
        if (k != 0) shear(i, piv, k);
        if (w[i] != 0) others = true;
      }
    if (!others) {
      // w = +-e_piv; route to +e_{q-1}
      if (w[piv] < 0) {
        // negate row piv and one other row to keep det +1
        size_t other = (piv + 1) % q;
        w[piv] = -w[piv];
        for (size_t c = 0; c < q; ++c) U(piv, c) = -U(piv, c);
        for (size_t c = 0; c < q; ++c) U(other, c) = -U(other, c);
      }
      if (piv != q - 1) {
        // swap rows piv and q-1, negating one to keep det +1
        std::swap(w[piv], w[q - 1]);
        for (size_t c = 0; c < q; ++c) std::swap(U(piv, c), U(q - 1, c));
        for (size_t c = 0; c < q; ++c) U(piv, c) = -U(piv, c);
      }
      break;
    }
  }
  // gamma = (U^{-1})^T; det U = 1 so the adjugate is the inverse.
  // Compute U^{-1} by solving with Bareiss/cofactors via rational elimination.
  Mat Us = U.to_scalar();
  Mat inv = Us.inverse();
  IntMat gamma(q, q);
  for (size_t i = 0; i < q; ++i)
    for (size_t j = 0; j < q; ++j) {
      const Scalar& s = inv(j, i);  // transpose
      if (!s.is_rational() || s.rat().get_den() != 1)
        throw scalar_error("internal: non-integer inverse of unimodular matrix");
      gamma(i, j) = s.rat().get_num();
    }
  return gamma;
}

}  // namespace gonlab
