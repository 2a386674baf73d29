#pragma once

// Ambient space plumbing: the (m, n) block split of R^d, sup/Euclidean norms,
// the product form F(v, w) = ||v||^n ||w||^m, unimodular lattice bases, grids
// (lattice + shift), the diagonal flow h_t, and dual bases.

#include "gonlab/linalg.hpp"

#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace gonlab {

struct Dims {
  int m = 1;  // target dimension (first block)
  int n = 1;  // coefficient dimension (second block)

  Dims() = default;
  Dims(int m_, int n_) : m(m_), n(n_) {
    if (m < 1 || n < 1) throw scalar_error("dims must be positive");
  }
  int d() const { return m + n; }
};

enum class NormKind { sup, euclidean };

inline Scalar sup_norm(std::span<const Scalar> v) {
  if (v.empty()) throw scalar_error("sup_norm of empty vector");
  Scalar best = v[0].abs();
  for (size_t i = 1; i < v.size(); ++i) {
    Scalar a = v[i].abs();
    if (Scalar::compare_or_mid(a, best) > 0) best = a;
  }
  return best;
}
inline Scalar sup_norm(const Vec& v) { return sup_norm(std::span<const Scalar>(v)); }

inline Scalar euclidean_norm(std::span<const Scalar> v) {
  if (v.empty()) throw scalar_error("norm of empty vector");
  Scalar s(0);
  for (const Scalar& x : v) s += x * x;
  return s.sqrt();
}

inline Scalar sup_norm_int(const IntVec& v) {
  mpz_class best = 0;
  for (const auto& x : v) {
    mpz_class a = abs(x);
    if (a > best) best = a;
  }
  return Scalar(best);
}

// max_i dist(v_i, Z); in [0, 1/2].
inline Scalar torus_distance(std::span<const Scalar> v) {
  Scalar best(0);
  for (const Scalar& x : v) {
    Scalar d = x.dist_to_integers();
    if (Scalar::compare_or_mid(d, best) > 0) best = d;
  }
  return best;
}
inline Scalar torus_distance(const Vec& v) { return torus_distance(std::span<const Scalar>(v)); }

// F(u) = ||first m coords||^n * ||last n coords||^m.
inline Scalar f_value(const Vec& u, const Dims& dims, NormKind norm = NormKind::sup) {
  if (u.size() != static_cast<size_t>(dims.d())) throw scalar_error("f_value: wrong length");
  std::span<const Scalar> v(u.data(), dims.m), w(u.data() + dims.m, dims.n);
  Scalar nv = (norm == NormKind::sup) ? sup_norm(v) : euclidean_norm(v);
  Scalar nw = (norm == NormKind::sup) ? sup_norm(w) : euclidean_norm(w);
  return nv.pow_int(dims.n) * nw.pow_int(dims.m);
}

// ---------------------------------------------------------------------------

struct LatticeBasis {
  Dims dims;
  Mat columns;            // d x d, column vectors generate the lattice
  Scalar det;             // cached
  bool unimodular = false;

  LatticeBasis() = default;
  LatticeBasis(Dims dims_, Mat cols) : dims(dims_), columns(std::move(cols)) {
    size_t d = static_cast<size_t>(dims.d());
    if (columns.rows() != d || columns.cols() != d)
      throw scalar_error("lattice basis must be d x d");
    det = columns.det();
    if (det.is_exact() && det.sign() == 0) throw scalar_error("singular lattice basis");
    if (det.is_exact()) unimodular = (det == Scalar(1) || det == Scalar(-1));
  }
};

struct Grid {
  LatticeBasis basis;
  Vec shift;  // any representative; canonical form reduces it modulo the lattice

  Grid() = default;
  Grid(LatticeBasis b, Vec s) : basis(std::move(b)), shift(std::move(s)) {
    if (shift.size() != basis.columns.rows()) throw scalar_error("grid shift length mismatch");
  }

  // Babai-style reduction: subtract basis * round(coords), ties toward zero.
  Grid canonical() const {
    Vec coords = basis.columns.solve(shift);
    Vec reduced = shift;
    for (size_t j = 0; j < coords.size(); ++j) {
      // round to nearest, ties toward zero
      Scalar c = coords[j];
      auto k = c.round_nearest();
      mpz_class kk = k ? *k : mpz_class(0);
      if (k) {
        // tie: c - k == -1/2 means we rounded a half up; pull toward zero
        Scalar frac = c - Scalar(mpq_class(kk));
        if (frac == Scalar(mpq_class(-1, 2)) && kk > 0) kk -= 1;
      }
      if (kk != 0) {
        Vec col = basis.columns.col(j);
        for (size_t i = 0; i < reduced.size(); ++i)
          reduced[i] -= Scalar(mpq_class(kk)) * col[i];
      }
    }
    return Grid(basis, reduced);
  }

  // Grid equality modulo the lattice: shift difference has integer coords.
  bool same_grid(const Grid& other) const {
    if (!(basis.columns == other.basis.columns)) return false;
    Vec diff(shift.size());
    for (size_t i = 0; i < shift.size(); ++i) diff[i] = shift[i] - other.shift[i];
    Vec coords = basis.columns.solve(diff);
    for (const Scalar& c : coords) {
      if (!c.is_exact()) return false;
      auto f = c.floor();
      if (!f) return false;
      if (!(c == Scalar(mpq_class(*f)))) return false;
    }
    return true;
  }
};

// The lattice [[I_m, A], [0, I_n]] Z^d attached to an m x n matrix A.
inline LatticeBasis lattice_from_matrix(const Mat& A, const Dims& dims) {
  if (A.rows() != static_cast<size_t>(dims.m) || A.cols() != static_cast<size_t>(dims.n))
    throw scalar_error("matrix shape does not match dims");
  size_t d = static_cast<size_t>(dims.d());
  Mat b = Mat::identity(d);
  for (size_t i = 0; i < A.rows(); ++i)
    for (size_t j = 0; j < A.cols(); ++j) b(i, dims.m + j) = A(i, j);
  LatticeBasis lb(dims, std::move(b));
  lb.unimodular = true;  // upper triangular, unit diagonal
  return lb;
}

// Inverse transpose; the dual of the dual is the original.
inline LatticeBasis dual_basis(const LatticeBasis& b) {
  LatticeBasis out(b.dims, b.columns.inverse().transpose());
  return out;
}

// Diagonal flow: multiplies the first m coordinates by lambda^n and the last
// n by lambda^{-m}. For h_t take lambda = e^t; passing lambda directly keeps
// exact inputs exact (e.g. lambda = 2 plays the role of t = ln 2).
inline Vec apply_flow_scale(const Scalar& lambda, const Vec& u, const Dims& dims) {
  if (u.size() != static_cast<size_t>(dims.d())) throw scalar_error("apply_flow: wrong length");
  Scalar up = lambda.pow_int(dims.n), down = lambda.pow_int(-static_cast<long>(dims.m));
  Vec r(u.size());
  for (int i = 0; i < dims.m; ++i) r[i] = up * u[i];
  for (int i = dims.m; i < dims.d(); ++i) r[i] = down * u[i];
  return r;
}
inline Vec apply_flow(const Scalar& t, const Vec& u, const Dims& dims) {
  return apply_flow_scale(t.exp(), u, dims);
}
inline Mat apply_flow_scale(const Scalar& lambda, const Mat& m, const Dims& dims) {
  Mat r = m;
  Scalar up = lambda.pow_int(dims.n), down = lambda.pow_int(-static_cast<long>(dims.m));
  for (size_t j = 0; j < m.cols(); ++j) {
    for (int i = 0; i < dims.m; ++i) r(i, j) = up * m(i, j);
    for (int i = dims.m; i < dims.d(); ++i) r(i, j) = down * m(i, j);
  }
  return r;
}
inline LatticeBasis apply_flow_scale(const Scalar& lambda, const LatticeBasis& b) {
  LatticeBasis out(b.dims, apply_flow_scale(lambda, b.columns, b.dims));
  out.unimodular = b.unimodular;  // det(h_t) = 1
  return out;
}
inline LatticeBasis apply_flow(const Scalar& t, const LatticeBasis& b) {
  return apply_flow_scale(t.exp(), b);
}
inline Grid apply_flow_scale(const Scalar& lambda, const Grid& y) {
  return Grid(apply_flow_scale(lambda, y.basis),
              apply_flow_scale(lambda, y.shift, y.basis.dims));
}
inline Grid apply_flow(const Scalar& t, const Grid& y) { return apply_flow_scale(t.exp(), y); }

// ---------------------------------------------------------------------------

struct MultiIndex {
  std::vector<int> indices;  // strictly increasing, values in [1, d]

  MultiIndex() = default;
  MultiIndex(std::vector<int> idx, int d) : indices(std::move(idx)) {
    if (indices.empty() || indices.size() > static_cast<size_t>(d))
      throw scalar_error("multi-index length out of range");
    for (size_t i = 0; i < indices.size(); ++i) {
      if (indices[i] < 1 || indices[i] > d) throw scalar_error("multi-index entry out of range");
      if (i > 0 && indices[i] <= indices[i - 1])
        throw scalar_error("multi-index must be strictly increasing");
    }
  }
  size_t k() const { return indices.size(); }
  std::string to_string() const {
    std::string s = "{";
    for (size_t i = 0; i < indices.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(indices[i]);
    }
    return s + "}";
  }
};

inline std::vector<MultiIndex> all_multi_indices(int d, int k) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(k);
  // standard combinations enumeration in lexicographic order
  for (int i = 0; i < k; ++i) cur[i] = i + 1;
  while (true) {
    out.emplace_back(cur, d);
    int i = k - 1;
    while (i >= 0 && cur[i] == d - (k - 1 - i)) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

}  // namespace gonlab
