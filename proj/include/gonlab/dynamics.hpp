#pragma once

// Orbit and character diagnostics for the diagonal flow: systole curves,
// wedge weights and subspace flow norms, value sets of grids with coverage
// reports, Fourier coefficients of pushforward measures, character survival,
// the coset extraction (integer relation harvest + unimodular change of
// basis), and tail-span limits of subspace sequences.

#include "gonlab/core.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace gonlab {

// ---------------------------------------------------------------------------
// Rational subspaces with a canonical primitive-integer RREF basis.

struct RationalSubspace {
  size_t ambient = 0;
  std::vector<IntVec> basis;  // canonical rows; empty = zero subspace

  size_t dim() const { return basis.size(); }

  static RationalSubspace zero(size_t ambient) { return {ambient, {}}; }

  static RationalSubspace span_of(const std::vector<IntVec>& vectors, size_t ambient) {
    for (const auto& v : vectors)
      if (v.size() != ambient) throw scalar_error("subspace vector length mismatch");
    RationalSubspace s;
    s.ambient = ambient;
    if (vectors.empty()) return s;
    // RREF over Q, then scale each row to a primitive integer vector.
    size_t R = vectors.size();
    std::vector<std::vector<mpq_class>> w(R, std::vector<mpq_class>(ambient));
    for (size_t i = 0; i < R; ++i)
      for (size_t j = 0; j < ambient; ++j) w[i][j] = mpq_class(vectors[i][j]);
    size_t row = 0;
    for (size_t col = 0; col < ambient && row < R; ++col) {
      size_t p = row;
      while (p < R && w[p][col] == 0) ++p;
      if (p == R) continue;
      std::swap(w[p], w[row]);
      mpq_class piv = w[row][col];
      for (size_t j = 0; j < ambient; ++j) w[row][j] /= piv;
      for (size_t i = 0; i < R; ++i) {
        if (i == row || w[i][col] == 0) continue;
        mpq_class f = w[i][col];
        for (size_t j = 0; j < ambient; ++j) w[i][j] -= f * w[row][j];
      }
      ++row;
    }
    for (size_t i = 0; i < row; ++i) {
      mpz_class den = 1;
      for (size_t j = 0; j < ambient; ++j)
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), w[i][j].get_den().get_mpz_t());
      IntVec v(ambient);
      mpz_class g = 0;
      for (size_t j = 0; j < ambient; ++j) {
        mpq_class scaled = w[i][j] * den;
        v[j] = scaled.get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v[j].get_mpz_t());
      }
      if (g > 1)
        for (auto& x : v) x /= g;
      s.basis.push_back(std::move(v));
    }
    return s;
  }

  bool contains(const IntVec& v) const {
    std::vector<IntVec> all = basis;
    all.push_back(v);
    return span_of(all, ambient).dim() == dim();
  }

  friend bool operator==(const RationalSubspace& a, const RationalSubspace& b) {
    return a.ambient == b.ambient && a.basis == b.basis;
  }
};

// ---------------------------------------------------------------------------
// Systole curve.

enum class OrbitTrend { diverging, recurrent, inconclusive };

struct SystolePoint {
  Scalar t;
  Scalar systole;   // shortest sup-norm of a nonzero lattice vector
  IntVec witness;   // coefficients w.r.t. the input basis columns
};

struct SystoleCurve {
  std::vector<SystolePoint> points;
  OrbitTrend trend = OrbitTrend::inconclusive;
};

namespace detail {

// Shortest nonzero sup-norm vector of the lattice spanned by the columns of
// B: greedy pairwise size reduction followed by exhaustive enumeration in
// the coefficient box certified by the reduced basis.
inline std::pair<Scalar, IntVec> shortest_vector(const Mat& B, const mpz_class& cap) {
  size_t d = B.cols();
  Mat R = B;                       // reduced columns
  IntMat C = IntMat::identity(d);  // R = B * C
  // greedy Lagrange-style reduction on Euclidean norms
  for (int round = 0; round < 64; ++round) {
    bool changed = false;
    for (size_t i = 0; i < d; ++i)
      for (size_t j = 0; j < d; ++j) {
        if (i == j) continue;
        Scalar num = dot(R.col(i), R.col(j));
        Scalar den = dot(R.col(j), R.col(j));
        Scalar mu = num / den;
        auto k = mu.round_nearest();
        if (!k || *k == 0) continue;
        Vec ci = R.col(i), cj = R.col(j);
        Vec cand(d);
        for (size_t r = 0; r < d; ++r) cand[r] = ci[r] - Scalar(mpq_class(*k)) * cj[r];
        if (Scalar::compare_or_mid(dot(cand, cand), dot(ci, ci)) < 0) {
          R.set_col(i, cand);
          for (size_t r = 0; r < d; ++r) C(r, i) -= *k * C(r, j);
          changed = true;
        }
      }
    if (!changed) break;
  }
  // initial bound: the shortest reduced column
  Scalar best = sup_norm(R.col(0));
  size_t best_col = 0;
  for (size_t j = 1; j < d; ++j) {
    Scalar nj = sup_norm(R.col(j));
    if (Scalar::compare_or_mid(nj, best) < 0) { best = nj; best_col = j; }
  }
  IntVec best_coeff = C.col(best_col);
  // coefficient box: |c_i| <= best * l1 norm of row i of R^{-1}
  Mat Rinv = R.inverse();
  std::vector<long> bound(d);
  mpz_class box = 1;
  for (size_t i = 0; i < d; ++i) {
    Scalar s(0);
    for (size_t j = 0; j < d; ++j) s += Rinv(i, j).abs();
    Scalar b = best * s;
    auto f = b.floor();
    bound[i] = f ? f->get_si() : 0;
    box *= 2 * bound[i] + 1;
  }
  if (box > cap) throw scalar_error("shortest_vector: enumeration cap exceeded");
  std::vector<long> v(d);
  for (size_t i = 0; i < d; ++i) v[i] = -bound[i];
  while (true) {
    bool nonzero = false;
    for (long x : v) nonzero = nonzero || x != 0;
    if (nonzero) {
      Vec u(d, Scalar(0));
      for (size_t j = 0; j < d; ++j)
        if (v[j] != 0)
          for (size_t r = 0; r < d; ++r) u[r] += R(r, j) * Scalar(mpq_class(v[j]));
      Scalar nu = sup_norm(u);
      if (Scalar::compare_or_mid(nu, best) < 0) {
        best = nu;
        IntVec coeff(d, 0);
        for (size_t j = 0; j < d; ++j)
          for (size_t r = 0; r < d; ++r) coeff[r] += C(r, j) * v[j];
        best_coeff = coeff;
      }
    }
    size_t i = d;
    bool done = true;
    while (i-- > 0) {
      if (v[i] < bound[i]) { ++v[i]; done = false; break; }
      v[i] = -bound[i];
    }
    if (done) break;
  }
  return {best, best_coeff};
}

}  // namespace detail

inline SystoleCurve systole_curve(const LatticeBasis& x, const std::vector<Scalar>& t_grid,
                                  const mpz_class& cap = mpz_class(4000000)) {
  SystoleCurve out;
  for (const Scalar& t : t_grid) {
    LatticeBasis flowed = apply_flow(t, x);
    auto [norm, coeff] = detail::shortest_vector(flowed.columns, cap);
    out.points.push_back({t, norm, coeff});
  }
  // windowed trend: compare min systole over the last 20% against the first
  // 20%; a factor-4 drop reads as diverging, staying within a factor 2 as
  // recurrent, anything else inconclusive.
  size_t n = out.points.size();
  if (n >= 5) {
    size_t w = std::max<size_t>(1, n / 5);
    auto window_min = [&](size_t from, size_t to) {
      Scalar m = out.points[from].systole;
      for (size_t i = from + 1; i < to; ++i)
        if (Scalar::compare_or_mid(out.points[i].systole, m) < 0) m = out.points[i].systole;
      return m;
    };
    Scalar first = window_min(0, w), last = window_min(n - w, n);
    Scalar ratio = last / first;
    if (Scalar::compare_or_mid(ratio, Scalar(mpq_class(1, 4))) <= 0)
      out.trend = OrbitTrend::diverging;
    else if (Scalar::compare_or_mid(ratio, Scalar(mpq_class(1, 2))) >= 0)
      out.trend = OrbitTrend::recurrent;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Wedge weights.

struct WedgeWeightTable {
  Dims dims;
  int k = 1;
  struct Row {
    MultiIndex I;
    long exponent;  // |I cap J+| n - |I cap J-| m
  };
  std::vector<Row> rows;
  std::vector<size_t> zero_rows;
};

inline WedgeWeightTable wedge_weights(const Dims& dims, int k) {
  if (k < 1 || k > dims.d()) throw scalar_error("wedge order out of range");
  WedgeWeightTable t;
  t.dims = dims;
  t.k = k;
  for (MultiIndex& I : all_multi_indices(dims.d(), k)) {
    long plus = 0, minus = 0;
    for (int i : I.indices) (i <= dims.m ? plus : minus) += 1;
    long e = plus * dims.n - minus * dims.m;
    if (e == 0) t.zero_rows.push_back(t.rows.size());
    t.rows.push_back({std::move(I), e});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Flow norms of rational subspaces via Pluecker coordinates.

enum class FlowNormClass { to_infinity, to_zero, mixed_or_constant };

struct SubspaceFlowReport {
  std::vector<std::pair<Scalar, Scalar>> norms;  // (t, ||wedge h_t u||_2)
  FlowNormClass classification;
  bool gcd_bug_flag = false;  // impossible outcome when gcd(m, n) = 1
  long max_weight = 0, min_weight = 0;
};

namespace detail {

inline mpz_class int_minor(const std::vector<IntVec>& rows, const std::vector<int>& cols) {
  size_t k = rows.size();
  IntMat m(k, k);
  for (size_t i = 0; i < k; ++i)
    for (size_t j = 0; j < k; ++j) m(i, j) = rows[i][cols[j] - 1];
  return m.det();
}

}  // namespace detail

inline SubspaceFlowReport subspace_flow_norm(const RationalSubspace& U,
                                             const std::vector<Scalar>& t_grid,
                                             const Dims& dims) {
  if (U.dim() == 0 || U.dim() >= U.ambient)
    throw scalar_error("subspace must be nontrivial and proper");
  if (U.ambient != static_cast<size_t>(dims.d())) throw scalar_error("ambient mismatch");
  int k = static_cast<int>(U.dim());
  WedgeWeightTable wt = wedge_weights(dims, k);
  std::vector<mpz_class> coords;
  long maxw = 0, minw = 0;
  bool first = true;
  for (const auto& row : wt.rows) {
    mpz_class g = detail::int_minor(U.basis, row.I.indices);
    coords.push_back(g);
    if (g != 0) {
      if (first || row.exponent > maxw) maxw = row.exponent;
      if (first || row.exponent < minw) minw = row.exponent;
      first = false;
    }
  }
  SubspaceFlowReport rep;
  rep.max_weight = maxw;
  rep.min_weight = minw;
  for (const Scalar& t : t_grid) {
    Scalar sum(0);
    for (size_t i = 0; i < coords.size(); ++i) {
      if (coords[i] == 0) continue;
      Scalar alpha = (t * Scalar(wt.rows[i].exponent)).exp();
      Scalar term = alpha * Scalar(mpq_class(coords[i]));
      sum += term * term;
    }
    rep.norms.push_back({t, sum.sqrt()});
  }
  if (maxw > 0)
    rep.classification = FlowNormClass::to_infinity;
  else if (maxw < 0)
    rep.classification = FlowNormClass::to_zero;
  else
    rep.classification = FlowNormClass::mixed_or_constant;
  rep.gcd_bug_flag = rep.classification == FlowNormClass::mixed_or_constant &&
                     std::gcd(dims.m, dims.n) == 1;
  return rep;
}

// ---------------------------------------------------------------------------
// Value sets.

struct DVReport {
  Scalar inf_value;
  IntVec inf_witness;                 // coefficient vector attaining the inf
  std::vector<Scalar> values;         // sorted, deduplicated
  Scalar window;                      // coverage window [0, s]
  size_t bins = 0;
  size_t bins_hit = 0;
  Scalar max_gap;                     // largest gap between consecutive values in [0, s]
};

inline DVReport value_set_sample(const Grid& y, long Q, const Dims& dims,
                                 const Scalar& window = Scalar(1), size_t bins = 32) {
  if (Q < 1) throw scalar_error("Q must be >= 1");
  size_t d = static_cast<size_t>(dims.d());
  if (y.basis.columns.rows() != d) throw scalar_error("grid dimension mismatch");
  DVReport rep;
  rep.window = window;
  rep.bins = bins;
  std::vector<std::pair<Scalar, IntVec>> vals;
  std::vector<long> v(d, -Q);
  while (true) {
    Vec pt = y.shift;
    for (size_t j = 0; j < d; ++j)
      if (v[j] != 0) {
        Vec col = y.basis.columns.col(j);
        for (size_t r = 0; r < d; ++r) pt[r] += Scalar(mpq_class(v[j])) * col[r];
      }
    IntVec coeff(d);
    for (size_t j = 0; j < d; ++j) coeff[j] = v[j];
    vals.push_back({f_value(pt, dims), coeff});
    size_t i = d;
    bool done = true;
    while (i-- > 0) {
      if (v[i] < Q) { ++v[i]; done = false; break; }
      v[i] = -Q;
    }
    if (done) break;
  }
  std::stable_sort(vals.begin(), vals.end(), [](const auto& a, const auto& b) {
    int c = Scalar::compare_or_mid(a.first, b.first);
    if (c != 0) return c < 0;
    return a.second < b.second;
  });
  rep.inf_value = vals.front().first;
  rep.inf_witness = vals.front().second;
  for (const auto& [val, wit] : vals) {
    if (rep.values.empty() || Scalar::compare_or_mid(rep.values.back(), val) != 0)
      rep.values.push_back(val);
  }
  // coverage histogram and max gap within [0, window]
  std::vector<bool> hit(bins, false);
  Scalar prev(0);
  Scalar gap(0);
  for (const Scalar& val : rep.values) {
    if (Scalar::compare_or_mid(val, window) > 0) break;
    Scalar g = val - prev;
    if (Scalar::compare_or_mid(g, gap) > 0) gap = g;
    prev = val;
    // bin index = floor(val * bins / window), clamped
    Scalar idx = val * Scalar(static_cast<long>(bins)) / window;
    auto f = idx.floor();
    long bi = f ? f->get_si() : 0;
    if (bi >= 0 && bi < static_cast<long>(bins)) hit[bi] = true;
    if (bi == static_cast<long>(bins)) hit[bins - 1] = true;
  }
  Scalar tailgap = window - prev;
  if (Scalar::compare_or_mid(tailgap, gap) > 0) gap = tailgap;
  rep.max_gap = gap;
  for (bool h : hit) rep.bins_hit += h ? 1 : 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Fourier coefficients of pushforwards.

struct ComplexScalar {
  Scalar re, im;
  Scalar abs() const { return (re * re + im * im).sqrt(); }
};

struct LineMeasure {
  Vec base;       // w
  Vec direction;  // u != 0; parameter range [0, 1]

  LineMeasure(Vec w, Vec u) : base(std::move(w)), direction(std::move(u)) {
    bool nz = false;
    for (const Scalar& s : direction) nz = nz || !(s.is_exact() && s.sign() == 0);
    if (!nz) throw scalar_error("line measure needs a nonzero direction");
  }
};

inline Mat flow_matrix(const Scalar& t, const Dims& dims) {
  Mat h = Mat::identity(dims.d());
  Scalar up = (t * Scalar(dims.n)).exp(), down = (t * Scalar(-dims.m)).exp();
  for (int i = 0; i < dims.m; ++i) h(i, i) = up;
  for (int i = dims.m; i < dims.d(); ++i) h(i, i) = down;
  return h;
}

namespace detail {

// phi(c) = integral_0^1 e^{2 pi i c s} ds = (e^{2 pi i c} - 1) / (2 pi i c),
// phi(0) = 1. Exactly zero at nonzero integers.
inline ComplexScalar phi_factor(const Scalar& c) {
  if (c.is_exact()) {
    if (c.sign() == 0) return {Scalar(1), Scalar(0)};
    auto f = c.floor();
    if (f && c == Scalar(mpq_class(*f))) return {Scalar(0), Scalar(0)};
  }
  Scalar twopi = Scalar(Interval::pi() + Interval::pi());
  Scalar arg = twopi * c;
  Scalar s = Scalar(arg.to_interval().sin()), k = Scalar(arg.to_interval().cos());
  // (e^{i a} - 1)/(i a) = sin(a)/a + i (1 - cos(a))/a with a = 2 pi c
  return {s / arg, (Scalar(1) - k) / arg};
}

}  // namespace detail

// Coefficient of the pushed-forward line measure at character b:
//   e^{2 pi i (b|Mw)} * phi((b|Mu)).
inline ComplexScalar pushforward_fourier_line(const LineMeasure& mu, const Mat& map,
                                              const Vec& b) {
  Vec Mw = map * mu.base, Mu = map * mu.direction;
  Scalar alpha = dot(b, Mw), beta = dot(b, Mu);
  ComplexScalar head{Scalar(1), Scalar(0)};
  if (!(alpha.is_exact() && alpha.sign() == 0)) {
    Scalar arg = Scalar(Interval::pi() + Interval::pi()) * alpha;
    head = {Scalar(arg.to_interval().cos()), Scalar(arg.to_interval().sin())};
  }
  ComplexScalar tail = detail::phi_factor(beta);
  return {head.re * tail.re - head.im * tail.im, head.re * tail.im + head.im * tail.re};
}

struct HaarCoefficient {
  ComplexScalar value;
  bool exact_decision = false;  // true when decided to be exactly 0 or 1
};

// Coefficient of the pushed-forward Haar measure (fundamental domain of x0)
// at character b of the target torus: the product of phi((M^T b | column_j)).
// For b in the dual of the image lattice every pairing is an integer, so the
// product is 1 exactly when M^T b = 0 and 0 otherwise.
inline HaarCoefficient pushforward_fourier_haar(const LatticeBasis& x0, const Mat& map,
                                                const Vec& b, const LatticeBasis& x1) {
  // precondition: b lies in the dual lattice of x1
  Vec test = x1.columns.transpose() * b;
  for (const Scalar& c : test) {
    if (!c.is_exact()) continue;  // interval pairings are handled below
    auto f = c.floor();
    if (!f || !(c == Scalar(mpq_class(*f))))
      throw scalar_error("character is not in the dual lattice of the target");
  }
  HaarCoefficient out;
  Vec mtb = map.transpose() * b;
  ComplexScalar acc{Scalar(1), Scalar(0)};
  bool all_exact = true;
  for (size_t j = 0; j < x0.columns.cols(); ++j) {
    Scalar pairing = dot(mtb, x0.columns.col(j));
    ComplexScalar f = detail::phi_factor(pairing);
    all_exact = all_exact && pairing.is_exact();
    ComplexScalar next{acc.re * f.re - acc.im * f.im, acc.re * f.im + acc.im * f.re};
    acc = next;
  }
  out.value = acc;
  out.exact_decision = all_exact;
  return out;
}

// ---------------------------------------------------------------------------
// Character survival under the transposed flow.

struct CharacterSurvival {
  Vec vector;     // h_t^T b + a
  bool is_zero;   // exactly zero (provably)
};

inline CharacterSurvival character_survival(const Scalar& t, const Vec& a, const Vec& b,
                                            const Dims& dims) {
  if (a.size() != static_cast<size_t>(dims.d()) || b.size() != a.size())
    throw scalar_error("character vectors must have length d");
  // h_t is diagonal, so h_t^T = h_t
  Vec hb = apply_flow(t, b, dims);
  Vec out(a.size());
  bool zero = true;
  for (size_t i = 0; i < a.size(); ++i) {
    out[i] = hb[i] + a[i];
    zero = zero && out[i].is_exact() && out[i].sign() == 0;
  }
  // when b is exactly zero the flow image is exact regardless of t
  return {out, zero};
}

struct SurvivalTrend {
  std::vector<std::pair<Scalar, Scalar>> norms;  // (t, ||h_t^T b + a||)
  bool grows = false;                            // first block of b nonzero
};

inline SurvivalTrend survival_trend(const std::vector<Scalar>& t_grid, const Vec& a,
                                    const Vec& b, const Dims& dims) {
  SurvivalTrend st;
  for (int i = 0; i < dims.m; ++i)
    if (!(b[i].is_exact() && b[i].sign() == 0)) st.grows = true;
  for (const Scalar& t : t_grid) {
    auto cs = character_survival(t, a, b, dims);
    st.norms.push_back({t, sup_norm(cs.vector)});
  }
  return st;
}

// ---------------------------------------------------------------------------
// Coset extraction.

struct CosetExtraction {
  std::vector<IntVec> relation_basis;  // (b, a) in Z^{q+1}, canonical
  size_t rank = 0;
  IntMat gamma;                        // in SL_q(Z)
  IntVec residual_constants;           // constants filling the last `rank` coords
  RationalSubspace S;                  // codimension-`rank` subtorus direction
  bool degenerate = false;             // rank == q
};

inline CosetExtraction coset_extract(const std::vector<IntVec>& gammas, size_t tail_start = 0) {
  if (gammas.size() < 2) throw scalar_error("need at least two vectors");
  if (tail_start >= gammas.size()) throw scalar_error("tail start beyond the list");
  size_t q = gammas[0].size();
  if (q < 1) throw scalar_error("vectors must be nonempty");
  for (const auto& g : gammas)
    if (g.size() != q) throw scalar_error("vectors must share a length");

  std::vector<IntVec> tail(gammas.begin() + tail_start, gammas.end());

  // relation lattice {(b, a) : gamma_l . b + a = 0 for all tail l}
  std::vector<IntVec> rows;
  for (const auto& g : tail) {
    IntVec r = g;
    r.push_back(1);
    rows.push_back(r);
  }
  CosetExtraction out;
  out.relation_basis = integer_kernel(rows, q + 1);
  out.rank = out.relation_basis.size();

  // Peel one relation at a time: complete the primitive b-part to a
  // unimodular matrix whose last row is b^T, so the last working coordinate
  // becomes the constant -a; then recurse on the remaining coordinates.
  IntMat total = IntMat::identity(q);
  std::vector<IntVec> work = tail;
  size_t qcur = q;
  std::vector<mpz_class> constants;
  for (size_t step = 0; step < out.rank; ++step) {
    if (qcur == 0) break;
    std::vector<IntVec> wrows;
    for (const auto& g : work) {
      IntVec r = g;
      r.push_back(1);
      wrows.push_back(r);
    }
    auto rel = integer_kernel(wrows, qcur + 1);
    if (rel.empty()) throw scalar_error("internal: relation rank mismatch");
    IntVec bv(rel[0].begin(), rel[0].end() - 1);
    mpz_class av = rel[0].back();
    mpz_class g = 0;
    for (const auto& x : bv) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g > 1) {
      for (auto& x : bv) x /= g;
      if (av % g != 0) throw scalar_error("internal: relation not scalable");
      av /= g;
    }
    IntMat gs = complete_primitive(bv);
    // apply to working vectors, drop the now-constant last coordinate
    std::vector<IntVec> next;
    for (auto& w : work) {
      IntVec img = gs * w;
      if (img.back() != -av) throw scalar_error("internal: relation does not hold on tail");
      img.pop_back();
      next.push_back(img);
    }
    work = std::move(next);
    constants.insert(constants.begin(), -av);  // coordinate qcur lands above later ones
    // embed gs into the top-left qcur block of the accumulated change of basis
    IntMat emb = IntMat::identity(q);
    for (size_t i = 0; i < qcur; ++i)
      for (size_t j = 0; j < qcur; ++j) emb(i, j) = gs(i, j);
    total = emb * total;
    --qcur;
  }
  out.gamma = total;
  out.residual_constants = IntVec(constants.begin(), constants.end());
  out.degenerate = out.rank == q;

  // S = preimage of the coordinate subtorus killing the last `rank`
  // coordinates = span of the first q - rank columns of gamma^{-1}.
  Mat ginv = total.to_scalar().inverse();
  std::vector<IntVec> sbasis;
  for (size_t c = 0; c + out.rank < q; ++c) {
    IntVec col(q);
    for (size_t r = 0; r < q; ++r) {
      const Scalar& s = ginv(r, c);
      if (!s.is_rational() || s.rat().get_den() != 1)
        throw scalar_error("internal: unimodular inverse is not integral");
      col[r] = s.rat().get_num();
    }
    sbasis.push_back(col);
  }
  out.S = RationalSubspace::span_of(sbasis, q);
  return out;
}

// ---------------------------------------------------------------------------
// Tail-span limits.

struct TailSpanResult {
  RationalSubspace v_infinity;
  size_t stabilization_index = 0;       // first j with U_j = U_{j+1}
  std::vector<size_t> span_dims;        // dims of the descending spans U_j
  size_t limsup_dim = 0;
  bool dim_jump = false;                // dim V_inf > limsup dim V_l
};

inline TailSpanResult tail_span_limit(const std::vector<RationalSubspace>& V_list) {
  if (V_list.empty()) throw scalar_error("empty subspace list");
  size_t ambient = V_list[0].ambient;
  for (const auto& V : V_list)
    if (V.ambient != ambient) throw scalar_error("ambient dimension mismatch");
  size_t L = V_list.size();
  // U_j = span(V_{j+1} ... V_L), 1-based; computed from the back
  std::vector<RationalSubspace> U(L);
  std::vector<IntVec> pool;
  for (size_t j = L; j-- > 0;) {
    for (const auto& v : V_list[j].basis) pool.push_back(v);
    U[j] = RationalSubspace::span_of(pool, ambient);
  }
  TailSpanResult res;
  size_t j0 = 0;
  while (j0 + 1 < L && !(U[j0] == U[j0 + 1])) ++j0;
  res.stabilization_index = j0;
  res.v_infinity = U[j0];
  for (const auto& u : U) res.span_dims.push_back(u.dim());
  for (const auto& V : V_list) res.limsup_dim = std::max(res.limsup_dim, V.dim());
  res.dim_jump = res.v_infinity.dim() > res.limsup_dim;
  return res;
}

}  // namespace gonlab
