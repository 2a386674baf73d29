#pragma once

// Successive minima of parametric parallelepipeds { v : |f_i . v| <= c_i }
// with respect to Z^d, realized by exhaustive integer enumeration inside the
// scaled body, plus the log-minima profiles L_j(q) = log lambda_j(e^q) and a
// Minkowski second-theorem audit.

#include "gonlab/core.hpp"

#include <algorithm>

namespace gonlab {

struct Parallelepiped {
  // exactly d independent forms; body = { v : |forms[i].first . v| <= forms[i].second }
  std::vector<std::pair<Vec, Scalar>> forms;

  Parallelepiped() = default;
  explicit Parallelepiped(std::vector<std::pair<Vec, Scalar>> f) : forms(std::move(f)) {
    size_t d = dim();
    for (auto& [form, bound] : forms) {
      if (form.size() != d) throw scalar_error("form length mismatch");
      if (!(bound.sign() > 0) && !(bound.is_bigreal() && bound.big().sign_class() > 0))
        throw scalar_error("form bound must be positive");
    }
    if (form_matrix().rank() != d) throw scalar_error("forms must span the space");
  }

  size_t dim() const { return forms.empty() ? 0 : forms[0].first.size(); }

  Mat form_matrix() const {
    Mat F(forms.size(), dim());
    for (size_t i = 0; i < forms.size(); ++i)
      for (size_t j = 0; j < dim(); ++j) F(i, j) = forms[i].first[j];
    return F;
  }

  // 2^d * prod(bounds) / |det F|
  Scalar volume() const {
    Scalar v = Scalar(2).pow_int(static_cast<long>(dim()));
    for (const auto& [form, bound] : forms) v *= bound;
    return v / form_matrix().det().abs();
  }

  // Entry radius of an integer point: max_i |f_i . v| / c_i. The point lies
  // in r * body exactly when its entry radius is <= r.
  Scalar entry_radius(const IntVec& v) const {
    Scalar worst(0);
    for (const auto& [form, bound] : forms) {
      Scalar s(0);
      for (size_t j = 0; j < form.size(); ++j)
        if (v[j] != 0) s += form[j] * Scalar(mpq_class(v[j]));
      Scalar r = s.abs() / bound;
      if (Scalar::compare_or_mid(r, worst) > 0) worst = r;
    }
    return worst;
  }

  // The unit cube with a final form row (theta_1, ..., theta_k, 1) bounded by
  // 1/Q: the parametric body attached to a target vector.
  static Parallelepiped target_body(const Vec& theta, const Scalar& Q) {
    size_t d = theta.size() + 1;
    std::vector<std::pair<Vec, Scalar>> f;
    for (size_t i = 0; i + 1 < d; ++i) {
      Vec e(d, Scalar(0));
      e[i] = Scalar(1);
      f.push_back({e, Scalar(1)});
    }
    Vec last(d, Scalar(0));
    for (size_t i = 0; i + 1 < d; ++i) last[i] = theta[i];
    last[d - 1] = Scalar(1);
    f.push_back({last, Scalar(1) / Q});
    return Parallelepiped(std::move(f));
  }

  // Pi_l in coordinates (q, p): ||q|| < M_{l+1} (n rows), ||Aq - p|| < zeta_l
  // (m rows). Closed-body minima; the open body carries no nonzero integer
  // point, hence lambda_1 >= 1.
  static Parallelepiped approximation_body(const Mat& A, const Dims& dims,
                                           const Scalar& M_next, const Scalar& zeta) {
    size_t d = static_cast<size_t>(dims.d());
    std::vector<std::pair<Vec, Scalar>> f;
    for (int j = 0; j < dims.n; ++j) {
      Vec e(d, Scalar(0));
      e[j] = Scalar(1);
      f.push_back({e, M_next});
    }
    for (int i = 0; i < dims.m; ++i) {
      Vec r(d, Scalar(0));
      for (int j = 0; j < dims.n; ++j) r[j] = A(i, j);
      r[dims.n + i] = Scalar(-1);
      f.push_back({r, zeta});
    }
    return Parallelepiped(std::move(f));
  }
};

struct MinimaResult {
  std::vector<Scalar> lambda;        // lambda_1 <= ... <= lambda_d
  std::vector<IntVec> witnesses;     // independent integer vectors realizing them
  bool capped = false;               // enumeration cap was hit before d minima
  mpz_class cap_used = 0;
};

namespace detail {

inline size_t int_rank(const std::vector<IntVec>& vs) {
  if (vs.empty()) return 0;
  IntMat m(vs.size(), vs[0].size());
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = 0; j < vs[0].size(); ++j) m(i, j) = vs[i][j];
  return m.rank();
}

}  // namespace detail

// Successive minima with witnesses. radius_hint seeds the enumeration radius
// (in entry-radius units) and grows until d independent points are found or
// the enumeration cap (number of visited points) is exceeded.
inline MinimaResult body_minima(const Parallelepiped& body, Scalar radius_hint = Scalar(2),
                                const mpz_class& cap = mpz_class(200000000), int max_growth = 12) {
  size_t d = body.dim();
  Mat Finv = body.form_matrix().inverse();
  // coordinate box of the unit body: |v_j| <= sum_i |Finv(j, i)| * c_i
  std::vector<Scalar> unit_box(d, Scalar(0));
  for (size_t j = 0; j < d; ++j)
    for (size_t i = 0; i < d; ++i)
      unit_box[j] += Finv(j, i).abs() * body.forms[i].second;

  MinimaResult res;
  Scalar R = radius_hint;
  for (int growth = 0; growth < max_growth; ++growth) {
    std::vector<std::pair<Scalar, IntVec>> pts;  // (entry radius, point)
    std::vector<long> lo(d), hi(d);
    mpz_class visited = 0;
    bool over_cap = false;
    for (size_t j = 0; j < d; ++j) {
      Scalar b = R * unit_box[j];
      auto f = b.floor();
      long L = f ? f->get_si() : 0;
      lo[j] = -L;
      hi[j] = L;
    }
    std::vector<long> v(lo);
    while (true) {
      ++visited;
      if (visited > cap) { over_cap = true; break; }
      int firstnz = -1;
      for (size_t j = 0; j < d; ++j)
        if (v[j] != 0) { firstnz = static_cast<int>(j); break; }
      if (firstnz >= 0 && v[firstnz] > 0) {
        IntVec q(d);
        for (size_t j = 0; j < d; ++j) q[j] = v[j];
        Scalar rho = body.entry_radius(q);
        if (Scalar::compare_or_mid(rho, R) <= 0) pts.push_back({rho, q});
      }
      size_t j = d;
      while (j-- > 0) {
        if (v[j] < hi[j]) { ++v[j]; break; }
        v[j] = lo[j];
        if (j == 0) { j = SIZE_MAX; break; }
      }
      if (j == SIZE_MAX) break;
    }
    if (over_cap) {
      res.capped = true;
      res.cap_used = cap;
      return res;
    }
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
      int c = Scalar::compare_or_mid(a.first, b.first);
      if (c != 0) return c < 0;
      return a.second < b.second;
    });
    res.lambda.clear();
    res.witnesses.clear();
    for (const auto& [rho, q] : pts) {
      std::vector<IntVec> trial = res.witnesses;
      trial.push_back(q);
      if (detail::int_rank(trial) == trial.size()) {
        res.witnesses.push_back(q);
        res.lambda.push_back(rho);
        if (res.witnesses.size() == d) return res;
      }
    }
    R = R * Scalar(2);
  }
  res.capped = true;
  res.cap_used = cap;
  return res;
}

// ---------------------------------------------------------------------------

struct MinimaProfile {
  std::vector<Scalar> q_grid;
  std::vector<std::vector<Scalar>> L;  // per grid point: L_1 <= ... <= L_d
};

// L_j(q) = log lambda_j(e^q) for the target body of theta (or of a general
// matrix A read row-wise into stacked form rows; only the vector case is
// used by the templates module).
inline MinimaProfile log_minima_profile(const Vec& theta, const std::vector<Scalar>& q_grid) {
  MinimaProfile prof;
  prof.q_grid = q_grid;
  Scalar prev(0);
  bool first = true;
  for (const Scalar& q : q_grid) {
    if (!first && Scalar::compare_or_mid(q, prev) <= 0)
      throw scalar_error("q grid must be increasing");
    if (q.sign() < 0) throw scalar_error("q grid must be nonnegative");
    prev = q;
    first = false;
    Parallelepiped body = Parallelepiped::target_body(theta, q.exp());
    MinimaResult mr = body_minima(body);
    if (mr.capped) throw scalar_error("log_minima_profile: enumeration cap exceeded");
    std::vector<Scalar> Ls;
    for (const Scalar& lam : mr.lambda) Ls.push_back(lam.log());
    prof.L.push_back(std::move(Ls));
  }
  return prof;
}

// ---------------------------------------------------------------------------

struct MinkowskiAudit {
  Scalar product_times_volume;  // (prod lambda_j) * vol(body)
  Scalar lower;                 // 2^d / d!
  Scalar upper;                 // 2^d
  bool pass = false;
};

inline MinkowskiAudit minkowski_audit(const Parallelepiped& body, const MinimaResult& minima) {
  if (minima.lambda.size() != body.dim())
    throw scalar_error("minkowski_audit needs all d minima");
  MinkowskiAudit a;
  Scalar prod(1);
  for (const Scalar& l : minima.lambda) prod *= l;
  a.product_times_volume = prod * body.volume();
  long d = static_cast<long>(body.dim());
  mpz_class fact = 1;
  for (long i = 2; i <= d; ++i) fact *= i;
  a.upper = Scalar(2).pow_int(d);
  a.lower = a.upper / Scalar(fact);
  a.pass = Scalar::compare_or_mid(a.lower, a.product_times_volume) <= 0 &&
           Scalar::compare_or_mid(a.product_times_volume, a.upper) <= 0;
  return a;
}

}  // namespace gonlab
