#pragma once

// Finite-scale diagnostics for badly approximable targets: badness scores
// over coefficient shells, shell profiles, the doubling inequality, coset
// scans, measure-decay estimates, the Pell product certificate, the covering
// machinery (boxes B_l(eta), plans with levels E_k), the counting and
// measure audits, and a deterministic target search.
//
// Scores are minimized through their exact m-th powers ||q||^n <Aq-eta>^m,
// so comparisons never leave exact arithmetic for exact inputs.

#include "gonlab/bestapprox.hpp"

#include <cmath>
#include <cstdint>
#include <map>
#include <functional>
#include <sstream>
#include <thread>

namespace gonlab {

namespace detail {

// Visit every q with ||q|| = M, both signs (no normalization).
template <class F>
void for_each_full_shell_point(int n, long M, F&& visit) {
  std::vector<long> v(n);
  for (int p = 0; p < n; ++p) {
    for (long s : {M, -M}) {
      v.assign(n, 0);
      for (int i = 0; i < p; ++i) v[i] = -(M - 1);
      for (int i = p + 1; i < n; ++i) v[i] = -M;
      v[p] = s;
      while (true) {
        visit(v);
        int i = n - 1;
        while (i >= 0) {
          if (i == p) { --i; continue; }
          long hi = (i < p) ? M - 1 : M;
          if (v[i] == hi) { v[i] = -hi; --i; }
          else { ++v[i]; break; }
        }
        if (i < 0) break;
      }
    }
  }
}

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}
inline double unit_double(uint64_t x) { return (x >> 11) * 0x1.0p-53; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Residue cache: Aq mod 1 for every q in the shells up to Q, in shell order.

class ShellScorer {
 public:
  ShellScorer(const Mat& A, const Dims& dims, long q_max)
      : A_(A), dims_(dims), q_max_(q_max) {
    if (A.rows() != static_cast<size_t>(dims.m) || A.cols() != static_cast<size_t>(dims.n))
      throw scalar_error("matrix shape does not match dims");
    if (q_max < 1) throw scalar_error("q_max must be >= 1");
    shell_start_.push_back(0);
    for (long M = 1; M <= q_max; ++M) {
      detail::for_each_full_shell_point(dims.n, M, [&](const std::vector<long>& v) {
        Entry e;
        e.q.assign(v.begin(), v.end());
        e.residue.resize(dims.m);
        e.floor.resize(dims.m);
        for (int i = 0; i < dims.m; ++i) {
          Scalar s(0);
          for (int j = 0; j < dims.n; ++j)
            if (v[j] != 0) s += A_(i, j) * Scalar(mpq_class(v[j]));
          auto f = s.floor();
          if (!f) throw scalar_error("residue floor is ambiguous; raise precision");
          e.floor[i] = *f;
          e.residue[i] = s - Scalar(mpq_class(*f));
        }
        entries_.push_back(std::move(e));
      });
      shell_start_.push_back(entries_.size());
    }
  }

  const Dims& dims() const { return dims_; }
  long q_max() const { return q_max_; }

  struct Score {
    Scalar score;         // ||q||^{n/m} <Aq - eta>
    Scalar score_pow_m;   // exact m-th power
    IntVec q, p;          // lexicographically minimal witness pair
    Scalar dist;          // <Aq - eta> at the witness
  };

  // Exact minimum over Q0 <= ||q|| <= Q.
  Score score(const Vec& eta, long Q0, long Q) const {
    if (Q0 < 1 || Q0 > Q || Q > q_max_) throw scalar_error("bad shell range");
    if (eta.size() != static_cast<size_t>(dims_.m)) throw scalar_error("eta length mismatch");
    Score best;
    bool have = false;
    for (size_t i = shell_start_[Q0 - 1]; i < shell_start_[Q]; ++i) {
      const Entry& e = entries_[i];
      auto [dist, p] = target_distance(e, eta);
      mpz_class normq = 0;
      for (const auto& x : e.q) if (abs(x) > normq) normq = abs(x);
      Scalar powm = Scalar(mpq_class(normq)).pow_int(dims_.n) * dist.pow_int(dims_.m);
      int c = have ? Scalar::compare_or_mid(powm, best.score_pow_m) : -1;
      bool better = !have || c < 0;
      bool tie = have && c == 0;
      if (tie && (e.q < best.q || (e.q == best.q && p < best.p))) better = true;
      if (better) {
        best.score_pow_m = powm;
        best.q = e.q;
        best.p = p;
        best.dist = dist;
        have = true;
      }
    }
    best.score = best.score_pow_m.rootn(static_cast<unsigned long>(dims_.m));
    return best;
  }

  // First shell at which the running minimum drops to <= eps (or 0 = never).
  long crossing_shell(const Vec& eta, const Scalar& eps, long Q) const {
    Scalar eps_pow = eps.pow_int(dims_.m);
    for (long M = 1; M <= Q; ++M) {
      for (size_t i = shell_start_[M - 1]; i < shell_start_[M]; ++i) {
        const Entry& e = entries_[i];
        auto [dist, p] = target_distance(e, eta);
        Scalar powm = Scalar(mpz_class(M)).pow_int(dims_.n) * dist.pow_int(dims_.m);
        if (Scalar::compare_or_mid(powm, eps_pow) <= 0) return M;
      }
    }
    return 0;
  }

 private:
  struct Entry {
    IntVec q;
    Vec residue;             // Aq mod 1, componentwise in [0, 1)
    std::vector<mpz_class> floor;
  };

  // <Aq - eta> together with the nearest integer vector p (Aq - p closest).
  std::pair<Scalar, IntVec> target_distance(const Entry& e, const Vec& eta) const {
    Scalar worst(0);
    IntVec p(dims_.m);
    for (int i = 0; i < dims_.m; ++i) {
      Scalar x = e.residue[i] - eta[i];
      auto r = x.round_nearest();
      if (!r) throw scalar_error("distance rounding ambiguous; raise precision");
      Scalar d = (x - Scalar(mpq_class(*r))).abs();
      p[i] = e.floor[i] + *r;
      if (Scalar::compare_or_mid(d, worst) > 0) worst = d;
    }
    return {worst, p};
  }

  Mat A_;
  Dims dims_;
  long q_max_;
  std::vector<Entry> entries_;
  std::vector<size_t> shell_start_;
};

struct BadnessQuery {
  Mat A;
  Dims dims;
  Vec eta;
  long Q0 = 1, Q = 100;
};

inline ShellScorer::Score badness_score(const BadnessQuery& query) {
  ShellScorer scorer(query.A, query.dims, query.Q);
  return scorer.score(query.eta, query.Q0, query.Q);
}

// ---------------------------------------------------------------------------
// Shell profile: per-shell minima at (2^j, 2^{j+1}) and the running minimum
// as the liminf proxy, with the shell of the last strict decrease.

struct ShellProfile {
  struct Row {
    long Q0, Q1;
    Scalar shell_score;
    Scalar running_min;
  };
  std::vector<Row> rows;
  long last_decrease_at = 1;  // left edge of the shell of the last strict drop
};

inline ShellProfile shell_profile(const Mat& A, const Dims& dims, const Vec& eta,
                                  int doubling_steps) {
  if (doubling_steps < 1) throw scalar_error("doubling_steps must be >= 1");
  long Qmax = 1L << doubling_steps;
  ShellScorer scorer(A, dims, Qmax);
  ShellProfile prof;
  Scalar run_pow(0);
  bool have = false;
  Scalar run;
  for (int j = 0; j < doubling_steps; ++j) {
    long Q0 = 1L << j, Q1 = 2L << j;
    auto sc = scorer.score(eta, Q0, Q1);
    if (!have || Scalar::compare_or_mid(sc.score_pow_m, run_pow) < 0) {
      run_pow = sc.score_pow_m;
      run = sc.score;
      if (have) prof.last_decrease_at = Q0;
      have = true;
    }
    prof.rows.push_back({Q0, Q1, sc.score, run});
  }
  return prof;
}

// ---------------------------------------------------------------------------
// Doubling: min over ||q|| <= 2Q at target 2*eta is at most
// 2^{n/m + 1} * (min over ||q|| <= Q at target eta), realized by doubling
// the witness. Compared exactly through m-th powers.

struct DoublingReport {
  Scalar lhs, rhs_base;     // scores
  Scalar bound;             // 2^{n/m+1} * rhs_base (as a scalar)
  Scalar doubled_witness_value;
  bool pass = false;
};

inline DoublingReport doubling_inequality_check(const Mat& A, const Dims& dims,
                                                const Vec& eta, long Q) {
  if (Q < 2) throw scalar_error("Q must be >= 2");
  ShellScorer scorer(A, dims, 2 * Q);
  Vec eta2(eta.size());
  for (size_t i = 0; i < eta.size(); ++i) eta2[i] = eta[i] + eta[i];
  auto base = scorer.score(eta, 1, Q);
  auto lhs = scorer.score(eta2, 1, 2 * Q);
  DoublingReport rep;
  rep.lhs = lhs.score;
  rep.rhs_base = base.score;
  // exact comparison: lhs^m <= 2^{n+m} rhs^m
  Scalar factor = Scalar(mpz_class(mpz_class(1) << static_cast<unsigned long>(dims.n + dims.m)));
  rep.pass = Scalar::compare_or_mid(lhs.score_pow_m, factor * base.score_pow_m) <= 0;
  rep.bound = (factor * base.score_pow_m).rootn(static_cast<unsigned long>(dims.m));
  // the doubled witness evaluates the functional at 2q against 2*eta
  {
    IntVec q2 = base.q;
    for (auto& x : q2) x *= 2;
    Vec img(dims.m, Scalar(0));
    for (int i = 0; i < dims.m; ++i) {
      for (int j = 0; j < dims.n; ++j)
        if (q2[j] != 0) img[i] += A(i, j) * Scalar(mpq_class(q2[j]));
      img[i] -= eta2[i];
    }
    Scalar dist = torus_distance(img);
    mpz_class normq = 0;
    for (const auto& x : q2) if (abs(x) > normq) normq = abs(x);
    rep.doubled_witness_value =
        (Scalar(mpq_class(normq)).pow_int(dims.n) * dist.pow_int(dims.m))
            .rootn(static_cast<unsigned long>(dims.m));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Coset scan: badness along eta(t) = t (A q0 + p0) + eta over a deterministic
// t grid.

struct CosetScan {
  std::vector<std::pair<Scalar, Scalar>> scores;  // (t, score)
  double fraction_above = 0.0;
};

inline CosetScan coset_scan(const Mat& A, const Dims& dims, const IntVec& q0, const IntVec& p0,
                            const Vec& eta, const std::vector<Scalar>& t_grid, long Q,
                            const Scalar& eps) {
  if (q0.size() != static_cast<size_t>(dims.n) || p0.size() != static_cast<size_t>(dims.m))
    throw scalar_error("direction shape mismatch");
  Vec dir(dims.m, Scalar(0));
  for (int i = 0; i < dims.m; ++i) {
    dir[i] = Scalar(mpq_class(p0[i]));
    for (int j = 0; j < dims.n; ++j)
      if (q0[j] != 0) dir[i] += A(i, j) * Scalar(mpq_class(q0[j]));
  }
  bool nz = false;
  for (const Scalar& s : dir) nz = nz || !(s.is_exact() && s.sign() == 0);
  if (!nz) throw scalar_error("scan direction A q0 + p0 is zero");
  ShellScorer scorer(A, dims, Q);
  CosetScan out;
  size_t above = 0;
  Scalar eps_pow = eps.pow_int(dims.m);
  for (const Scalar& t : t_grid) {
    Vec et(eta.size());
    for (size_t i = 0; i < eta.size(); ++i) et[i] = eta[i] + t * dir[i];
    auto sc = scorer.score(et, 1, Q);
    out.scores.push_back({t, sc.score});
    if (Scalar::compare_or_mid(sc.score_pow_m, eps_pow) > 0) ++above;
  }
  out.fraction_above = t_grid.empty() ? 0.0 : double(above) / double(t_grid.size());
  return out;
}

// ---------------------------------------------------------------------------
// Measure decay: fraction of a deterministic eta grid whose badness proxy
// stays above eps at each checkpoint Q.

struct MeasureDecay {
  std::vector<long> checkpoints;
  std::vector<double> fraction_above;  // aligned with checkpoints
  size_t grid_size = 0;
};

inline MeasureDecay bad_measure_estimate(const Mat& A, const Dims& dims, int resolution,
                                         std::vector<long> checkpoints, const Scalar& eps,
                                         int threads = 1) {
  if (resolution < 10) throw scalar_error("resolution must be >= 10 per axis");
  std::sort(checkpoints.begin(), checkpoints.end());
  long Qmax = checkpoints.back();
  ShellScorer scorer(A, dims, Qmax);
  size_t total = 1;
  for (int i = 0; i < dims.m; ++i) total *= static_cast<size_t>(resolution);
  std::vector<long> crossing(total, 0);
  auto eta_at = [&](size_t idx) {
    Vec eta(dims.m);
    size_t rem = idx;
    for (int i = 0; i < dims.m; ++i) {
      eta[i] = Scalar(mpq_class(static_cast<long>(rem % resolution), resolution));
      rem /= resolution;
    }
    return eta;
  };
  auto worker = [&](size_t lo, size_t hi) {
    for (size_t idx = lo; idx < hi; ++idx) crossing[idx] = scorer.crossing_shell(eta_at(idx), eps, Qmax);
  };
  if (threads <= 1) {
    worker(0, total);
  } else {
    std::vector<std::thread> pool;
    size_t chunk = (total + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      size_t lo = t * chunk, hi = std::min(total, lo + chunk);
      if (lo < hi) pool.emplace_back(worker, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  MeasureDecay out;
  out.grid_size = total;
  out.checkpoints = checkpoints;
  for (long Q : checkpoints) {
    size_t above = 0;
    for (long c : crossing)
      if (c == 0 || c > Q) ++above;
    out.fraction_above.push_back(double(above) / double(total));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pell certificate: the block lattice with rows built from (1, sqrt 2) and
// (1, -sqrt 2), shifted by 1/2 in the paired coordinates. The product of the
// paired coordinates is (p + 1/2)^2 - 2 q^2, an element of Z + 1/4, so the
// grid values stay >= (1/4)^m; the homogeneous lattice has systole >= 1
// because |p^2 - 2q^2| >= 1 off the origin.

struct PellCertificate {
  int m = 2;                       // n = m, d = 2m
  Scalar plane_infimum;            // 1/4, the 2d projection infimum
  Scalar value_bound;              // (1/4)^m
  bool algebra_ok = false;         // residue class check over the enumeration
  long plane_Q = 0;
  Scalar plane_enum_min;           // min over the 2d projection enumeration
  long full_Q = 0;
  Scalar full_enum_min;            // min F over the full grid enumeration
  bool enum_ok = false;            // no enumerated value below the bound
  std::vector<std::pair<Scalar, Scalar>> systole;  // (t, systole of h_t g Z^d)
  bool systole_ok = false;         // systole >= 1 at every sampled t
};

namespace detail {

inline Mat pell_block_basis(int m) {
  // rows i and m+i carry (1, sqrt2) and (1, -sqrt2) in columns i and m+i
  int d = 2 * m;
  Mat g(d, d);
  Scalar r2 = Scalar::sqrt_of_ui(2);
  for (int i = 0; i < m; ++i) {
    g(i, i) = Scalar(1);
    g(i, m + i) = r2;
    g(m + i, i) = Scalar(1);
    g(m + i, m + i) = -r2;
  }
  return g;
}

}  // namespace detail

inline PellCertificate pell_certificate(int m, long plane_Q, long full_Q,
                                        const std::vector<Scalar>& t_grid) {
  if (m < 1) throw scalar_error("m must be >= 1");
  PellCertificate cert;
  cert.m = m;
  cert.plane_infimum = Scalar(mpq_class(1, 4));
  cert.value_bound = Scalar(mpq_class(1, 4)).pow_int(m);
  cert.plane_Q = plane_Q;
  cert.full_Q = full_Q;

  // (i) exact residue argument, audited over the plane enumeration:
  // (p + 1/2)^2 - 2 q^2 = (4(p^2 + p - 2 q^2) + 1) / 4 and 4k + 1 is odd.
  bool algebra = true;
  int64_t best_num = 0;
  bool have = false;
  long argp = 0, argq = 0;
  for (long p = -plane_Q; p <= plane_Q; ++p) {
    for (long q = -plane_Q; q <= plane_Q; ++q) {
      int64_t k = static_cast<int64_t>(p) * (p + 1) - 2 * static_cast<int64_t>(q) * q;
      int64_t num = std::llabs(4 * k + 1);
      algebra = algebra && num >= 1;
      if (!have || num < best_num) {
        best_num = num;
        argp = p;
        argq = q;
        have = true;
      }
    }
  }
  (void)argp;
  (void)argq;
  cert.algebra_ok = algebra;
  cert.plane_enum_min = Scalar(mpq_class(best_num, 4));

  // (ii) full-dimensional enumeration at a small radius
  Dims dims(m, m);
  int d = 2 * m;
  Mat g = detail::pell_block_basis(m);
  Vec shift(d, Scalar(mpq_class(1, 2)));
  Scalar fmin(0);
  bool ffirst = true;
  std::vector<long> v(d, -full_Q);
  while (true) {
    Vec pt = shift;
    for (int j = 0; j < d; ++j)
      if (v[j] != 0)
        for (int r = 0; r < d; ++r) pt[r] += g(r, j) * Scalar(mpq_class(v[j]));
    Scalar f = f_value(pt, dims);
    if (ffirst || Scalar::compare_or_mid(f, fmin) < 0) fmin = f;
    ffirst = false;
    int i = d - 1;
    while (i >= 0 && v[i] == full_Q) { v[i] = -full_Q; --i; }
    if (i < 0) break;
    ++v[i];
  }
  cert.full_enum_min = fmin;
  cert.enum_ok = Scalar::compare_or_mid(cert.plane_enum_min, cert.plane_infimum) >= 0 &&
                 Scalar::compare_or_mid(fmin, cert.value_bound) >= 0;

  // (iii) systole of the homogeneous lattice along the flow. The lattice is a
  // direct sum of m identical Pell planes {(e^t u, e^{-t} u'): u in Z[sqrt2]}
  // (u' the conjugate), so the systole equals the plane systole. A plane
  // vector has sup-norm^2 >= |u u'| = |a^2 - 2b^2| >= 1, and elements with
  // |norm| <= 2 are exactly +-(1+sqrt2)^j and +-sqrt2 (1+sqrt2)^j; elements
  // with |norm| >= 4 have sup-norm >= 2, which never wins. Scanning unit
  // powers near j* = t / ln(1+sqrt2) therefore finds the exact minimum.
  cert.systole_ok = true;
  {
    Scalar unit = Scalar::quadratic(1, 1, 2);  // 1 + sqrt 2
    Scalar logunit = unit.log();
    Scalar r2 = Scalar::sqrt_of_ui(2);
    for (const Scalar& t : t_grid) {
      Scalar et = t.exp();
      auto jf = (t / logunit).floor();
      long jstar = jf ? jf->get_si() : 0;
      Scalar best(0);
      bool first = true;
      // balance e^t |u| against e^{-t} |u'|: |u| ~ e^{-t} means u = unit^{-j*}
      for (long j = -jstar - 2; j <= -jstar + 2; ++j) {
        for (int fam = 0; fam < 2; ++fam) {
          Scalar u = unit.pow_int(j);
          if (fam == 1) u = u * r2;
          // conjugate: a - b sqrt2
          Scalar uc = u.is_quadratic()
                          ? Scalar::quadratic(u.quad().a, -u.quad().b, u.quad().d)
                          : u;
          Scalar plus = u.abs() * et;
          Scalar minus = uc.abs() / et;
          Scalar norm = Scalar::compare_or_mid(plus, minus) >= 0 ? plus : minus;
          if (first || Scalar::compare_or_mid(norm, best) < 0) {
            best = norm;
            first = false;
          }
        }
      }
      cert.systole.push_back({t, best});
      Scalar tol = Scalar(mpq_class(1, 2)).pow_int(64);
      cert.systole_ok =
          cert.systole_ok && Scalar::compare_or_mid(best, Scalar(1) - tol) >= 0;
    }
  }
  return cert;
}

// ---------------------------------------------------------------------------
// Covering boxes B_l(eta) and the box cover check.

struct BoxCoverReport {
  size_t l = 0;              // 0-based entry index into the sequence
  Scalar R;                  // d M_{l+1} / Delta_l
  Scalar side;               // 2 d zeta_l / Delta_l
  size_t grid_points = 0;
  size_t hits = 0;
  struct Failure {
    Vec eta;
  };
  std::vector<Failure> failures;  // nonempty would contradict the covering lemma
  std::vector<IntVec> witnesses;  // q per grid point
  bool all_hit() const { return failures.empty(); }
};

// Search ||q|| <= R_l for a point Aq - p inside B_l(eta) = prod [eta_i,
// eta_i + side). Componentwise: frac((Aq)_i - eta_i) < side.
inline BoxCoverReport box_cover_check(const BestApproxSequence& seq, size_t l,
                                      const std::vector<Vec>& eta_grid) {
  if (l + 1 >= seq.entries.size()) throw scalar_error("need the sequence through l+1");
  const Dims& dims = seq.dims;
  Scalar delta = seq.delta(l);
  Scalar dd(static_cast<long>(dims.d()));
  BoxCoverReport rep;
  rep.l = l;
  rep.R = dd * Scalar(mpq_class(seq.entries[l + 1].M)) / delta;
  rep.side = Scalar(2) * dd * seq.entries[l].zeta / delta;
  auto fR = rep.R.floor();
  long R = fR ? fR->get_si() : 0;
  for (const Vec& eta : eta_grid) {
    ++rep.grid_points;
    bool found = false;
    IntVec witness;
    // q = 0 first (p can place the origin in the box when eta is near 0 mod 1)
    for (long M = 0; M <= R && !found; ++M) {
      auto try_q = [&](const std::vector<long>& v) {
        if (found) return;
        Vec img(dims.m, Scalar(0));
        for (int i = 0; i < dims.m; ++i) {
          for (int j = 0; j < dims.n; ++j)
            if (v[j] != 0) img[i] += seq.A(i, j) * Scalar(mpq_class(v[j]));
          img[i] -= eta[i];
        }
        // need frac(img_i) < side for every i
        bool ok = true;
        for (int i = 0; i < dims.m && ok; ++i) {
          auto f = img[i].floor();
          if (!f) { ok = false; break; }
          Scalar frac = img[i] - Scalar(mpq_class(*f));
          ok = Scalar::compare_or_mid(frac, rep.side) < 0;
        }
        if (ok) {
          found = true;
          witness.assign(v.begin(), v.end());
        }
      };
      if (M == 0) {
        std::vector<long> zero(dims.n, 0);
        try_q(zero);
      } else {
        detail::for_each_full_shell_point(dims.n, M, try_q);
      }
    }
    if (found) {
      ++rep.hits;
      rep.witnesses.push_back(witness);
    } else {
      rep.failures.push_back({eta});
      rep.witnesses.push_back({});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Covering plan.

struct CoveringLevel {
  size_t k = 0;            // 1-based position in the subsequence
  size_t l = 0;            // entry index l_k
  Scalar H;                // finite-horizon H_k
  Scalar required_phi;     // d^d (3/eps)^m H_k
  Scalar phi;              // chosen phi_k (valid only when built)
  bool built = false;
  std::string skip_reason;
  Scalar R, side, delta_k;
  mpz_class boxes_per_axis;    // ceil(Delta / (2 d zeta))
  mpz_class W, Wp, Wpp;        // W_k, W'_k, W''_k
  std::vector<Vec> centers;    // xi points, only when built with a matrix
  std::vector<IntVec> center_q;
  Scalar lambda_Ek;            // W'' (2 delta)^m
  bool disjoint_ok = true;
};

struct CoveringPlan {
  std::vector<CoveringLevel> levels;
  std::vector<Scalar> phi_delta_partial_sums;  // sum over built k of phi_k Delta^{d-1}
  std::vector<Scalar> lambda_partial_sums;     // sum of lambda(E_k)
  bool phi_decreasing_trend = false;           // over built levels
  struct PairAudit {
    size_t k, k1;            // 1-based level positions (built levels)
    mpz_class max_count;     // max #(level-k1 boxes meeting one level-k box)
    Scalar bound;            // lambda(I^k) W''_{k1} (1 + 2^m eps)
    bool pass;
  };
  std::vector<PairAudit> sharp_audits;
  std::vector<std::string> notes;
};

// Default phi policy: max(required, dyadic upper bound of k^{-1/2}).
inline Scalar default_phi_policy(size_t k, const Scalar& required) {
  // smallest dyadic p/2^20 >= 1/sqrt(k)
  mpz_class num = mpz_class(1) << 40;
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), mpz_class(num / static_cast<long>(k)).get_mpz_t());
  // root approx 2^20 / sqrt(k), rounded down; bump to stay an upper bound
  Scalar dyadic = Scalar(mpq_class(root + 1, mpz_class(1) << 20));
  return Scalar::compare_or_mid(required, dyadic) >= 0 ? required : dyadic;
}

inline CoveringPlan covering_plan_build(
    const BestApproxSequence& seq, const std::vector<size_t>& lk, const Scalar& eps,
    size_t k_max, bool with_centers = true,
    const std::function<Scalar(size_t, const Scalar&)>& phi_policy = default_phi_policy) {
  if (!(eps.sign() > 0) || !(Scalar::compare_or_mid(eps, Scalar(mpq_class(1, 2))) < 0))
    throw scalar_error("need 0 < eps < 1/2");
  if (lk.empty()) throw scalar_error("empty subsequence");
  const Dims& dims = seq.dims;
  Scalar dd(static_cast<long>(dims.d()));
  long d = dims.d();

  // H_k over the available horizon (same formula as the class-C report)
  size_t K = std::min(k_max, lk.size());
  std::vector<Scalar> tail_term(lk.size());
  for (size_t k = 0; k < lk.size(); ++k)
    tail_term[k] = (seq.entries[lk[k]].zeta / seq.delta(lk[k])).pow_int(dims.m);
  std::vector<Scalar> tail_sup(lk.size());
  for (size_t k = lk.size(); k-- > 0;) {
    tail_sup[k] = tail_term[k];
    if (k + 1 < lk.size() && Scalar::compare_or_mid(tail_sup[k + 1], tail_sup[k]) > 0)
      tail_sup[k] = tail_sup[k + 1];
  }

  CoveringPlan plan;
  Scalar dpow = dd.pow_int(d);
  Scalar epsfac = (Scalar(3) / eps).pow_int(dims.m);
  Scalar sum_phi_delta(0), sum_lambda(0);
  bool any_built = false;
  bool truncated = false;
  for (size_t k = 0; k < K; ++k) {
    CoveringLevel lev;
    lev.k = k + 1;
    lev.l = lk[k];
    if (lk[k] + 1 >= seq.entries.size()) throw scalar_error("subsequence runs past the data");
    Scalar delta = seq.delta(lk[k]);
    if (k + 1 < lk.size()) {
      Scalar head = (Scalar(mpq_class(seq.entries[lk[k] + 1].M)) / delta).pow_int(dims.n);
      lev.H = head * tail_sup[k + 1];
    } else {
      lev.H = Scalar(0);  // no tail left; report only
    }
    lev.required_phi = dpow * epsfac * lev.H;
    if (truncated) {
      lev.skip_reason = "plan truncated at an earlier level";
      plan.levels.push_back(std::move(lev));
      continue;
    }
    if (Scalar::compare_or_mid(lev.required_phi, Scalar(1)) >= 0) {
      lev.skip_reason = "required phi >= 1; the horizon H_k is too large here";
      if (any_built) {
        truncated = true;
        plan.notes.push_back("truncated at level " + std::to_string(k + 1) +
                             ": phi constraint unsatisfiable");
      }
      plan.levels.push_back(std::move(lev));
      continue;
    }
    lev.phi = phi_policy(k + 1, lev.required_phi);
    if (Scalar::compare_or_mid(lev.phi, Scalar(1)) >= 0)
      lev.phi = (Scalar(1) + lev.required_phi) / Scalar(2);
    lev.built = true;
    any_built = true;

    const Scalar& zeta = seq.entries[lk[k]].zeta;
    lev.R = dd * Scalar(mpq_class(seq.entries[lk[k] + 1].M)) / delta;
    lev.side = Scalar(2) * dd * zeta / delta;
    lev.delta_k = lev.phi.rootn(static_cast<unsigned long>(dims.m)) /
                  lev.R.pow_int(dims.n).rootn(static_cast<unsigned long>(dims.m));
    // boxes per axis: ceil(Delta / (2 d zeta)) = ceil(1 / side)
    Scalar inv_side = delta / (Scalar(2) * dd * zeta);
    auto fl = inv_side.floor();
    if (!fl) throw scalar_error("box count ambiguous");
    mpz_class C = *fl;
    if (!(Scalar(mpq_class(C)) == inv_side)) C += 1;
    lev.boxes_per_axis = C;
    auto powm = [&](mpz_class base) {
      mpz_class r = 1;
      for (int i = 0; i < dims.m; ++i) r *= base;
      return r;
    };
    lev.W = powm(C);
    lev.Wp = powm(C - 1);
    lev.Wpp = powm((C - 1) / 3);
    lev.lambda_Ek = Scalar(mpq_class(lev.Wpp)) *
                    (Scalar(2) * lev.delta_k).pow_int(dims.m);

    if (with_centers && seq.A.rows() > 0) {
      // Selected boxes have per-axis indices 1, 4, 7, ... (three apart),
      // (C-1)/3 of them per axis; one representative point Aq - p per box.
      // A single sweep over ||q|| <= R assigns each residue Aq mod 1 to its
      // box index floor(residue / side) and keeps the first arrival.
      mpz_class per_axis = (C - 1) / 3;
      if (per_axis.fits_slong_p() && lev.Wpp.fits_slong_p() &&
          lev.Wpp <= mpz_class(4000000)) {
        long P = per_axis.get_si();
        auto fR = lev.R.floor();
        long Rl = fR ? std::max(1L, fR->get_si()) : 1;
        std::map<std::vector<long>, std::pair<IntVec, Vec>> found;  // box -> (q, xi)
        size_t wanted = static_cast<size_t>(lev.Wpp.get_si());
        auto try_q = [&](const std::vector<long>& v) {
          if (found.size() >= wanted) return;
          Vec frac(dims.m);
          std::vector<long> box(dims.m);
          for (int i = 0; i < dims.m; ++i) {
            Scalar s(0);
            for (int j = 0; j < dims.n; ++j)
              if (v[j] != 0) s += seq.A(i, j) * Scalar(mpq_class(v[j]));
            auto f = s.floor();
            if (!f) throw scalar_error("residue floor ambiguous");
            frac[i] = s - Scalar(mpq_class(*f));
            auto bi = (frac[i] / lev.side).floor();
            if (!bi) throw scalar_error("box index ambiguous");
            long b = bi->get_si();
            if (b % 3 != 1 || (b - 1) / 3 >= P) return;  // not a selected box
            box[i] = b;
          }
          if (found.count(box)) return;
          IntVec q(v.begin(), v.end());
          found.emplace(box, std::make_pair(q, frac));
        };
        std::vector<long> zero(dims.n, 0);
        try_q(zero);
        for (long M = 1; M <= Rl && found.size() < wanted; ++M)
          detail::for_each_full_shell_point(dims.n, M, try_q);
        if (found.size() < wanted) {
          lev.disjoint_ok = false;
          plan.notes.push_back("missing centers at level " + std::to_string(k + 1) + ": " +
                               std::to_string(wanted - found.size()) + " boxes unfilled");
        }
        for (const auto& [box, qxi] : found) {
          lev.center_q.push_back(qxi.first);
          lev.centers.push_back(qxi.second);
        }
        // Disjointness: centers occupy distinct selected boxes three sides
        // apart, so half-side < side suffices; verified exactly, with a
        // direct pairwise check when the level is small.
        if (Scalar::compare_or_mid(lev.delta_k, lev.side) >= 0) lev.disjoint_ok = false;
        size_t nc = lev.centers.size();
        if (nc <= 600) {
          for (size_t i = 0; i < nc && lev.disjoint_ok; ++i)
            for (size_t j = i + 1; j < nc && lev.disjoint_ok; ++j) {
              bool overlap = true;
              for (int c = 0; c < dims.m; ++c) {
                Scalar gap = (lev.centers[i][c] - lev.centers[j][c]).abs();
                if (Scalar::compare_or_mid(gap, Scalar(2) * lev.delta_k) > 0) {
                  overlap = false;
                  break;
                }
              }
              if (overlap) lev.disjoint_ok = false;
            }
        }
      } else {
        plan.notes.push_back("level " + std::to_string(k + 1) +
                             " too large to realize centers; geometry only");
      }
    }
    sum_phi_delta += lev.phi * delta.pow_int(d - 1);
    sum_lambda += lev.lambda_Ek;
    plan.phi_delta_partial_sums.push_back(sum_phi_delta);
    plan.lambda_partial_sums.push_back(sum_lambda);
    plan.levels.push_back(std::move(lev));
  }

  // ff1 trend: phi decreasing over built levels
  std::vector<const CoveringLevel*> built;
  for (const auto& lev : plan.levels)
    if (lev.built) built.push_back(&lev);
  if (built.size() >= 2) {
    bool dec = true;
    for (size_t i = 0; i + 1 < built.size(); ++i)
      if (Scalar::compare_or_mid(built[i + 1]->phi, built[i]->phi) > 0) dec = false;
    plan.phi_decreasing_trend = dec;
  }

  // cross-level intersection counts (m = 1 sweep; small levels only otherwise)
  for (size_t a = 0; a < built.size(); ++a)
    for (size_t b = a + 1; b < built.size(); ++b) {
      const CoveringLevel& lk0 = *built[a];
      const CoveringLevel& lk1 = *built[b];
      if (lk0.centers.empty() || lk1.centers.empty()) continue;
      if (static_cast<size_t>(lk0.centers.size()) * lk1.centers.size() > 4000000) continue;
      mpz_class worst = 0;
      for (const Vec& ci : lk0.centers) {
        mpz_class cnt = 0;
        for (const Vec& cj : lk1.centers) {
          bool meet = true;
          for (int c = 0; c < seq.dims.m && meet; ++c) {
            Scalar gap = (ci[c] - cj[c]).abs();
            meet = Scalar::compare_or_mid(gap, lk0.delta_k + lk1.delta_k) <= 0;
          }
          if (meet) ++cnt;
        }
        if (cnt > worst) worst = cnt;
      }
      CoveringPlan::PairAudit audit;
      audit.k = lk0.k;
      audit.k1 = lk1.k;
      audit.max_count = worst;
      Scalar lam = (Scalar(2) * lk0.delta_k).pow_int(seq.dims.m);
      audit.bound = lam * Scalar(mpq_class(lk1.Wpp)) *
                    (Scalar(1) + Scalar(mpz_class(mpz_class(1) << seq.dims.m)) * eps);
      audit.pass = Scalar::compare_or_mid(Scalar(mpq_class(worst)), audit.bound) <= 0;
      plan.sharp_audits.push_back(audit);
    }
  return plan;
}

// ---------------------------------------------------------------------------
// Counting audit: #S(M, delta, a_3..a_m) <= 18 M^2 (sum |a_i| + 1).

struct AuxCountReport {
  mpz_class count = 0;
  mpz_class bound = 0;
  bool pass = false;
};

inline AuxCountReport aux_count_audit(long M, const Scalar& delta,
                                      const std::vector<long>& a_tail, const Scalar& theta1,
                                      const Scalar& theta2) {
  if (!(delta.sign() > 0) || !(Scalar::compare_or_mid(delta, Scalar(mpq_class(1, 2))) < 0))
    throw scalar_error("need 0 < delta < 1/2");
  bool tail_nonzero = false;
  for (long a : a_tail) tail_nonzero = tail_nonzero || a != 0;
  if (!tail_nonzero) throw scalar_error("(a_3..a_m) must be nonzero");
  long lo_sum = 0, hi_sum = 0, abs_sum = 0;
  for (long a : a_tail) {
    lo_sum += std::min(a, 0L);
    hi_sum += std::max(a, 0L);
    abs_sum += std::labs(a);
  }
  AuxCountReport rep;
  for (long a1 = -(M - 1); a1 <= M - 1; ++a1)
    for (long a2 = -(M - 1); a2 <= M - 1; ++a2) {
      // a0 ranges over integers in [-delta - hi - c, delta - lo - c] with
      // c = a1 theta1 + a2 theta2
      Scalar c = theta1 * Scalar(a1) + theta2 * Scalar(a2);
      Scalar upper = delta - Scalar(lo_sum) - c;
      Scalar lower = -delta - Scalar(hi_sum) - c;
      auto fu = upper.floor();
      auto fl = (-lower).floor();  // ceil(lower) = -floor(-lower)
      if (!fu || !fl) throw scalar_error("aux count interval ambiguous; raise precision");
      mpz_class top = *fu, bottom = -*fl;
      if (top >= bottom) rep.count += top - bottom + 1;
    }
  rep.bound = 18 * mpz_class(M) * M * (abs_sum + 1);
  rep.pass = rep.count <= rep.bound;
  return rep;
}

// ---------------------------------------------------------------------------
// Measure audit for the union of slabs B_{M, eps}.

struct BmeReport {
  double estimate = 0.0;
  double standard_error = 0.0;
  double K = 0.0;             // summation constant for the given (m, M)
  double bound = 0.0;         // K * eps
  bool pass = false;          // estimate <= bound within 3 standard errors
  size_t samples = 0;
};

inline BmeReport bme_measure_audit(long M, double eps, int m, double theta1, double theta2,
                                   size_t samples, uint64_t seed) {
  if (m <= 2) throw scalar_error("m must exceed 2");
  if (!(eps > 0 && eps < 0.5)) throw scalar_error("need 0 < eps < 1/2");
  int k = m - 2;
  BmeReport rep;
  rep.samples = samples;
  double tol = eps / std::pow(double(M), m);

  // membership of theta_tail in the union over admissible integer vectors
  auto member = [&](const std::vector<double>& tail) {
    std::vector<long> at(k, -(M - 1));
    while (true) {
      bool nz = false;
      for (long x : at) nz = nz || x != 0;
      if (nz) {
        for (long a1 = -(M - 1); a1 <= M - 1; ++a1)
          for (long a2 = -(M - 1); a2 <= M - 1; ++a2) {
            double rest = a1 * theta1 + a2 * theta2;
            for (int i = 0; i < k; ++i) rest += at[i] * tail[i];
            double frac = rest - std::nearbyint(rest);
            if (std::fabs(frac) < tol) return true;
          }
      }
      int i = k - 1;
      while (i >= 0 && at[i] == M - 1) { at[i] = -(M - 1); --i; }
      if (i < 0) break;
      ++at[i];
    }
    return false;
  };

  size_t hits = 0;
  std::vector<double> tail(k);
  for (size_t s = 0; s < samples; ++s) {
    for (int i = 0; i < k; ++i)
      tail[i] = detail::unit_double(detail::splitmix64(seed + s * 1000003ull + i));
    if (member(tail)) ++hits;
  }
  rep.estimate = double(hits) / double(samples);
  rep.standard_error = std::sqrt(rep.estimate * (1.0 - rep.estimate) / double(samples));

  // K = 36 (m-2)^{(m-3)/2} M^{2-m} sum_{tail != 0, |a_i| < M} (sum|a_i|+1)/||a||_2
  double K = 0.0;
  std::vector<long> at(k, -(M - 1));
  while (true) {
    bool nz = false;
    long abs_sum = 0;
    double sq = 0;
    for (long x : at) {
      nz = nz || x != 0;
      abs_sum += std::labs(x);
      sq += double(x) * double(x);
    }
    if (nz) K += double(abs_sum + 1) / std::sqrt(sq);
    int i = k - 1;
    while (i >= 0 && at[i] == M - 1) { at[i] = -(M - 1); --i; }
    if (i < 0) break;
    ++at[i];
  }
  K *= 36.0 * std::pow(double(m - 2), double(m - 3) / 2.0) * std::pow(double(M), 2.0 - m);
  rep.K = K;
  rep.bound = K * eps;
  rep.pass = rep.estimate <= rep.bound + 3.0 * rep.standard_error;
  return rep;
}

// Exact measure of one slab {theta in [0,1]^k : |c + a . theta| < t} by
// inclusion-exclusion, for rational c, t and integer a != 0.
inline mpq_class slab_measure_exact(std::vector<long> a, mpq_class c, const mpq_class& t) {
  size_t k = a.size();
  // flip negative coefficients: theta_i -> 1 - theta_i
  for (auto& ai : a)
    if (ai < 0) {
      c += ai;
      ai = -ai;
    }
  std::vector<long> pos;
  for (long ai : a)
    if (ai > 0) pos.push_back(ai);
  size_t kp = pos.size();
  // F(s) = vol{ theta in [0,1]^k : sum pos_i theta_i <= s } (zero coeffs are free)
  auto F = [&](const mpq_class& s) -> mpq_class {
    if (kp == 0) return s >= 0 ? 1 : 0;
    mpq_class total = 0;
    // inclusion-exclusion over subsets
    for (size_t mask = 0; mask < (size_t(1) << kp); ++mask) {
      mpq_class shift = s;
      int bits = 0;
      for (size_t i = 0; i < kp; ++i)
        if (mask & (size_t(1) << i)) {
          shift -= pos[i];
          ++bits;
        }
      if (shift <= 0) continue;
      mpq_class term = 1;
      for (size_t i = 0; i < kp; ++i) term *= shift;
      total += (bits % 2 == 0) ? term : -term;
    }
    mpz_class fact = 1;
    for (size_t i = 2; i <= kp; ++i) fact *= static_cast<long>(i);
    mpq_class denom(fact);
    for (long ai : pos) denom *= ai;
    mpq_class vol = total / denom;
    if (vol > 1) vol = 1;
    return vol;
  };
  mpq_class measure = F(t - c) - F(-t - c);
  if (measure < 0) measure = 0;
  return measure;
}

// ---------------------------------------------------------------------------
// Deterministic target search: dyadic beam refinement of eta maximizing the
// badness score at shell (1, Q). Returns a witness, never a membership proof.

struct EtaSearchResult {
  Vec eta;
  Scalar score;
  size_t evaluations = 0;
};

inline EtaSearchResult eta_search(const Mat& A, const Dims& dims, long Q, size_t budget,
                                  uint64_t seed = 1, size_t beam = 4) {
  if (budget < 1) throw scalar_error("budget must be >= 1");
  ShellScorer scorer(A, dims, Q);
  size_t evals = 0;
  struct Cand {
    Vec eta;
    Scalar pow;  // score^m, exact comparisons
  };
  auto eval = [&](const Vec& eta) {
    ++evals;
    return scorer.score(eta, 1, Q).score_pow_m;
  };
  auto lex_less = [](const Vec& a, const Vec& b) {
    for (size_t i = 0; i < a.size(); ++i) {
      int c = Scalar::compare_or_mid(a[i], b[i]);
      if (c != 0) return c < 0;
    }
    return false;
  };
  std::vector<Cand> pool;
  // deterministic starts: centers of the dyadic grid at level 2 plus seeded
  // dyadic jitter points
  std::vector<Vec> starts;
  {
    std::vector<long> idx(dims.m, 0);
    while (true) {
      Vec eta(dims.m);
      for (int i = 0; i < dims.m; ++i) eta[i] = Scalar(mpq_class(2 * idx[i] + 1, 8));
      starts.push_back(eta);
      int i = dims.m - 1;
      while (i >= 0 && idx[i] == 3) { idx[i] = 0; --i; }
      if (i < 0) break;
      ++idx[i];
    }
    for (int j = 0; j < 4; ++j) {
      Vec eta(dims.m);
      for (int i = 0; i < dims.m; ++i) {
        uint64_t r = detail::splitmix64(seed + 97 * j + i);
        eta[i] = Scalar(mpq_class(static_cast<long>(r & 0xffff), 0x10000));
      }
      starts.push_back(eta);
    }
  }
  for (const Vec& s : starts) {
    if (evals >= budget) break;
    pool.push_back({s, eval(s)});
  }
  auto better = [&](const Cand& a, const Cand& b) {
    int c = Scalar::compare_or_mid(a.pow, b.pow);
    if (c != 0) return c > 0;
    return lex_less(a.eta, b.eta);
  };
  std::sort(pool.begin(), pool.end(), better);
  if (pool.size() > beam) pool.resize(beam);
  long level = 4;  // refine by 2^-level steps
  while (evals < budget && level < 60) {
    std::vector<Cand> next = pool;
    mpq_class step(1, mpz_class(1) << static_cast<unsigned long>(level));
    for (const Cand& c : pool) {
      std::vector<long> dir(dims.m, -1);
      while (true) {
        bool nonzero = false;
        for (long x : dir) nonzero = nonzero || x != 0;
        if (nonzero && evals < budget) {
          Vec eta = c.eta;
          for (int i = 0; i < dims.m; ++i) {
            eta[i] = eta[i] + Scalar(mpq_class(dir[i]) * step);
            // wrap into [0, 1)
            auto f = eta[i].floor();
            if (f && *f != 0) eta[i] -= Scalar(mpq_class(*f));
          }
          next.push_back({eta, eval(eta)});
        }
        int i = dims.m - 1;
        while (i >= 0 && dir[i] == 1) { dir[i] = -1; --i; }
        if (i < 0) break;
        ++dir[i];
      }
    }
    std::sort(next.begin(), next.end(), better);
    next.erase(std::unique(next.begin(), next.end(),
                           [&](const Cand& a, const Cand& b) {
                             return !lex_less(a.eta, b.eta) && !lex_less(b.eta, a.eta);
                           }),
               next.end());
    if (next.size() > beam) next.resize(beam);
    pool = std::move(next);
    ++level;
  }
  EtaSearchResult res;
  res.eta = pool.front().eta;
  res.score = pool.front().pow.rootn(static_cast<unsigned long>(dims.m));
  res.evaluations = evals;
  return res;
}

}  // namespace gonlab
