#pragma once

// The irrationality measure function Psi_A(t) = min { <Aq> : 0 < ||q|| <= t },
// its jump sequence (M_l, zeta_l) with witnesses, the products
// Delta_l = M_{l+1}^n zeta_l^m, the exponential-growth audit, and the
// class-C diagnostic report.
//
// Everything is computed by one exhaustive sweep over sup-norm shells
// ||q|| = 1, 2, ..., t_max. Rational matrices take an integer fast path
// (residues modulo the common denominator); exact kinds stay exact.

#include "gonlab/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>

namespace gonlab {

struct PsiResult {
  Scalar value;
  IntVec witness;              // lexicographically smallest minimizer, sign-normalized
  bool rational_dependence = false;  // value is exactly 0
};

struct BestApproxEntry {
  mpz_class M;       // jump location, = ||witness||
  Scalar zeta;       // Psi value at the jump
  IntVec witness;
};

struct BestApproxSequence {
  Dims dims;
  Mat A;                        // empty for synthetic sequences
  std::vector<BestApproxEntry> entries;
  mpz_class t_max = 0;
  bool rational_dependence_hit = false;

  size_t size() const { return entries.size(); }

  // Delta_l = M_{l+1}^n * zeta_l^m; defined for l with a successor.
  Scalar delta(size_t l) const {
    if (l + 1 >= entries.size()) throw scalar_error("delta needs a successor entry");
    return Scalar(mpq_class(entries[l + 1].M)).pow_int(dims.n) *
           entries[l].zeta.pow_int(dims.m);
  }

  void check_invariants() const {
    for (size_t l = 0; l + 1 < entries.size(); ++l) {
      if (!(entries[l].M < entries[l + 1].M))
        throw scalar_error("M_l must be strictly increasing");
      if (!(Scalar::compare_or_mid(entries[l + 1].zeta, entries[l].zeta) < 0))
        throw scalar_error("zeta_l must be strictly decreasing");
      if (entries[l + 1].zeta.is_exact() && entries[l].zeta.is_exact() &&
          Scalar::compare_or_mid(delta(l), Scalar(1)) > 0)
        throw scalar_error("Minkowski bound violated: Delta_l > 1");
    }
  }

  static BestApproxSequence synthetic(Dims dims, std::vector<BestApproxEntry> entries) {
    BestApproxSequence s;
    s.dims = dims;
    s.entries = std::move(entries);
    if (!s.entries.empty()) s.t_max = s.entries.back().M;
    s.check_invariants();
    return s;
  }
};

namespace detail {

// Sign normalization: flip so the first nonzero coordinate is positive.
inline void sign_normalize(IntVec& q) {
  for (const auto& x : q) {
    if (x > 0) return;
    if (x < 0) {
      for (auto& y : q) y = -y;
      return;
    }
  }
}

// Visit every q in Z^n with ||q|| = M and first nonzero coordinate positive.
// Each shell point is produced exactly once: p runs over the first index
// where |q_p| = M, coordinates before p range over (-M, M), after p over
// [-M, M].
template <class F>
void for_each_shell_point(int n, long M, F&& visit) {
  IntVec q(n);
  std::vector<long> v(n);
  for (int p = 0; p < n; ++p) {
    for (long s : {M, -M}) {
      v.assign(n, 0);
      for (int i = 0; i < p; ++i) v[i] = -(M - 1);
      for (int i = p + 1; i < n; ++i) v[i] = -M;
      v[p] = s;
      while (true) {
        int firstnz = -1;
        for (int i = 0; i < n; ++i)
          if (v[i] != 0) { firstnz = i; break; }
        if (firstnz >= 0 && v[firstnz] > 0) {
          for (int i = 0; i < n; ++i) q[i] = v[i];
          visit(q, v);
        }
        // odometer skipping position p
        int i = n - 1;
        while (i >= 0) {
          if (i == p) { --i; continue; }
          long hi = (i < p) ? M - 1 : M;
          if (v[i] == hi) {
            v[i] = -hi;
            --i;
          } else {
            ++v[i];
            break;
          }
        }
        if (i < 0) break;
      }
      if (M == 0) break;  // avoid double visit of the origin shell
    }
  }
}

struct RationalFastPath {
  // A_ij = num[i][j] / den with 0 <= num < den, valid when magnitudes fit.
  std::vector<std::vector<int64_t>> num;
  int64_t den = 1;

  static std::optional<RationalFastPath> make(const Mat& A, long t_max) {
    RationalFastPath fp;
    mpz_class den = 1;
    for (size_t i = 0; i < A.rows(); ++i)
      for (size_t j = 0; j < A.cols(); ++j) {
        if (!A(i, j).is_rational()) return std::nullopt;
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), A(i, j).rat().get_den().get_mpz_t());
      }
    if (!den.fits_slong_p()) return std::nullopt;
    fp.den = den.get_si();
    if (fp.den > (1L << 30)) return std::nullopt;
    // overflow guard: n * den * t_max must fit comfortably in int64
    if (static_cast<double>(fp.den) * static_cast<double>(t_max) *
            static_cast<double>(A.cols() + 1) > 9e17)
      return std::nullopt;
    fp.num.assign(A.rows(), std::vector<int64_t>(A.cols()));
    for (size_t i = 0; i < A.rows(); ++i)
      for (size_t j = 0; j < A.cols(); ++j) {
        mpz_class v = A(i, j).rat().get_num() * (den / A(i, j).rat().get_den());
        mpz_class r = v % den;
        if (r < 0) r += den;
        fp.num[i][j] = r.get_si();
      }
    return fp;
  }

  // numerator of <Aq> over the common denominator (value = res/den)
  int64_t dist_numerator(const std::vector<long>& q) const {
    int64_t worst = 0;
    for (const auto& row : num) {
      int64_t s = 0;
      for (size_t j = 0; j < row.size(); ++j) s += row[j] * q[j];
      int64_t r = s % den;
      if (r < 0) r += den;
      int64_t d = std::min(r, den - r);
      worst = std::max(worst, d);
    }
    return worst;
  }
};

}  // namespace detail

// One sweep to t_max producing every jump (M_l, zeta_l, witness).
// The rational-dependence flag terminates the sweep at the offending shell.
// max_entries > 0 stops the sweep once that many jumps are recorded.
inline BestApproxSequence best_approx_sequence(const Mat& A, const mpz_class& t_max,
                                               const Dims& dims, size_t max_entries = 0) {
  if (A.rows() != static_cast<size_t>(dims.m) || A.cols() != static_cast<size_t>(dims.n))
    throw scalar_error("matrix shape does not match dims");
  if (t_max < 1) throw scalar_error("t_max must be >= 1");
  if (!t_max.fits_slong_p()) throw scalar_error("t_max too large to enumerate");
  long T = t_max.get_si();

  BestApproxSequence seq;
  seq.dims = dims;
  seq.A = A;
  seq.t_max = t_max;

  auto fast = detail::RationalFastPath::make(A, T);

  if (!fast && dims.n == 1) {
    // single-column incremental sweep: residues advance by frac(A_i) per step
    Vec step(dims.m), res(dims.m);
    for (int i = 0; i < dims.m; ++i) {
      auto f = A(i, 0).floor();
      if (!f) throw scalar_error("residue floor ambiguous; raise precision");
      step[i] = A(i, 0) - Scalar(mpq_class(*f));
      res[i] = Scalar(0);
    }
    bool have = false;
    Scalar run_min(0);
    for (long M = 1; M <= T; ++M) {
      Scalar dist(0);
      for (int i = 0; i < dims.m; ++i) {
        res[i] += step[i];
        if (Scalar::compare_or_mid(res[i], Scalar(1)) >= 0) res[i] -= Scalar(1);
        Scalar di = Scalar::compare_or_mid(res[i], Scalar(mpq_class(1, 2))) <= 0
                        ? res[i]
                        : Scalar(1) - res[i];
        if (Scalar::compare_or_mid(di, dist) > 0) dist = di;
      }
      if (!have || Scalar::compare_or_mid(dist, run_min) < 0) {
        seq.entries.push_back({mpz_class(M), dist, IntVec{mpz_class(M)}});
        run_min = dist;
        have = true;
        if (dist.is_exact() && dist.sign() == 0) {
          seq.rational_dependence_hit = true;
          break;
        }
        if (max_entries && seq.entries.size() >= max_entries) break;
      }
    }
    seq.check_invariants();
    return seq;
  }

  bool have_min = false;
  Scalar run_min(0);
  int64_t run_min_num = 0;  // fast path twin of run_min

  for (long M = 1; M <= T; ++M) {
    bool shell_improved = false;
    Scalar shell_val(0);
    int64_t shell_num = 0;
    IntVec shell_wit;

    detail::for_each_shell_point(dims.n, M, [&](const IntVec& q, const std::vector<long>& raw) {
      if (fast) {
        int64_t dnum = fast->dist_numerator(raw);
        if (have_min && !shell_improved && dnum >= run_min_num) return;
        if (!shell_improved || dnum < shell_num) {
          shell_num = dnum;
          shell_wit = q;
          shell_improved = true;
        } else if (dnum == shell_num && q < shell_wit) {
          shell_wit = q;
        }
        return;
      }
      Vec img(dims.m, Scalar(0));
      for (int i = 0; i < dims.m; ++i)
        for (int j = 0; j < dims.n; ++j)
          if (raw[j] != 0) img[i] += A(i, j) * Scalar(mpq_class(raw[j]));
      Scalar dist = torus_distance(img);
      if (have_min && !shell_improved &&
          Scalar::compare_or_mid(dist, run_min) >= 0)
        return;
      if (!shell_improved || Scalar::compare_or_mid(dist, shell_val) < 0) {
        shell_val = dist;
        shell_wit = q;
        shell_improved = true;
      } else if (Scalar::compare_or_mid(dist, shell_val) == 0 && q < shell_wit) {
        shell_wit = q;
      }
    });

    if (!shell_improved) continue;
    if (fast) shell_val = Scalar(mpq_class(shell_num, fast->den));
    bool is_jump = !have_min || Scalar::compare_or_mid(shell_val, run_min) < 0;
    if (fast && have_min) is_jump = shell_num < run_min_num;
    if (is_jump) {
      seq.entries.push_back({mpz_class(M), shell_val, shell_wit});
      run_min = shell_val;
      run_min_num = shell_num;
      have_min = true;
      if (shell_val.is_exact() && shell_val.sign() == 0) {
        seq.rational_dependence_hit = true;
        break;
      }
      if (max_entries && seq.entries.size() >= max_entries) break;
    }
  }
  seq.check_invariants();
  return seq;
}

// Psi_A(t) with its witness; exact minimum over 0 < ||q|| <= floor(t).
inline PsiResult psi(const Mat& A, const Scalar& t, const Dims& dims) {
  auto ft = t.floor();
  if (!ft || *ft < 1) throw scalar_error("psi requires t >= 1");
  BestApproxSequence seq = best_approx_sequence(A, *ft, dims);
  PsiResult r;
  r.value = seq.entries.back().zeta;
  r.rational_dependence = seq.rational_dependence_hit;
  // lexicographically smallest among all minimizers up to t
  r.witness = seq.entries.back().witness;
  long T = ft->get_si();
  auto fast = detail::RationalFastPath::make(A, T);
  for (long M = 1; M <= T; ++M) {
    detail::for_each_shell_point(dims.n, M, [&](const IntVec& q, const std::vector<long>& raw) {
      if (!(q < r.witness)) return;
      Scalar dist;
      if (fast)
        dist = Scalar(mpq_class(fast->dist_numerator(raw), fast->den));
      else {
        Vec img(dims.m, Scalar(0));
        for (int i = 0; i < dims.m; ++i)
          for (int j = 0; j < dims.n; ++j)
            if (raw[j] != 0) img[i] += A(i, j) * Scalar(mpq_class(raw[j]));
        dist = torus_distance(img);
      }
      if (Scalar::compare_or_mid(dist, r.value) == 0) r.witness = q;
    });
  }
  return r;
}

// ---------------------------------------------------------------------------
// Exponential growth audit: M_{l + 3^d + 1} >= 2 M_l is a theorem, so any
// violation on a computed sequence points at an enumeration bug.

struct GrowthReport {
  bool inconclusive = false;   // sequence too short
  long offset = 0;             // 3^d + 1
  size_t checked = 0;
  std::vector<size_t> violations;  // indices l (0-based) failing the bound
  bool passed() const { return !inconclusive && violations.empty(); }
};

inline GrowthReport growth_audit(const BestApproxSequence& seq) {
  GrowthReport r;
  long off = 1;
  for (int i = 0; i < seq.dims.d(); ++i) off *= 3;
  off += 1;
  r.offset = off;
  if (seq.entries.size() < static_cast<size_t>(off) + 1) {
    r.inconclusive = true;
    return r;
  }
  for (size_t l = 0; l + static_cast<size_t>(off) < seq.entries.size(); ++l) {
    ++r.checked;
    if (seq.entries[l + off].M < 2 * seq.entries[l].M) r.violations.push_back(l);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Class-C diagnostic. All verdicts are finite-horizon trends, never proofs.

struct ClassCReport {
  std::vector<size_t> subsequence;   // 0-based indices l_k into entries
  std::vector<Scalar> partial_sums;  // cumulative sum of Delta_{l_k}^{d-1}
  std::vector<Scalar> H;             // finite-horizon sup, one per k with a tail
  bool finite_horizon_sup = true;
  bool sums_divergent_trend = false;
  bool sums_convergent_trend = false;
  bool h_decreasing_trend = false;
  enum class Verdict { consistent_with_C, condition1_failing, condition2_failing, inconclusive };
  Verdict verdict = Verdict::inconclusive;

  static const char* verdict_name(Verdict v) {
    switch (v) {
      case Verdict::consistent_with_C: return "consistent-with-C";
      case Verdict::condition1_failing: return "condition-1-failing";
      case Verdict::condition2_failing: return "condition-2-failing";
      default: return "inconclusive";
    }
  }
};

// Greedy peaks of Delta_l inside dyadic windows of M_{l+1}, thinned so that
// consecutive picks satisfy M_{l_{k+1}+1} / M_{l_k+1} >= 2.
inline std::vector<size_t> auto_subsequence(const BestApproxSequence& seq) {
  std::vector<size_t> out;
  if (seq.entries.size() < 2) return out;
  size_t lmax = seq.entries.size() - 2;  // need Delta_l
  std::optional<size_t> window_best;
  mpz_class window_hi = 2 * seq.entries[1].M;
  auto flush = [&]() {
    if (!window_best) return;
    if (out.empty() ||
        seq.entries[*window_best + 1].M >= 2 * seq.entries[out.back() + 1].M)
      out.push_back(*window_best);
    window_best.reset();
  };
  for (size_t l = 0; l <= lmax; ++l) {
    const mpz_class& Mnext = seq.entries[l + 1].M;
    while (Mnext >= window_hi) {
      flush();
      window_hi *= 2;
    }
    if (!window_best ||
        Scalar::compare_or_mid(seq.delta(l), seq.delta(*window_best)) > 0)
      window_best = l;
  }
  flush();
  return out;
}

inline ClassCReport class_c_test(const BestApproxSequence& seq,
                                 std::vector<size_t> subsequence = {}) {
  ClassCReport rep;
  if (subsequence.empty()) subsequence = auto_subsequence(seq);
  if (subsequence.empty()) throw scalar_error("class_c_test: empty subsequence");
  for (size_t k = 0; k < subsequence.size(); ++k) {
    if (subsequence[k] + 1 >= seq.entries.size())
      throw scalar_error("class_c_test: subsequence index out of range");
    if (k > 0 && subsequence[k] <= subsequence[k - 1])
      throw scalar_error("class_c_test: subsequence must be increasing");
  }
  rep.subsequence = subsequence;
  size_t K = subsequence.size();
  long dm1 = seq.dims.d() - 1;

  Scalar acc(0);
  for (size_t k = 0; k < K; ++k) {
    acc += seq.delta(subsequence[k]).pow_int(dm1);
    rep.partial_sums.push_back(acc);
  }

  // H_k = (M_{l_k + 1} / Delta_{l_k})^n * sup_{k1 > k} (zeta_{l_k1} / Delta_{l_k1})^m
  std::vector<Scalar> tail_term(K, Scalar(0));
  for (size_t k = 0; k < K; ++k) {
    size_t l = subsequence[k];
    tail_term[k] =
        (seq.entries[l].zeta / seq.delta(l)).pow_int(seq.dims.m);
  }
  std::vector<Scalar> tail_sup(K, Scalar(0));
  for (size_t k = K; k-- > 0;) {
    tail_sup[k] = tail_term[k];
    if (k + 1 < K && Scalar::compare_or_mid(tail_sup[k + 1], tail_sup[k]) > 0)
      tail_sup[k] = tail_sup[k + 1];
  }
  for (size_t k = 0; k + 1 < K; ++k) {
    size_t l = subsequence[k];
    Scalar head = (Scalar(mpq_class(seq.entries[l + 1].M)) / seq.delta(l)).pow_int(seq.dims.n);
    rep.H.push_back(head * tail_sup[k + 1]);
  }

  // Trends. Divergence proxy: a series sum a_k with k*a_k bounded away from 0
  // looks divergent; k*a_k -> 0 quickly looks convergent.
  if (K >= 4) {
    auto median_weighted = [&](size_t lo, size_t hi) {
      std::vector<Scalar> v;
      for (size_t k = lo; k < hi; ++k)
        v.push_back(Scalar(static_cast<long>(k + 1)) *
                    seq.delta(subsequence[k]).pow_int(dm1));
      std::sort(v.begin(), v.end(),
                [](const Scalar& a, const Scalar& b) { return Scalar::compare_or_mid(a, b) < 0; });
      return v[v.size() / 2];
    };
    Scalar first = median_weighted(0, K / 2), last = median_weighted(K / 2, K);
    if (first.sign() == 0) {
      rep.sums_convergent_trend = true;
    } else {
      Scalar ratio = last / first;
      rep.sums_divergent_trend = Scalar::compare_or_mid(ratio, Scalar(mpq_class(3, 5))) >= 0;
      rep.sums_convergent_trend = Scalar::compare_or_mid(ratio, Scalar(mpq_class(9, 20))) <= 0;
    }
  }
  if (rep.H.size() >= 2) {
    bool nonincreasing = true;
    for (size_t k = 0; k + 1 < rep.H.size(); ++k)
      if (Scalar::compare_or_mid(rep.H[k + 1], rep.H[k]) > 0) nonincreasing = false;
    Scalar halved = rep.H.front() * Scalar(mpq_class(1, 2));
    rep.h_decreasing_trend =
        nonincreasing && Scalar::compare_or_mid(rep.H.back(), halved) <= 0;
  }

  using V = ClassCReport::Verdict;
  if (rep.sums_convergent_trend)
    rep.verdict = V::condition1_failing;
  else if (!rep.H.empty() && !rep.h_decreasing_trend && rep.sums_divergent_trend)
    rep.verdict = V::condition2_failing;
  else if (rep.sums_divergent_trend && rep.h_decreasing_trend)
    rep.verdict = V::consistent_with_C;
  else
    rep.verdict = V::inconclusive;
  return rep;
}

}  // namespace gonlab
