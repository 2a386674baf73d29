#pragma once

// Exact and validated scalar arithmetic.
//
// A Scalar is one of
//   * rational   -- arbitrary-precision fraction (GMP),
//   * quadratic  -- a + b*sqrt(D) with rational a, b and squarefree D > 1,
//   * bigreal    -- a floating interval [lo, hi] (MPFR) whose endpoints are
//                   rounded outward, so the true value is always enclosed.
//
// Arithmetic between exact kinds stays exact as long as the result lives in
// a single quadratic extension; anything else promotes to bigreal.  The
// interval endpoints only ever widen, never shrink.

#include <gmpxx.h>
#include <mpfr.h>

#include <atomic>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

namespace gonlab {

class scalar_error : public std::runtime_error {
 public:
  explicit scalar_error(const std::string& what) : std::runtime_error(what) {}
};

inline std::atomic<mpfr_prec_t>& default_precision_slot() {
  static std::atomic<mpfr_prec_t> prec{256};
  return prec;
}
inline mpfr_prec_t default_precision() { return default_precision_slot().load(); }
inline void set_default_precision(mpfr_prec_t p) {
  if (p < 16 || p > 1 << 20) throw scalar_error("precision out of range");
  default_precision_slot().store(p);
}

// ---------------------------------------------------------------------------
// BigFloat: RAII around mpfr_t.

class BigFloat {
 public:
  BigFloat() { mpfr_init2(x_, default_precision()); mpfr_set_zero(x_, 1); }
  explicit BigFloat(mpfr_prec_t prec) { mpfr_init2(x_, prec); mpfr_set_zero(x_, 1); }
  BigFloat(const BigFloat& o) { mpfr_init2(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(x_, 16);
    mpfr_swap(x_, o.x_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) { mpfr_set_prec(x_, mpfr_get_prec(o.x_)); mpfr_set(x_, o.x_, MPFR_RNDN); }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    if (this != &o) mpfr_swap(x_, o.x_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(x_); }

  mpfr_ptr raw() { return x_; }
  mpfr_srcptr raw() const { return x_; }

 private:
  mpfr_t x_;
};

// ---------------------------------------------------------------------------
// Interval: [lo, hi] with outward rounding.

class Interval {
 public:
  Interval() : lo_(default_precision()), hi_(default_precision()) {}

  static Interval from_mpq(const mpq_class& q) {
    Interval r;
    mpfr_set_q(r.lo_.raw(), q.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi_.raw(), q.get_mpq_t(), MPFR_RNDU);
    return r;
  }
  static Interval from_long(long v) {
    Interval r;
    mpfr_set_si(r.lo_.raw(), v, MPFR_RNDD);
    mpfr_set_si(r.hi_.raw(), v, MPFR_RNDU);
    return r;
  }
  // Parse a decimal literal; the interval is one ulp wide unless exact.
  static Interval from_decimal(const std::string& s) {
    Interval r;
    if (mpfr_set_str(r.lo_.raw(), s.c_str(), 10, MPFR_RNDD) != 0 &&
        mpfr_nan_p(r.lo_.raw()))
      throw scalar_error("bad decimal literal: " + s);
    if (mpfr_set_str(r.hi_.raw(), s.c_str(), 10, MPFR_RNDU) != 0 &&
        mpfr_nan_p(r.hi_.raw()))
      throw scalar_error("bad decimal literal: " + s);
    return r;
  }
  static Interval sqrt_ui(unsigned long d) {
    Interval r;
    mpfr_sqrt_ui(r.lo_.raw(), d, MPFR_RNDD);
    mpfr_sqrt_ui(r.hi_.raw(), d, MPFR_RNDU);
    return r;
  }
  static Interval pi() {
    Interval r;
    mpfr_const_pi(r.lo_.raw(), MPFR_RNDD);
    mpfr_const_pi(r.hi_.raw(), MPFR_RNDU);
    return r;
  }

  const BigFloat& lo() const { return lo_; }
  const BigFloat& hi() const { return hi_; }

  bool contains_zero() const {
    return mpfr_sgn(lo_.raw()) <= 0 && mpfr_sgn(hi_.raw()) >= 0;
  }
  // -1, 0 (straddles), +1
  int sign_class() const {
    if (mpfr_sgn(lo_.raw()) > 0) return 1;
    if (mpfr_sgn(hi_.raw()) < 0) return -1;
    return 0;
  }
  bool is_point() const { return mpfr_equal_p(lo_.raw(), hi_.raw()); }

  double mid_d() const {
    BigFloat m = mid();
    return mpfr_get_d(m.raw(), MPFR_RNDN);
  }
  BigFloat mid() const {
    BigFloat m(mpfr_get_prec(lo_.raw()));
    mpfr_add(m.raw(), lo_.raw(), hi_.raw(), MPFR_RNDN);
    mpfr_div_2ui(m.raw(), m.raw(), 1, MPFR_RNDN);
    return m;
  }
  // Upper bound on the half-width; this is the error radius.
  mpq_class radius_q() const {
    BigFloat w(mpfr_get_prec(lo_.raw()) + 8);
    mpfr_sub(w.raw(), hi_.raw(), lo_.raw(), MPFR_RNDU);
    mpfr_div_2ui(w.raw(), w.raw(), 1, MPFR_RNDU);
    if (mpfr_sgn(w.raw()) < 0) mpfr_set_zero(w.raw(), 1);
    mpq_class r;
    mpfr_get_q(r.get_mpq_t(), w.raw());
    return r;
  }
  mpq_class lo_q() const { mpq_class r; mpfr_get_q(r.get_mpq_t(), lo_.raw()); return r; }
  mpq_class hi_q() const { mpq_class r; mpfr_get_q(r.get_mpq_t(), hi_.raw()); return r; }

  friend Interval operator+(const Interval& a, const Interval& b) {
    Interval r;
    mpfr_add(r.lo_.raw(), a.lo_.raw(), b.lo_.raw(), MPFR_RNDD);
    mpfr_add(r.hi_.raw(), a.hi_.raw(), b.hi_.raw(), MPFR_RNDU);
    return r;
  }
  friend Interval operator-(const Interval& a, const Interval& b) {
    Interval r;
    mpfr_sub(r.lo_.raw(), a.lo_.raw(), b.hi_.raw(), MPFR_RNDD);
    mpfr_sub(r.hi_.raw(), a.hi_.raw(), b.lo_.raw(), MPFR_RNDU);
    return r;
  }
  friend Interval operator-(const Interval& a) {
    Interval r;
    mpfr_neg(r.lo_.raw(), a.hi_.raw(), MPFR_RNDD);
    mpfr_neg(r.hi_.raw(), a.lo_.raw(), MPFR_RNDU);
    return r;
  }
  friend Interval operator*(const Interval& a, const Interval& b) {
    Interval r;
    BigFloat t(default_precision());
    // lo = min of the four products rounded down
    bool first = true;
    auto consider = [&](mpfr_srcptr x, mpfr_srcptr y, mpfr_rnd_t rnd, BigFloat& acc,
                        bool take_min) {
      mpfr_mul(t.raw(), x, y, rnd);
      if (first) { mpfr_set(acc.raw(), t.raw(), rnd); return; }
      if (take_min ? mpfr_less_p(t.raw(), acc.raw()) : mpfr_greater_p(t.raw(), acc.raw()))
        mpfr_set(acc.raw(), t.raw(), rnd);
    };
    for (mpfr_srcptr x : {a.lo_.raw(), a.hi_.raw()})
      for (mpfr_srcptr y : {b.lo_.raw(), b.hi_.raw()}) {
        consider(x, y, MPFR_RNDD, r.lo_, true);
        first = false;
      }
    first = true;
    for (mpfr_srcptr x : {a.lo_.raw(), a.hi_.raw()})
      for (mpfr_srcptr y : {b.lo_.raw(), b.hi_.raw()}) {
        consider(x, y, MPFR_RNDU, r.hi_, false);
        first = false;
      }
    return r;
  }
  friend Interval operator/(const Interval& a, const Interval& b) {
    if (b.contains_zero()) throw scalar_error("interval division by interval containing zero");
    return a * b.inverse();
  }
  Interval inverse() const {
    if (contains_zero()) throw scalar_error("interval inverse of interval containing zero");
    Interval r;
    mpfr_ui_div(r.lo_.raw(), 1, hi_.raw(), MPFR_RNDD);
    mpfr_ui_div(r.hi_.raw(), 1, lo_.raw(), MPFR_RNDU);
    return r;
  }
  Interval abs() const {
    Interval r;
    if (mpfr_sgn(lo_.raw()) >= 0) return *this;
    if (mpfr_sgn(hi_.raw()) <= 0) return -*this;
    // straddles zero
    mpfr_set_zero(r.lo_.raw(), 1);
    BigFloat n(default_precision());
    mpfr_neg(n.raw(), lo_.raw(), MPFR_RNDU);
    if (mpfr_greater_p(n.raw(), hi_.raw()))
      mpfr_set(r.hi_.raw(), n.raw(), MPFR_RNDU);
    else
      mpfr_set(r.hi_.raw(), hi_.raw(), MPFR_RNDU);
    return r;
  }
  // Nonnegative square root; a slightly negative lower endpoint is clamped.
  Interval sqrt() const {
    if (mpfr_sgn(hi_.raw()) < 0) throw scalar_error("sqrt of negative interval");
    Interval r;
    if (mpfr_sgn(lo_.raw()) <= 0)
      mpfr_set_zero(r.lo_.raw(), 1);
    else
      mpfr_sqrt(r.lo_.raw(), lo_.raw(), MPFR_RNDD);
    mpfr_sqrt(r.hi_.raw(), hi_.raw(), MPFR_RNDU);
    return r;
  }
  Interval rootn(unsigned long n) const {
    if (mpfr_sgn(lo_.raw()) < 0) throw scalar_error("rootn of negative interval");
    Interval r;
    mpfr_rootn_ui(r.lo_.raw(), lo_.raw(), n, MPFR_RNDD);
    mpfr_rootn_ui(r.hi_.raw(), hi_.raw(), n, MPFR_RNDU);
    return r;
  }
  Interval exp() const {
    Interval r;
    mpfr_exp(r.lo_.raw(), lo_.raw(), MPFR_RNDD);
    mpfr_exp(r.hi_.raw(), hi_.raw(), MPFR_RNDU);
    return r;
  }
  Interval log() const {
    if (mpfr_sgn(lo_.raw()) <= 0) throw scalar_error("log of non-positive interval");
    Interval r;
    mpfr_log(r.lo_.raw(), lo_.raw(), MPFR_RNDD);
    mpfr_log(r.hi_.raw(), hi_.raw(), MPFR_RNDU);
    return r;
  }
  // sin/cos by Lipschitz enclosure around the midpoint (|f'| <= 1).
  Interval sin() const { return lipschitz1_(mpfr_sin); }
  Interval cos() const { return lipschitz1_(mpfr_cos); }

  Interval pow_int(long e) const {
    if (e == 0) return from_long(1);
    Interval base = *this;
    bool inv = e < 0;
    unsigned long k = inv ? static_cast<unsigned long>(-(e + 1)) + 1 : static_cast<unsigned long>(e);
    Interval acc = from_long(1);
    while (k) {
      if (k & 1) acc = acc * base;
      base = base * base;
      k >>= 1;
    }
    return inv ? acc.inverse() : acc;
  }

  // floor is certain only when both endpoints floor to the same integer.
  std::optional<mpz_class> floor_certain() const {
    mpz_class fl, fh;
    mpfr_get_z(fl.get_mpz_t(), lo_.raw(), MPFR_RNDD);
    mpfr_get_z(fh.get_mpz_t(), hi_.raw(), MPFR_RNDD);
    if (fl == fh) return fl;
    return std::nullopt;
  }

  // Certain comparison; nullopt when the intervals overlap.
  static std::optional<int> compare(const Interval& a, const Interval& b) {
    if (mpfr_less_p(a.hi_.raw(), b.lo_.raw())) return -1;
    if (mpfr_greater_p(a.lo_.raw(), b.hi_.raw())) return 1;
    if (a.is_point() && b.is_point() && mpfr_equal_p(a.lo_.raw(), b.lo_.raw())) return 0;
    return std::nullopt;
  }

  std::string to_decimal(int digits) const {
    BigFloat m = mid();
    char fmt[32];
    std::snprintf(fmt, sizeof fmt, "%%.%dRf", digits);
    char* s = nullptr;
    if (mpfr_asprintf(&s, fmt, m.raw()) < 0) throw scalar_error("mpfr_asprintf failed");
    std::string out(s);
    mpfr_free_str(s);
    return out;
  }

 private:
  Interval lipschitz1_(int (*fn)(mpfr_ptr, mpfr_srcptr, mpfr_rnd_t)) const {
    BigFloat m = mid();
    BigFloat rad(default_precision());
    mpfr_sub(rad.raw(), hi_.raw(), lo_.raw(), MPFR_RNDU);
    mpfr_div_2ui(rad.raw(), rad.raw(), 1, MPFR_RNDU);
    Interval r;
    fn(r.lo_.raw(), m.raw(), MPFR_RNDD);
    fn(r.hi_.raw(), m.raw(), MPFR_RNDU);
    mpfr_sub(r.lo_.raw(), r.lo_.raw(), rad.raw(), MPFR_RNDD);
    mpfr_add(r.hi_.raw(), r.hi_.raw(), rad.raw(), MPFR_RNDU);
    // pad one ulp each side for the midpoint evaluation itself
    mpfr_nextbelow(r.lo_.raw());
    mpfr_nextabove(r.hi_.raw());
    return r;
  }

  BigFloat lo_, hi_;
};

namespace detail {

// Extract the square part: d = s^2 * f with f squarefree. Trial division.
inline void squarefree_split(unsigned long d, unsigned long& s, unsigned long& f) {
  s = 1;
  f = 1;
  for (unsigned long p = 2; p * p <= d; ++p) {
    unsigned long e = 0;
    while (d % p == 0) { d /= p; ++e; }
    for (unsigned long i = 0; i + 1 < e; i += 2) s *= p;
    if (e & 1) f *= p;
  }
  f *= d;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scalar

class Scalar {
 public:
  struct Quadratic {
    mpq_class a, b;      // value = a + b*sqrt(d), b != 0
    unsigned long d;     // squarefree, > 1
  };

  Scalar() : v_(mpq_class(0)) {}
  Scalar(int v) : v_(mpq_class(v)) {}
  Scalar(long v) : v_(mpq_class(static_cast<signed long>(v))) {}
  Scalar(const mpz_class& v) : v_(mpq_class(v)) {}
  Scalar(const mpq_class& v) : v_(v) { canon_rat_(); }
  Scalar(const Interval& v) : v_(v) {}

  static Scalar rational(const mpq_class& q) { return Scalar(q); }
  static Scalar rational(long num, long den) {
    if (den == 0) throw scalar_error("zero denominator");
    mpq_class q(num, den);
    q.canonicalize();
    return Scalar(q);
  }
  // a + b*sqrt(d); d is reduced to its squarefree part.
  static Scalar quadratic(const mpq_class& a, const mpq_class& b, unsigned long d) {
    if (d < 1) throw scalar_error("quadratic radicand must be positive");
    unsigned long s, f;
    detail::squarefree_split(d, s, f);
    mpq_class bb = b * static_cast<long>(s);
    if (f <= 1) return Scalar(mpq_class(a + bb));  // d was a perfect square
    if (bb == 0) return Scalar(a);
    Scalar r;
    r.v_ = Quadratic{a, bb, f};
    return r;
  }
  static Scalar sqrt_of_ui(unsigned long d) { return quadratic(0, 1, d); }
  static Scalar bigreal(const Interval& iv) { return Scalar(iv); }

  bool is_rational() const { return std::holds_alternative<mpq_class>(v_); }
  bool is_quadratic() const { return std::holds_alternative<Quadratic>(v_); }
  bool is_bigreal() const { return std::holds_alternative<Interval>(v_); }
  bool is_exact() const { return !is_bigreal(); }

  const mpq_class& rat() const { return std::get<mpq_class>(v_); }
  const Quadratic& quad() const { return std::get<Quadratic>(v_); }
  const Interval& big() const { return std::get<Interval>(v_); }

  bool is_zero() const {
    if (is_rational()) return rat() == 0;
    if (is_quadratic()) return false;  // b != 0 by canonicalization
    return big().is_point() && big().sign_class() == 0 && big().contains_zero() &&
           mpfr_zero_p(big().lo().raw());
  }

  // Exact sign for exact kinds; for bigreal, 0 means "straddles or zero".
  int sign() const {
    if (is_rational()) return sgn(rat());
    if (is_quadratic()) {
      const Quadratic& q = quad();
      // sign of a + b*sqrt(d)
      int sa = sgn(q.a), sb = sgn(q.b);
      if (sa == 0) return sb;
      if (sb == 0 || sa == sb) return sa;
      // opposite signs: compare a^2 vs b^2 d
      mpq_class lhs = q.a * q.a, rhs = q.b * q.b * static_cast<long>(q.d);
      int c = cmp(lhs, rhs);
      if (c == 0) return 0;  // cannot happen for squarefree d>1 and b!=0 unless a=b=0
      return (c > 0) ? sa : sb;
    }
    return big().sign_class();
  }

  Interval to_interval() const {
    if (is_rational()) return Interval::from_mpq(rat());
    if (is_quadratic()) {
      const Quadratic& q = quad();
      return Interval::from_mpq(q.a) + Interval::from_mpq(q.b) * Interval::sqrt_ui(q.d);
    }
    return big();
  }

  double to_double() const { return to_interval().mid_d(); }
  mpq_class error_radius() const {
    if (is_exact()) return 0;
    return big().radius_q();
  }

  friend Scalar operator+(const Scalar& x, const Scalar& y) { return binop_(x, y, Add{}); }
  friend Scalar operator-(const Scalar& x, const Scalar& y) { return binop_(x, y, Sub{}); }
  friend Scalar operator*(const Scalar& x, const Scalar& y) { return binop_(x, y, Mul{}); }
  friend Scalar operator/(const Scalar& x, const Scalar& y) {
    if (y.is_exact() && y.sign() == 0) throw scalar_error("division by zero");
    return binop_(x, y, Div{});
  }
  friend Scalar operator-(const Scalar& x) {
    if (x.is_rational()) return Scalar(mpq_class(-x.rat()));
    if (x.is_quadratic()) {
      Scalar r;
      r.v_ = Quadratic{-x.quad().a, -x.quad().b, x.quad().d};
      return r;
    }
    return Scalar(-x.big());
  }
  Scalar& operator+=(const Scalar& y) { *this = *this + y; return *this; }
  Scalar& operator-=(const Scalar& y) { *this = *this - y; return *this; }
  Scalar& operator*=(const Scalar& y) { *this = *this * y; return *this; }
  Scalar& operator/=(const Scalar& y) { *this = *this / y; return *this; }

  Scalar abs() const { return sign_or_mid_() < 0 ? -*this : *this; }

  Scalar pow_int(long e) const {
    if (e == 0) return Scalar(1);
    if (is_bigreal()) return Scalar(big().pow_int(e));
    Scalar base = *this;
    bool inv = e < 0;
    unsigned long k = inv ? static_cast<unsigned long>(-(e + 1)) + 1 : static_cast<unsigned long>(e);
    Scalar acc(1);
    while (k) {
      if (k & 1) acc = acc * base;
      base = base * base;
      k >>= 1;
    }
    return inv ? Scalar(1) / acc : acc;
  }

  // sqrt: exact for nonnegative rationals (as a quadratic), interval otherwise.
  Scalar sqrt() const {
    if (is_rational()) {
      const mpq_class& q = rat();
      if (q < 0) throw scalar_error("sqrt of negative scalar");
      if (q == 0) return Scalar(0);
      // sqrt(p/q) = sqrt(p*q)/q
      mpz_class pq = q.get_num() * q.get_den();
      unsigned long s, f;
      if (pq.fits_ulong_p()) {
        detail::squarefree_split(pq.get_ui(), s, f);
        mpq_class coeff(static_cast<long>(s), 1);
        coeff /= q.get_den();
        if (f == 1) return Scalar(coeff);
        return quadratic(0, coeff, f);
      }
      mpz_class root, rem;
      mpz_sqrtrem(root.get_mpz_t(), rem.get_mpz_t(), pq.get_mpz_t());
      if (rem == 0) return Scalar(mpq_class(root) / q.get_den());
    }
    return Scalar(to_interval().sqrt());
  }
  Scalar rootn(unsigned long n) const {
    if (n == 0) throw scalar_error("0th root");
    if (n == 1) return *this;
    if (n == 2) return sqrt();
    if (is_rational()) {
      const mpq_class& q = rat();
      if (q < 0) throw scalar_error("rootn of negative scalar");
      mpz_class rn, rd;
      if (mpz_root(rn.get_mpz_t(), q.get_num().get_mpz_t(), n) &&
          mpz_root(rd.get_mpz_t(), q.get_den().get_mpz_t(), n))
        return Scalar(mpq_class(rn) / mpq_class(rd));
    }
    return Scalar(to_interval().rootn(n));
  }
  Scalar exp() const {
    if (is_rational() && rat() == 0) return Scalar(1);
    return Scalar(to_interval().exp());
  }
  Scalar log() const {
    if (is_rational() && rat() == 1) return Scalar(0);
    return Scalar(to_interval().log());
  }

  // Exact floor for exact kinds; for bigreal only when unambiguous.
  std::optional<mpz_class> floor() const {
    if (is_rational()) {
      mpz_class f;
      mpz_fdiv_q(f.get_mpz_t(), rat().get_num().get_mpz_t(), rat().get_den().get_mpz_t());
      return f;
    }
    if (is_quadratic()) {
      // start from an interval estimate, then verify exactly
      auto est = to_interval().floor_certain();
      mpz_class k = est ? *est : mpz_class(0);
      if (!est) {
        // widen search around interval lo
        mpfr_get_z(k.get_mpz_t(), to_interval().lo().raw(), MPFR_RNDD);
      }
      // adjust so that k <= x < k+1 exactly
      while ((*this - Scalar(mpq_class(k))).sign() < 0) k -= 1;
      while ((*this - Scalar(mpq_class(k + 1))).sign() >= 0) k += 1;
      return k;
    }
    return big().floor_certain();
  }

  // Nearest integer, ties toward even not needed here: ties round half up
  // (the callers that care, e.g. torus distance, are symmetric under ties).
  std::optional<mpz_class> round_nearest() const {
    return (*this + Scalar(mpq_class(1, 2))).floor();
  }

  // Distance to the nearest integer, in [0, 1/2]. Exact on exact input.
  Scalar dist_to_integers() const {
    if (is_bigreal()) {
      // min over the two candidate integers around the midpoint
      mpz_class k;
      mpfr_get_z(k.get_mpz_t(), big().mid().raw(), MPFR_RNDN);
      Scalar best = (*this - Scalar(mpq_class(k))).abs();
      for (long off : {-1L, 1L}) {
        Scalar cand = (*this - Scalar(mpq_class(k + off))).abs();
        if (compare_or_mid(cand, best) < 0) best = cand;
      }
      return best;
    }
    mpz_class r = *round_nearest();
    return (*this - Scalar(mpq_class(r))).abs();
  }

  // Exact three-way comparison. Exact kinds compare exactly (including
  // quadratics over distinct radicands); bigreal comparisons are certain
  // only when the intervals separate, otherwise nullopt.
  static std::optional<int> compare(const Scalar& x, const Scalar& y) {
    if (x.is_exact() && y.is_exact()) return exact_compare_(x, y);
    return Interval::compare(x.to_interval(), y.to_interval());
  }
  // Comparison that falls back to interval midpoints when uncertain.
  static int compare_or_mid(const Scalar& x, const Scalar& y) {
    auto c = compare(x, y);
    if (c) return *c;
    Interval a = x.to_interval(), b = y.to_interval();
    BigFloat am = a.mid(), bm = b.mid();
    return mpfr_cmp(am.raw(), bm.raw());
  }

  friend bool operator==(const Scalar& x, const Scalar& y) {
    auto c = compare(x, y);
    return c && *c == 0;
  }
  friend bool operator<(const Scalar& x, const Scalar& y) {
    auto c = compare(x, y);
    return c && *c < 0;
  }
  friend bool operator<=(const Scalar& x, const Scalar& y) {
    auto c = compare(x, y);
    return c && *c <= 0;
  }
  friend bool operator>(const Scalar& x, const Scalar& y) { return y < x; }
  friend bool operator>=(const Scalar& x, const Scalar& y) { return y <= x; }
  friend bool operator!=(const Scalar& x, const Scalar& y) { return !(x == y); }

  // "3/4", "1+2*sqrt(2)", or a decimal rendering for bigreal.
  std::string to_string() const {
    if (is_rational()) return rat().get_str();
    if (is_quadratic()) {
      const Quadratic& q = quad();
      std::string s;
      if (q.a != 0) s += q.a.get_str();
      if (q.b == 1) {
        if (!s.empty()) s += "+";
      } else if (q.b == -1) {
        s += "-";
      } else {
        if (!s.empty() && q.b > 0) s += "+";
        s += q.b.get_str() + "*";
      }
      s += "sqrt(" + std::to_string(q.d) + ")";
      return s;
    }
    return big().to_decimal(24);
  }
  std::string to_decimal(int digits) const { return to_interval().to_decimal(digits); }

 private:
  struct Add { static mpq_class q(const mpq_class& a, const mpq_class& b) { return a + b; }
               static Interval i(const Interval& a, const Interval& b) { return a + b; } };
  struct Sub { static mpq_class q(const mpq_class& a, const mpq_class& b) { return a - b; }
               static Interval i(const Interval& a, const Interval& b) { return a - b; } };
  struct Mul { static mpq_class q(const mpq_class& a, const mpq_class& b) { return a * b; }
               static Interval i(const Interval& a, const Interval& b) { return a * b; } };
  struct Div { static mpq_class q(const mpq_class& a, const mpq_class& b) { return a / b; }
               static Interval i(const Interval& a, const Interval& b) { return a / b; } };

  void canon_rat_() { std::get<mpq_class>(v_).canonicalize(); }

  int sign_or_mid_() const {
    if (is_exact()) return sign();
    int s = big().sign_class();
    if (s != 0) return s;
    return mpfr_sgn(big().mid().raw());
  }

  static Scalar make_quad_(mpq_class a, mpq_class b, unsigned long d) {
    if (b == 0) return Scalar(a);
    Scalar r;
    r.v_ = Quadratic{std::move(a), std::move(b), d};
    return r;
  }

  template <class Op>
  static Scalar binop_(const Scalar& x, const Scalar& y, Op) {
    if (x.is_rational() && y.is_rational()) return Scalar(Op::q(x.rat(), y.rat()));
    if (x.is_exact() && y.is_exact()) {
      // lift both into (a, b, d) with a shared radicand if possible
      mpq_class xa, xb, ya, yb;
      unsigned long xd = 0, yd = 0;
      decompose_(x, xa, xb, xd);
      decompose_(y, ya, yb, yd);
      unsigned long d = xd ? xd : yd;
      if (xd == 0 || yd == 0 || xd == yd) {
        if constexpr (std::is_same_v<Op, Add>) return make_quad_(xa + ya, xb + yb, d);
        if constexpr (std::is_same_v<Op, Sub>) return make_quad_(xa - ya, xb - yb, d);
        if constexpr (std::is_same_v<Op, Mul>)
          return make_quad_(xa * ya + xb * yb * static_cast<long>(d), xa * yb + xb * ya, d);
        if constexpr (std::is_same_v<Op, Div>) {
          // multiply by conjugate of y
          mpq_class den = ya * ya - yb * yb * static_cast<long>(d);
          if (den == 0) throw scalar_error("division by zero");
          mpq_class na = xa * ya - xb * yb * static_cast<long>(d);
          mpq_class nb = xb * ya - xa * yb;
          return make_quad_(na / den, nb / den, d);
        }
      }
      // distinct radicands: pure radical products/quotients stay exact
      if (xa == 0 && ya == 0 && xd != 0 && yd != 0) {
        if constexpr (std::is_same_v<Op, Mul>)
          return quadratic(0, xb * yb, xd * yd);
        if constexpr (std::is_same_v<Op, Div>)
          return quadratic(0, xb / (yb * static_cast<long>(yd)), xd * yd);
      }
      // anything else leaves both fields, promote
    }
    return Scalar(Op::i(x.to_interval(), y.to_interval()));
  }

  static void decompose_(const Scalar& s, mpq_class& a, mpq_class& b, unsigned long& d) {
    if (s.is_rational()) { a = s.rat(); b = 0; d = 0; return; }
    a = s.quad().a;
    b = s.quad().b;
    d = s.quad().d;
  }

  // Exact comparison across kinds, including x in Q(sqrt(D)), y in Q(sqrt(E)).
  static int exact_compare_(const Scalar& x, const Scalar& y) {
    // same field or one side rational: the difference stays exact
    if (x.is_rational() || y.is_rational() ||
        (x.is_quadratic() && y.is_quadratic() && x.quad().d == y.quad().d))
      return (x - y).sign();

    // x = a1 + b1 sqrt(D), y = a2 + b2 sqrt(E), D != E.
    // sign of (b1 sqrt(D) - b2 sqrt(E)) + r with r = a1 - a2 rational:
    const auto& qx = x.quad();
    const auto& qy = y.quad();
    mpq_class r = qx.a - qy.a;
    // u := b1 sqrt(D) - b2 sqrt(E)
    int su;  // sign of u
    {
      int s1 = sgn(qx.b), s2 = sgn(-qy.b);
      if (s1 == 0) su = s2;
      else if (s2 == 0) su = s1;
      else if (s1 == s2) su = s1;
      else {
        mpq_class l = qx.b * qx.b * static_cast<long>(qx.d);
        mpq_class rr = qy.b * qy.b * static_cast<long>(qy.d);
        int c = cmp(l, rr);
        su = (c == 0) ? 0 : (c > 0 ? s1 : s2);
      }
    }
    int sr = sgn(r);
    if (su == 0) return sr;        // u vanished: pure rational difference
    if (sr == 0) return su;
    if (su == sr) return su;
    // opposite signs: compare u^2 vs r^2; u^2 = b1^2 D + b2^2 E - 2 b1 b2 sqrt(DE)
    mpq_class u2_rat = qx.b * qx.b * static_cast<long>(qx.d) +
                       qy.b * qy.b * static_cast<long>(qy.d);
    mpq_class u2_coef = -2 * qx.b * qy.b;  // coefficient of sqrt(D*E)
    unsigned long de = qx.d * qy.d;        // radicands are small by construction
    Scalar u2 = quadratic(u2_rat, u2_coef, de);
    Scalar r2(mpq_class(r * r));
    int c = exact_compare_(u2, r2);  // both in Q(sqrt(squarefree(DE))) and Q
    if (c == 0) return 0;
    return (c > 0) ? su : sr;
  }

  std::variant<mpq_class, Quadratic, Interval> v_;
};

inline Scalar abs(const Scalar& s) { return s.abs(); }

}  // namespace gonlab
