#pragma once

// Piecewise-linear 3-systems: representation by breakpoints and values,
// validation of the axioms (S1)-(S3), the explicit rational template on
// [1, Q-1], its self-similar extension, the chord inequalities, and the
// two transference bounds linking L_1 slopes to Psi decay.

#include "gonlab/minima.hpp"

#include <array>
#include <sstream>

namespace gonlab {

struct ThreeSystem {
  // breakpoints include both interval endpoints; values[i] is (P1,P2,P3) at
  // breakpoints[i]; the path is linear in between.
  std::vector<Scalar> breakpoints;
  std::vector<std::array<Scalar, 3>> values;

  const Scalar& q_start() const { return breakpoints.front(); }
  const Scalar& q_end() const { return breakpoints.back(); }

  std::array<Scalar, 3> eval(const Scalar& q) const {
    if (Scalar::compare_or_mid(q, q_start()) < 0 || Scalar::compare_or_mid(q, q_end()) > 0)
      throw scalar_error("evaluation point outside the interval");
    size_t i = 0;
    while (i + 2 < breakpoints.size() && Scalar::compare_or_mid(breakpoints[i + 1], q) <= 0) ++i;
    Scalar len = breakpoints[i + 1] - breakpoints[i];
    Scalar t = (q - breakpoints[i]) / len;
    std::array<Scalar, 3> out;
    for (int c = 0; c < 3; ++c)
      out[c] = values[i][c] + t * (values[i + 1][c] - values[i][c]);
    return out;
  }
};

struct ThreeSystemViolation {
  enum class Kind { s1_order, s1_sum, s2_slopes, s3_ties, structure } kind;
  size_t index;       // breakpoint or segment index
  std::string detail;
};

// Exact check of (S1) at breakpoints, the slope pattern (S2) per segment,
// and the tie condition (S3) at interior breakpoints. Violations are data.
inline std::vector<ThreeSystemViolation> validate_three_system(const ThreeSystem& P) {
  using K = ThreeSystemViolation::Kind;
  std::vector<ThreeSystemViolation> out;
  size_t B = P.breakpoints.size();
  if (B < 2 || P.values.size() != B) {
    out.push_back({K::structure, 0, "need at least two breakpoints with values"});
    return out;
  }
  for (size_t i = 0; i + 1 < B; ++i)
    if (!(Scalar::compare_or_mid(P.breakpoints[i], P.breakpoints[i + 1]) < 0))
      out.push_back({K::structure, i, "breakpoints not strictly increasing"});

  auto eq = [](const Scalar& a, const Scalar& b) {
    if (a.is_exact() && b.is_exact()) return (a - b).sign() == 0;
    // bigreal templates: tolerance 2^-64
    Scalar tol = Scalar(mpq_class(1, 2)).pow_int(64);
    return Scalar::compare_or_mid((a - b).abs(), tol) <= 0;
  };
  auto le = [](const Scalar& a, const Scalar& b) { return Scalar::compare_or_mid(a, b) <= 0; };

  // S1 at breakpoints (linearity extends it to segments once S2 holds)
  for (size_t i = 0; i < B; ++i) {
    const auto& v = P.values[i];
    if (!(le(Scalar(0), v[0]) && le(v[0], v[1]) && le(v[1], v[2])))
      out.push_back({K::s1_order, i, "need 0 <= P1 <= P2 <= P3"});
    if (!eq(v[0] + v[1] + v[2], P.breakpoints[i]))
      out.push_back({K::s1_sum, i, "P1 + P2 + P3 != q"});
  }

  // S2: on each segment exactly one component has slope 1, the others 0
  std::vector<int> seg_riser(B - 1, -1);
  for (size_t i = 0; i + 1 < B; ++i) {
    Scalar len = P.breakpoints[i + 1] - P.breakpoints[i];
    int riser = -1;
    bool ok = true;
    for (int c = 0; c < 3; ++c) {
      Scalar slope = (P.values[i + 1][c] - P.values[i][c]) / len;
      if (eq(slope, Scalar(1))) {
        if (riser >= 0) ok = false;
        riser = c;
      } else if (!eq(slope, Scalar(0))) {
        ok = false;
      }
    }
    if (!ok || riser < 0)
      out.push_back({K::s2_slopes, i, "segment slopes are not one 1 and the rest 0"});
    seg_riser[i] = riser;
  }

  // S3 at interior breakpoints: incoming riser r, outgoing riser s with r < s
  // forces P_r = ... = P_s there (components are 0-based internally).
  for (size_t i = 1; i + 1 < B; ++i) {
    int r = seg_riser[i - 1], s = seg_riser[i];
    if (r < 0 || s < 0 || r >= s) continue;
    for (int c = r; c < s; ++c)
      if (!eq(P.values[i][c], P.values[i][c + 1]))
        out.push_back({K::s3_ties, i, "components between the risers must tie"});
  }
  return out;
}

// The explicit template on [1, Q-1] for rational (or exact) Q > 2:
// breakpoints 1, (2Q-1)/(Q+1), (Q^2-Q+1)/(Q+1), Q-1.
inline ThreeSystem appendix_template(const Scalar& Q) {
  if (!(Scalar::compare_or_mid(Q, Scalar(2)) > 0)) throw scalar_error("template needs Q > 2");
  Scalar q1 = Q + Scalar(1);
  ThreeSystem P;
  P.breakpoints = {Scalar(1), (Scalar(2) * Q - Scalar(1)) / q1,
                   (Q * Q - Q + Scalar(1)) / q1, Q - Scalar(1)};
  Scalar a = Scalar(1) / q1;            // 1/(Q+1)
  Scalar b = (Q - Scalar(1)) / q1;      // (Q-1)/(Q+1)
  Scalar c = (Q - Scalar(1)) * (Q - Scalar(1)) / q1;  // (Q-1)^2/(Q+1)
  P.values = {{a, a, b}, {a, b, b}, {a, b, c}, {b, b, c}};
  return P;
}

// Concatenate scaled copies over I_l = [(Q-1)^l, (Q-1)^{l+1}], l = 0..levels.
// The junction identity (Q-1)^l P(1) = (Q-1)^{l-1} P(Q-1) is asserted exactly.
inline ThreeSystem self_similar_extend(const Scalar& Q, int levels) {
  if (levels < 0) throw scalar_error("levels must be >= 0");
  ThreeSystem base = appendix_template(Q);
  ThreeSystem out;
  Scalar scale(1);
  for (int l = 0; l <= levels; ++l) {
    for (size_t i = 0; i < base.breakpoints.size(); ++i) {
      Scalar bp = scale * base.breakpoints[i];
      std::array<Scalar, 3> val = {scale * base.values[i][0], scale * base.values[i][1],
                                   scale * base.values[i][2]};
      if (l > 0 && i == 0) {
        // junction: must equal the last value of the previous level
        const auto& prev = out.values.back();
        for (int c = 0; c < 3; ++c)
          if (!(Scalar::compare_or_mid(prev[c], val[c]) == 0))
            throw scalar_error("self-similar junction mismatch");
        continue;
      }
      out.breakpoints.push_back(bp);
      out.values.push_back(val);
    }
    scale *= Q - Scalar(1);
  }
  return out;
}

struct TemplateClaims {
  bool chord_upper_holds = false;    // P~_1(q) <= q/(Q+1) at every breakpoint
  bool endpoint_equality_holds = false;  // equality at right endpoints of each I_l
  std::vector<size_t> chord_violations;
  std::vector<size_t> equality_failures;
};

// (a) the chord bound at all breakpoints (linearity makes this sufficient),
// (b) exact equality at the right endpoint of each level interval.
inline TemplateClaims template_claims_check(const ThreeSystem& Pt, const Scalar& Q) {
  TemplateClaims r;
  Scalar q1 = Q + Scalar(1);
  for (size_t i = 0; i < Pt.breakpoints.size(); ++i) {
    Scalar chord = Pt.breakpoints[i] / q1;
    if (Scalar::compare_or_mid(Pt.values[i][0], chord) > 0) r.chord_violations.push_back(i);
  }
  r.chord_upper_holds = r.chord_violations.empty();
  // right endpoints of I_l are (Q-1)^{l+1}
  Scalar mark = Q - Scalar(1);
  size_t checked = 0;
  for (size_t i = 0; i < Pt.breakpoints.size(); ++i) {
    if (Scalar::compare_or_mid(Pt.breakpoints[i], mark) == 0) {
      ++checked;
      if (!(Scalar::compare_or_mid(Pt.values[i][0], mark / q1) == 0))
        r.equality_failures.push_back(i);
      mark *= Q - Scalar(1);
    }
  }
  r.endpoint_equality_holds = checked > 0 && r.equality_failures.empty();
  return r;
}

// ---------------------------------------------------------------------------
// Transference: linear bounds on L_1 translate into power bounds on Psi.

struct TransferenceBounds {
  enum class Direction { lower_unbounded, upper_eventual } direction;
  Scalar A, B, theta_norm;
  Scalar coefficient;  // positive
  Scalar exponent;     // 1 - 1/A < 0
};

// If L_1(q) > A q - B on an unbounded set, then
// Psi(t) >= e^{(-B - ln(1 + ||theta||))/A} * t^{1 - 1/A} on an unbounded set.
inline TransferenceBounds psi_lower_from_L1(const Scalar& A, const Scalar& B,
                                            const Scalar& theta_norm) {
  if (!(A.sign() > 0) || Scalar::compare_or_mid(A, Scalar(1)) >= 0 || !(B.sign() > 0))
    throw scalar_error("need 0 < A < 1 and B > 0");
  TransferenceBounds t;
  t.direction = TransferenceBounds::Direction::lower_unbounded;
  t.A = A;
  t.B = B;
  t.theta_norm = theta_norm;
  Scalar C = (Scalar(1) + theta_norm).log();
  t.coefficient = ((-B - C) / A).exp();
  t.exponent = Scalar(1) - Scalar(1) / A;
  return t;
}

// If L_1(q) <= A q + B eventually, then Psi(t) <= e^{B/A} t^{1 - 1/A}
// eventually.
inline TransferenceBounds psi_upper_from_L1(const Scalar& A, const Scalar& B) {
  if (!(A.sign() > 0) || Scalar::compare_or_mid(A, Scalar(1)) >= 0 || !(B.sign() > 0))
    throw scalar_error("need 0 < A < 1 and B > 0");
  TransferenceBounds t;
  t.direction = TransferenceBounds::Direction::upper_eventual;
  t.A = A;
  t.B = B;
  t.theta_norm = Scalar(0);
  t.coefficient = (B / A).exp();
  t.exponent = Scalar(1) - Scalar(1) / A;
  return t;
}

// ---------------------------------------------------------------------------

struct DeviationReport {
  // per component: sup |L_j - P~_j| over the grid and its location
  std::array<Scalar, 3> sup_deviation;
  std::array<Scalar, 3> argmax_q;
};

// Purely descriptive: boundedness of L - P is an asymptotic statement.
inline DeviationReport compare_L_to_template(const MinimaProfile& prof, const ThreeSystem& Pt) {
  DeviationReport rep{{Scalar(0), Scalar(0), Scalar(0)},
                      {Scalar(0), Scalar(0), Scalar(0)}};
  bool first = true;
  for (size_t i = 0; i < prof.q_grid.size(); ++i) {
    auto tv = Pt.eval(prof.q_grid[i]);
    for (int c = 0; c < 3; ++c) {
      Scalar dev = (prof.L[i][c] - tv[c]).abs();
      if (first || Scalar::compare_or_mid(dev, rep.sup_deviation[c]) > 0) {
        rep.sup_deviation[c] = dev;
        rep.argmax_q[c] = prof.q_grid[i];
      }
    }
    first = false;
  }
  return rep;
}

}  // namespace gonlab
