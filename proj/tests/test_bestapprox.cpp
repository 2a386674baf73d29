#include "gonlab/bestapprox.hpp"
#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gonlab;

namespace {

Mat one_by_one(const Scalar& s) {
  Mat m(1, 1);
  m(0, 0) = s;
  return m;
}

const Scalar kGolden = Scalar::quadratic(mpq_class(1, 2), mpq_class(1, 2), 5);

}  // namespace

TEST_CASE("psi examples") {
  Dims d11(1, 1);
  auto p1 = psi(one_by_one(Scalar::rational(1, 3)), Scalar(2), d11);
  REQUIRE(p1.value == Scalar::rational(1, 3));
  REQUIRE(p1.witness == IntVec{1});
  REQUIRE_FALSE(p1.rational_dependence);

  auto p2 = psi(one_by_one(Scalar::rational(1, 3)), Scalar(3), d11);
  REQUIRE(p2.value == Scalar(0));
  REQUIRE(p2.witness == IntVec{3});
  REQUIRE(p2.rational_dependence);

  auto p3 = psi(one_by_one(Scalar::sqrt_of_ui(2)), Scalar(1), d11);
  REQUIRE(p3.value == Scalar::quadratic(-1, 1, 2));  // sqrt2 - 1
}

TEST_CASE("psi is nonincreasing in t") {
  Dims d11(1, 1);
  Mat A = one_by_one(Scalar::sqrt_of_ui(2));
  Scalar prev = psi(A, Scalar(1), d11).value;
  for (long t = 2; t <= 40; ++t) {
    Scalar cur = psi(A, Scalar(t), d11).value;
    REQUIRE(cur <= prev);
    prev = cur;
  }
}

TEST_CASE("jump sequences match the convergent oracle") {
  Dims d11(1, 1);
  struct Case {
    Scalar theta;
    std::vector<long> expect_M;  // frozen prefixes
  };
  std::vector<Case> cases = {
      {kGolden, {1, 2, 3, 5, 8, 13, 21, 34, 55, 89}},
      {Scalar::sqrt_of_ui(2), {1, 2, 5, 12, 29, 70}},
  };
  for (const auto& c : cases) {
    auto seq = best_approx_sequence(one_by_one(c.theta), 100, d11);
    REQUIRE(seq.entries.size() == c.expect_M.size());
    for (size_t i = 0; i < c.expect_M.size(); ++i)
      REQUIRE(seq.entries[i].M == c.expect_M[i]);
    auto oracle = testing::convergents(c.theta, 100);
    REQUIRE(oracle.denominators.size() == seq.entries.size());
    for (size_t i = 0; i < seq.entries.size(); ++i) {
      REQUIRE(oracle.denominators[i] == seq.entries[i].M);
      REQUIRE(Scalar::compare(oracle.distances[i], seq.entries[i].zeta) == 0);
    }
  }
}

TEST_CASE("minkowski product bound Delta_l <= 1 on the examples") {
  Dims d11(1, 1);
  auto seq = best_approx_sequence(one_by_one(Scalar::sqrt_of_ui(2)), 100, d11);
  for (size_t l = 0; l + 1 < seq.entries.size(); ++l) REQUIRE(seq.delta(l) <= Scalar(1));
}

TEST_CASE("rational matrices: fast path agrees with the generic sweep") {
  // force the generic path with a quadratic entry of zero radical part is not
  // possible (it collapses), so compare against an independently computed
  // naïve minimum per shell instead
  Dims d22(2, 2);
  Mat A(2, 2);
  A(0, 0) = Scalar::rational(3, 7);
  A(0, 1) = Scalar::rational(1, 5);
  A(1, 0) = Scalar::rational(2, 9);
  A(1, 1) = Scalar::rational(5, 11);
  auto seq = best_approx_sequence(A, 40, d22);
  // naive recomputation of the running minimum
  Scalar run(1);
  size_t at = 0;
  for (long M = 1; M <= 40; ++M) {
    Scalar shell_min(1);
    bool any = false;
    detail::for_each_shell_point(2, M, [&](const IntVec&, const std::vector<long>& v) {
      Vec img(2, Scalar(0));
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) img[i] += A(i, j) * Scalar(mpq_class(v[j]));
      Scalar dist = torus_distance(img);
      if (!any || dist < shell_min) shell_min = dist;
      any = true;
    });
    if (any && shell_min < run) {
      run = shell_min;
      REQUIRE(at < seq.entries.size());
      REQUIRE(seq.entries[at].M == M);
      REQUIRE(seq.entries[at].zeta == shell_min);
      ++at;
    }
  }
  REQUIRE(at == seq.entries.size());
}

TEST_CASE("rational dependence terminates the sweep") {
  Dims d11(1, 1);
  auto seq = best_approx_sequence(one_by_one(Scalar::rational(1, 3)), 10, d11);
  REQUIRE(seq.rational_dependence_hit);
  REQUIRE(seq.entries.back().zeta == Scalar(0));
  REQUIRE(seq.entries.back().M == 3);
}

TEST_CASE("growth audit on real and synthetic sequences") {
  Dims d11(1, 1);
  auto fib = best_approx_sequence(one_by_one(kGolden), 100000, d11);
  auto g = growth_audit(fib);
  REQUIRE_FALSE(g.inconclusive);
  REQUIRE(g.offset == 10);
  REQUIRE(g.violations.empty());
  auto pell = growth_audit(best_approx_sequence(one_by_one(Scalar::sqrt_of_ui(2)), 200000, d11));
  REQUIRE_FALSE(pell.inconclusive);
  REQUIRE(pell.violations.empty());
  // negative control: slow synthetic growth must violate the bound
  std::vector<BestApproxEntry> ents;
  for (long l = 0; l < 30; ++l)
    ents.push_back({mpz_class(l + 1), Scalar(mpq_class(1, (l + 2) * (l + 2))), {}});
  auto synth = BestApproxSequence::synthetic(d11, std::move(ents));
  auto g2 = growth_audit(synth);
  REQUIRE_FALSE(g2.inconclusive);
  REQUIRE_FALSE(g2.violations.empty());
  // too short is inconclusive
  std::vector<BestApproxEntry> small(fib.entries.begin(), fib.entries.begin() + 5);
  REQUIRE(growth_audit(BestApproxSequence::synthetic(d11, std::move(small))).inconclusive);
}

TEST_CASE("class-C verdicts on synthetic sequences") {
  Dims d11(1, 1);
  // Delta = 1/2 with M = 2^l and geometric picks: consistent
  std::vector<BestApproxEntry> e;
  mpz_class M = 2;
  for (long l = 0; l < 40; ++l) {
    e.push_back({M, Scalar(mpq_class(1, 4) / mpq_class(mpz_class(1) << l)), {}});
    M *= 2;
  }
  auto s = BestApproxSequence::synthetic(d11, e);
  auto rep = class_c_test(s, {1, 2, 4, 8, 16, 32});
  REQUIRE(rep.verdict == ClassCReport::Verdict::consistent_with_C);
  REQUIRE(rep.h_decreasing_trend);
  REQUIRE(rep.sums_divergent_trend);
  // H decreasing toward zero over the horizon
  for (size_t k = 0; k + 1 < rep.H.size(); ++k) REQUIRE(rep.H[k + 1] <= rep.H[k]);

  // Delta_l = (l+1)^{-1/(2(d-1))} with l_k = k^2: partial sums behave like
  // sum 1/k and must look divergent
  std::vector<BestApproxEntry> e2;
  M = 2;
  for (long l = 0; l < 1100; ++l) {
    // Delta_l = 1/sqrt(l+1) exactly as a rational square root surrogate:
    // use Delta^2 = 1/(l+1) via zeta = Delta / M_{l+1}
    mpq_class delta2(1, l + 1);
    // store zeta so that Delta_l^{d-1} = Delta_l = sqrt(delta2): keep zeta
    // rational by storing Delta_l = 1/ceil(sqrt(l+1)) instead (monotone)
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), mpz_class(l + 1).get_mpz_t());
    if (r * r < l + 1) r += 1;
    e2.push_back({M, Scalar(mpq_class(1, r) / mpq_class(2 * M)), {}});
    M *= 2;
  }
  auto s2 = BestApproxSequence::synthetic(d11, e2);
  std::vector<size_t> lk;
  for (size_t k = 1; k * k < 1090; ++k) lk.push_back(k * k);
  auto rep2 = class_c_test(s2, lk);
  REQUIRE(rep2.sums_divergent_trend);

  // convergent p-series: Delta_{l_k}^{d-1} ~ k^{-2} fails condition 1
  std::vector<BestApproxEntry> e3;
  M = 2;
  for (long l = 0; l < 40; ++l) {
    mpq_class delta(1, (l + 1) * (l + 1));
    e3.push_back({M, Scalar(delta / (mpq_class(2) * M)), {}});
    M *= 2;
  }
  auto s3 = BestApproxSequence::synthetic(d11, e3);
  std::vector<size_t> lk3;
  for (size_t k = 0; k < 30; ++k) lk3.push_back(k);
  auto rep3 = class_c_test(s3, lk3);
  REQUIRE(rep3.verdict == ClassCReport::Verdict::condition1_failing);
}

TEST_CASE("auto subsequence respects the thinning ratio") {
  Dims d11(1, 1);
  auto seq = best_approx_sequence(one_by_one(Scalar::sqrt_of_ui(2)), 10000, d11);
  auto lk = auto_subsequence(seq);
  REQUIRE(lk.size() >= 2);
  for (size_t k = 0; k + 1 < lk.size(); ++k)
    REQUIRE(seq.entries[lk[k + 1] + 1].M >= 2 * seq.entries[lk[k] + 1].M);
  // the auto pick feeds class_c_test without throwing
  auto rep = class_c_test(seq);
  REQUIRE(rep.subsequence == lk);
}

TEST_CASE("monotonicity invariants are enforced") {
  Dims d11(1, 1);
  std::vector<BestApproxEntry> bad = {{1, Scalar::rational(1, 3), {}},
                                      {2, Scalar::rational(1, 2), {}}};
  REQUIRE_THROWS_AS(BestApproxSequence::synthetic(d11, std::move(bad)), scalar_error);
}
