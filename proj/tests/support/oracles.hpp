#pragma once

// Test-only oracles, kept independent of the library code paths they check:
// a continued-fraction oracle for quadratic irrationals, brute-force kernel
// and lattice-point searches, and midpoint quadrature for Fourier factors.

#include "gonlab/core.hpp"

#include <complex>
#include <map>
#include <vector>

namespace gonlab::testing {

// Continued fraction of an exact quadratic irrational via the Scalar floor:
// a_k = floor(theta_k), theta_{k+1} = 1 / (theta_k - a_k). Returns convergent
// denominators q_k with the exact distances <q_k theta>.
struct ConvergentOracle {
  std::vector<mpz_class> denominators;   // strictly increasing
  std::vector<Scalar> distances;         // dist(q theta, Z), exact
};

inline ConvergentOracle convergents(const Scalar& theta, const mpz_class& q_bound) {
  if (!theta.is_quadratic()) throw scalar_error("oracle expects a quadratic irrational");
  ConvergentOracle out;
  Scalar t = theta;
  mpz_class pk1 = 1, pk = *theta.floor();  // p_{-1}, p_0
  mpz_class qk1 = 0, qk = 1;               // q_{-1}, q_0
  std::map<mpz_class, Scalar> best;        // q -> smallest distance
  auto record = [&](const mpz_class& q) {
    Scalar dist = (theta * Scalar(mpq_class(q))).dist_to_integers();
    auto it = best.find(q);
    if (it == best.end() || Scalar::compare_or_mid(dist, it->second) < 0) best[q] = dist;
  };
  record(qk);
  for (int k = 0; k < 256; ++k) {
    Scalar frac = t - Scalar(mpq_class(*t.floor()));
    if (frac.sign() == 0) break;  // rational tail; cannot happen for irrationals
    t = Scalar(1) / frac;
    mpz_class a = *t.floor();
    mpz_class p = a * pk + pk1, q = a * qk + qk1;
    if (q > q_bound) break;
    record(q);
    pk1 = pk; pk = p;
    qk1 = qk; qk = q;
  }
  // keep strictly decreasing distances in increasing q order
  for (const auto& [q, dist] : best) {
    if (!out.distances.empty() &&
        Scalar::compare_or_mid(dist, out.distances.back()) >= 0)
      continue;
    out.denominators.push_back(q);
    out.distances.push_back(dist);
  }
  return out;
}

// Brute-force integer kernel inside a box.
inline std::vector<IntVec> kernel_box_search(const std::vector<IntVec>& rows, size_t width,
                                             long box) {
  std::vector<IntVec> found;
  std::vector<long> v(width, -box);
  while (true) {
    bool nonzero = false;
    for (long x : v) nonzero = nonzero || x != 0;
    if (nonzero) {
      bool ok = true;
      for (const auto& r : rows) {
        mpz_class s = 0;
        for (size_t i = 0; i < width; ++i) s += r[i] * v[i];
        if (s != 0) { ok = false; break; }
      }
      if (ok) {
        IntVec u(width);
        for (size_t i = 0; i < width; ++i) u[i] = v[i];
        found.push_back(u);
      }
    }
    size_t i = width;
    bool done = true;
    while (i-- > 0) {
      if (v[i] < box) { ++v[i]; done = false; break; }
      v[i] = -box;
    }
    if (done) break;
  }
  return found;
}

// Midpoint quadrature for |int_0^1 e^{2 pi i (alpha + s beta)} ds|.
inline std::complex<double> line_fourier_quadrature(double alpha, double beta, int samples) {
  std::complex<double> acc = 0;
  for (int i = 0; i < samples; ++i) {
    double s = (i + 0.5) / samples;
    double arg = 2.0 * 3.14159265358979323846 * (alpha + s * beta);
    acc += std::complex<double>(std::cos(arg), std::sin(arg));
  }
  return acc / double(samples);
}

inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace gonlab::testing
