#include "gonlab/linalg.hpp"
#include "support/oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gonlab;

TEST_CASE("integer kernel on the coset relation family") {
  // rows (l, 1, 1) for l = 1..5 pin b1 = 0 and b2 = -a
  std::vector<IntVec> rows;
  for (long l = 1; l <= 5; ++l) rows.push_back({mpz_class(l), 1, 1});
  auto ker = integer_kernel(rows, 3);
  REQUIRE(ker.size() == 1);
  REQUIRE(ker[0][0] == 0);
  REQUIRE(ker[0][1] * ker[0][2] == -1);
}

TEST_CASE("integer kernel edge cases") {
  REQUIRE(integer_kernel({{1, 0}, {0, 1}}, 2).empty());
  auto full = integer_kernel({}, 3);
  REQUIRE(full.size() == 3);
}

TEST_CASE("kernel soundness and box completeness on small instances") {
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(20240811);
  for (int inst = 0; inst < 40; ++inst) {
    size_t q = 2 + inst % 3;  // width q+1 <= 4
    size_t nrows = 1 + inst % 3;
    std::vector<IntVec> rows(nrows, IntVec(q + 1));
    for (auto& r : rows)
      for (auto& x : r) x = mpz_class(rng.get_z_range(9)) - 4;
    auto ker = integer_kernel(rows, q + 1);
    // soundness: every basis vector annihilates every row
    for (const auto& k : ker)
      for (const auto& r : rows) {
        mpz_class s = 0;
        for (size_t i = 0; i <= q; ++i) s += r[i] * k[i];
        REQUIRE(s == 0);
      }
    // completeness: nothing in the [-5, 5] box outside the span
    auto brute = testing::kernel_box_search(rows, q + 1, 5);
    IntMat span(ker.size(), q + 1);
    for (size_t i = 0; i < ker.size(); ++i)
      for (size_t j = 0; j <= q; ++j) span(i, j) = ker[i][j];
    for (const auto& v : brute) {
      IntMat ext(ker.size() + 1, q + 1);
      for (size_t i = 0; i < ker.size(); ++i)
        for (size_t j = 0; j <= q; ++j) ext(i, j) = ker[i][j];
      for (size_t j = 0; j <= q; ++j) ext(ker.size(), j) = v[j];
      REQUIRE(ext.rank() == span.rank());
    }
  }
}

TEST_CASE("unimodular completion from a primitive vector") {
  auto g = complete_primitive({2, 3});
  REQUIRE(g.det() == 1);
  REQUIRE(g(0, 0) == 1);
  REQUIRE(g(0, 1) == 1);
  REQUIRE(g(1, 0) == 2);
  REQUIRE(g(1, 1) == 3);
  REQUIRE(complete_primitive({0, 1}) == IntMat::identity(2));
  REQUIRE(complete_primitive({0, 0, 0, 1}) == IntMat::identity(4));
  REQUIRE_THROWS_AS(complete_primitive({2, 4}), scalar_error);
}

TEST_CASE("unimodular completion: exhaustive over small primitive vectors") {
  // every primitive b with entries in [-20, 20], q in {2, 3}, plus a random
  // sample for q = 4 at the same entry bound
  for (long b1 = -20; b1 <= 20; ++b1)
    for (long b2 = -20; b2 <= 20; ++b2) {
      IntVec b = {mpz_class(b1), mpz_class(b2)};
      if (!is_primitive(b)) continue;
      IntMat g = complete_primitive(b);
      REQUIRE(g.det() == 1);
      REQUIRE(g(1, 0) == b1);
      REQUIRE(g(1, 1) == b2);
    }
  gmp_randclass rng(gmp_randinit_default);
  rng.seed(7);
  for (int inst = 0; inst < 400; ++inst) {
    size_t q = 3 + inst % 2;
    IntVec b(q);
    do {
      for (auto& x : b) x = mpz_class(rng.get_z_range(41)) - 20;
    } while (!is_primitive(b));
    IntMat g = complete_primitive(b);
    REQUIRE(g.det() == 1);
    for (size_t j = 0; j < q; ++j) REQUIRE(g(q - 1, j) == b[j]);
  }
}

TEST_CASE("hermite normal form is canonical and spans the same lattice") {
  IntMat A = IntMat::from_rows({{2, 4, 4}, {-6, 6, 12}, {10, 4, 16}});
  IntMat U;
  IntMat H = hermite_normal_form(A, &U);
  // A * U reproduces [H | zero columns]
  IntMat AU = A * U;
  for (size_t i = 0; i < H.rows(); ++i)
    for (size_t j = 0; j < H.cols(); ++j) REQUIRE(AU(i, j) == H(i, j));
  // pivots positive, echelon shape
  size_t prev_row = 0;
  for (size_t j = 0; j < H.cols(); ++j) {
    size_t r = 0;
    while (r < H.rows() && H(r, j) == 0) ++r;
    REQUIRE(r < H.rows());
    REQUIRE(H(r, j) > 0);
    if (j > 0) REQUIRE(r > prev_row);
    prev_row = r;
  }
  // idempotent on its own output
  REQUIRE(hermite_normal_form(H) == H);
}

TEST_CASE("scalar matrix inverse and determinant") {
  Mat m(3, 3);
  m(0, 0) = Scalar(2);
  m(0, 1) = Scalar::rational(1, 2);
  m(1, 1) = Scalar(1);
  m(1, 2) = Scalar::sqrt_of_ui(2);
  m(2, 2) = Scalar(3);
  REQUIRE(m.det() == Scalar(6));
  REQUIRE((m * m.inverse()) == Mat::identity(3));
  REQUIRE(m.rank() == 3);
}
