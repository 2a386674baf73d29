#include "gonlab/scalar.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace gonlab;

TEST_CASE("rational arithmetic stays exact") {
  Scalar a = Scalar::rational(1, 3), b = Scalar::rational(1, 6);
  REQUIRE(a + b == Scalar::rational(1, 2));
  REQUIRE(a * b == Scalar::rational(1, 18));
  REQUIRE(a / b == Scalar(2));
  REQUIRE((a - a).sign() == 0);
  REQUIRE_THROWS_AS(a / Scalar(0), scalar_error);
}

TEST_CASE("quadratic field arithmetic and canonicalization") {
  Scalar r2 = Scalar::sqrt_of_ui(2);
  REQUIRE(r2 * r2 == Scalar(2));
  REQUIRE((Scalar(1) / r2) == Scalar::quadratic(0, mpq_class(1, 2), 2));
  // sqrt(8) = 2 sqrt(2), sqrt(9) collapses to rational
  REQUIRE(Scalar::quadratic(0, 1, 8) == Scalar::quadratic(0, 2, 2));
  REQUIRE(Scalar::quadratic(3, 1, 9) == Scalar(6));
  // conjugate-based division
  Scalar x = (Scalar(1) + r2) / (Scalar(3) - r2);
  REQUIRE(x * (Scalar(3) - r2) == Scalar(1) + r2);
  // pure radical products across fields stay exact
  REQUIRE(Scalar::sqrt_of_ui(2) * Scalar::sqrt_of_ui(3) == Scalar::sqrt_of_ui(6));
  REQUIRE(Scalar::sqrt_of_ui(6) / Scalar::sqrt_of_ui(2) == Scalar::sqrt_of_ui(3));
}

TEST_CASE("signs and comparisons across distinct radicands are exact") {
  Scalar r2 = Scalar::sqrt_of_ui(2), r3 = Scalar::sqrt_of_ui(3);
  REQUIRE(Scalar::compare(r2, r3) == -1);
  REQUIRE(Scalar::compare(Scalar(1) + r2, Scalar::sqrt_of_ui(6)) == -1);  // 2.414 < 2.449
  REQUIRE(Scalar::compare(Scalar(2) + r2, Scalar::sqrt_of_ui(6)) == 1);
  REQUIRE(Scalar::compare(r2, Scalar::quadratic(0, mpq_class(1, 2), 8)) == 0);
  REQUIRE((r3 - r2).sign() > 0);
  REQUIRE((Scalar(1) - r2).sign() < 0);
  REQUIRE(Scalar::quadratic(-1, 1, 2).sign() > 0);  // sqrt2 - 1
}

TEST_CASE("floor and nearest-integer distance are exact on exact kinds") {
  Scalar r2 = Scalar::sqrt_of_ui(2);
  REQUIRE(*r2.floor() == 1);
  REQUIRE(*(-r2).floor() == -2);
  REQUIRE(*(Scalar(5) * r2).floor() == 7);
  REQUIRE(Scalar::rational(-7, 2).floor().value() == -4);
  // dist(5 sqrt2) = 5 sqrt2 - 7
  REQUIRE((Scalar(5) * r2).dist_to_integers() == Scalar::quadratic(-7, 5, 2));
  REQUIRE(Scalar::rational(3, 4).dist_to_integers() == Scalar::rational(1, 4));
  REQUIRE(Scalar(42).dist_to_integers() == Scalar(0));
  // ties sit at exactly 1/2
  REQUIRE(Scalar::rational(5, 2).dist_to_integers() == Scalar::rational(1, 2));
}

TEST_CASE("bigreal intervals enclose and propagate outward") {
  Scalar e = Scalar(1).exp();
  REQUIRE(e.is_bigreal());
  REQUIRE(e.error_radius() > 0);
  // interval containment: e in [2.718281828, 2.718281829]
  REQUIRE(Scalar::compare(e, Scalar::rational(2718281828, 1000000000)) == 1);
  REQUIRE(Scalar::compare(e, Scalar::rational(2718281829, 1000000000)) == -1);
  // radius never shrinks through arithmetic
  Scalar sum = e + Scalar(1);
  REQUIRE(sum.error_radius() >= e.error_radius());
  // exact shortcuts
  REQUIRE(Scalar(0).exp() == Scalar(1));
  REQUIRE(Scalar(1).log() == Scalar(0));
  // exp(log 2) recovers 2 within the interval
  Scalar two = Scalar(2).log().exp();
  auto c = Scalar::compare(two, Scalar(2));
  REQUIRE(!c.has_value());  // overlapping: cannot be separated, as it should be
  REQUIRE((two - Scalar(2)).abs().to_double() < 1e-70);
}

TEST_CASE("mixing exact and bigreal promotes to bigreal") {
  Scalar x = Scalar::sqrt_of_ui(2) + Scalar(1).exp();
  REQUIRE(x.is_bigreal());
  REQUIRE(x.error_radius() > 0);
}

TEST_CASE("powers and roots") {
  REQUIRE(Scalar::rational(2, 3).pow_int(3) == Scalar::rational(8, 27));
  REQUIRE(Scalar(2).pow_int(-2) == Scalar::rational(1, 4));
  REQUIRE(Scalar::sqrt_of_ui(2).pow_int(4) == Scalar(4));
  REQUIRE(Scalar::rational(9, 4).sqrt() == Scalar::rational(3, 2));
  REQUIRE(Scalar::rational(1, 2).sqrt() == Scalar::quadratic(0, mpq_class(1, 2), 2));
  REQUIRE(Scalar::rational(27, 8).rootn(3) == Scalar::rational(3, 2));
  REQUIRE_THROWS_AS(Scalar(-1).sqrt(), scalar_error);
}

TEST_CASE("scalar rendering") {
  REQUIRE(Scalar::rational(3, 4).to_string() == "3/4");
  REQUIRE(Scalar::quadratic(1, 2, 2).to_string() == "1+2*sqrt(2)");
  REQUIRE(Scalar::quadratic(0, -1, 5).to_string() == "-sqrt(5)");
  REQUIRE(Scalar::rational(1, 4).to_decimal(3) == "0.250");
}
