#include "doctest.h"
#include "hessian_ot/exact.hpp"
#include "hessian_ot/hull.hpp"

using namespace hessian_ot;

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("-7") == Rational(-7));
  CHECK(parse_rational("010") == Rational(10));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK_THROWS(parse_rational("1/0"));
  CHECK_THROWS(parse_rational("abc"));
  CHECK(to_string(Rational(-3, 4)) == "-3/4");
  CHECK(to_string(Rational(5)) == "5");
}

TEST_CASE("determinants agree between integer and rational paths") {
  IntegerMatrix m{{2, 1, 0}, {1, 3, 1}, {0, 1, 4}};
  CHECK(determinant(m) == 18);
  CHECK(determinant(to_rational(m)) == Rational(18));
  CHECK(determinant(IntegerMatrix{{1, 2}, {2, 4}}) == 0);
  CHECK(determinant(IntegerMatrix{}) == 1);
}

TEST_CASE("hermite normal form is canonical for a lattice") {
  IntegerMatrix a{{2, 4, 4}, {-6, 6, 12}, {10, -4, -16}};
  IntegerMatrix b{{-4, 10, 16}, {2, 4, 4}, {10, -4, -16}};  // row ops of a
  CHECK(hermite_normal_form(a) == hermite_normal_form(b));
  auto h = hermite_normal_form(IntegerMatrix{{1, 1, 0}, {2, 2, 0}});
  CHECK(h.size() == 1);
}

TEST_CASE("nullspace and solve") {
  auto ns = nullspace(RationalMatrix{{1, 1, 1}}, 3);
  CHECK(ns.size() == 2);
  for (const auto& n : ns) CHECK(n[0] + n[1] + n[2] == 0);
  auto x = solve(RationalMatrix{{2, 1}, {1, 3}}, RationalVector{3, 5});
  REQUIRE(x);
  CHECK((*x)[0] == Rational(4, 5));
  CHECK((*x)[1] == Rational(7, 5));
  CHECK_FALSE(solve(RationalMatrix{{1, 2}, {2, 4}}, RationalVector{1, 1}));
}

TEST_CASE("rational_from_double is exact") {
  CHECK(rational_from_double(0.5) == Rational(1, 2));
  CHECK(to_double(rational_from_double(0.1)) == 0.1);
}

TEST_CASE("hull volumes") {
  PointSet square{{0, 0}, {2, 0}, {0, 2}, {2, 2}, {1, 1}};
  CHECK(convex_volume(square) == 4);
  CHECK(extreme_points(square).size() == 4);
  PointSet tetra{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(convex_volume(tetra) == Rational(1, 6));
  CHECK(hull_facets(tetra).size() == 4);
  CHECK(convex_volume(PointSet{{0, 0}, {1, 1}, {2, 2}}) == 0);
}
