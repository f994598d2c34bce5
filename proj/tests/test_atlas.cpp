#include <random>

#include "corpus.hpp"
#include "doctest.h"
#include "hessian_ot/atlas.hpp"

using namespace hessian_ot;
using namespace hot_test;

namespace {

IntegerMatrix frame(const LatticeVector& normal, const IntegerMatrix& basis) {
  IntegerMatrix a{normal};
  a.insert(a.end(), basis.begin(), basis.end());
  return a;
}

}  // namespace

TEST_CASE("complement lattice basis") {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coord(-9, 9);
  int tested = 0;
  while (tested < 200) {
    LatticeVector m{coord(rng), coord(rng), coord(rng)};
    if (!is_primitive(m)) continue;
    ++tested;
    auto b = perp_lattice_basis(m);
    REQUIRE(b.size() == 2);
    for (const auto& n : b) CHECK(dot(n, m) == 0);
    // det(x, n_1, n_2) = <m, x>, so |det| = 1 on any x with <m, x> = ±1.
    CHECK(orientation_form(b) == m);
    CHECK(hermite_normal_form(b).size() == 2);
  }
  CHECK_THROWS_AS(perp_lattice_basis(v({2, 4, 0})), std::invalid_argument);
  CHECK(perp_lattice_basis(v({1})).empty());
  CHECK(perp_lattice_basis(v({-1})).empty());
}

TEST_CASE("basis is canonical under sign of construction order") {
  auto a = perp_lattice_basis(v({1, 1, 1}));
  auto b = perp_lattice_basis(v({1, 1, 1}));
  CHECK(a == b);
}

TEST_CASE("cube chart maps facet lattice points onto Z^2") {
  auto c = cube();
  auto anchor = *c.vertex_index(v({1, 1, 1}));
  auto chart = make_chart(c, anchor);
  CHECK(chart.domain_facets.size() == 3);
  auto facet = *facet_with_normal(c, v({1, 0, 0}));
  std::vector<LatticeVector> images;
  for (int y = -1; y <= 1; ++y)
    for (int z = -1; z <= 1; ++z) images.push_back(chart_map(chart, v({1, y, z})));
  CHECK(images.size() == 9);
  // Surjectivity onto Z^2: two unit steps along the facet map to a unimodular pair.
  auto e1 = chart_map(chart, v({0, 1, 0}));
  auto e2 = chart_map(chart, v({0, 0, 1}));
  CHECK(abs(determinant(IntegerMatrix{e1, e2})) == 1);
  auto back = chart_inverse(chart, c.hyperplanes()[facet].normal, to_rational(images[4]));
  CHECK(back == to_rational(v({1, 0, 0})));
}

TEST_CASE("D = 1 chart is zero-dimensional") {
  auto seg = make({{1}, {-1}});
  auto chart = make_chart(seg, 0);
  CHECK(chart.basis.empty());
  CHECK(chart_map(chart, v({1})).empty());
}

TEST_CASE("transition maps lie in SL_d(Z) x R^d on the corpus") {
  for (const auto& [name, p] : reflexive_corpus()) {
    CAPTURE(name);
    for (std::size_t f = 0; f < p.hyperplanes().size(); ++f) {
      const auto& h = p.hyperplanes()[f];
      for (auto a : h.vertices) {
        auto chart = make_chart(p, a);
        CHECK(determinant(frame(h.normal, chart.basis)) == 1);
        for (auto b : h.vertices) {
          auto t = transition_map(p, f, a, b);
          CHECK(determinant(t.linear) == 1);
          auto other = make_chart(p, b);
          for (auto i : h.vertices) {
            auto x = to_rational(p.vertices()[i]);
            CHECK(apply_transition(t, chart_map(other, x)) == chart_map(chart, x));
          }
          if (a == b) {
            CHECK(t.linear == IntegerMatrix{{1, 0}, {0, 1}});
            CHECK(t.translation == RationalVector(2, Rational(0)));
          }
        }
      }
    }
  }
}

TEST_CASE("charts on disjoint stars do not overlap") {
  auto c = cube();
  auto f = *facet_with_normal(c, v({1, 0, 0}));
  auto a = *c.vertex_index(v({1, 1, 1}));
  auto b = *c.vertex_index(v({-1, 1, 1}));
  CHECK_THROWS_WITH_AS(transition_map(c, f, a, b), "charts do not overlap on this facet", GeometryError);
}
