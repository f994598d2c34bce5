#include "hessian_ot/atlas.hpp"

#include <algorithm>
#include <stdexcept>

namespace hessian_ot {

namespace mp = boost::multiprecision;

namespace {

// Column operation on both the working row and the accumulated transform:
// col_a <- x*col_a + y*col_b, col_b <- s*col_a + t*col_b (unimodular 2x2).
void combine_columns(LatticeVector& row, IntegerMatrix& u, std::size_t a, std::size_t b, const Integer& x,
                     const Integer& y, const Integer& s, const Integer& t) {
  auto mix = [&](Integer& ea, Integer& eb) {
    Integer na = x * ea + y * eb;
    Integer nb = s * ea + t * eb;
    ea = std::move(na);
    eb = std::move(nb);
  };
  mix(row[a], row[b]);
  for (auto& r : u) mix(r[a], r[b]);
}

// Extended gcd: returns g = gcd(a, b) >= 0 with x*a + y*b = g.
Integer extended_gcd(const Integer& a, const Integer& b, Integer& x, Integer& y) {
  Integer old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    Integer q = old_r / r;
    Integer tmp = old_r - q * r;
    old_r = r;
    r = tmp;
    tmp = old_s - q * s;
    old_s = s;
    s = tmp;
    tmp = old_t - q * t;
    old_t = t;
    t = tmp;
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  x = old_s;
  y = old_t;
  return old_r;
}

// Rows (n_sigma, n_1, ..., n_d): maps affspan(sigma) to {1} x R^d.
IntegerMatrix extended_frame(const Chart& chart, const LatticeVector& facet_normal) {
  IntegerMatrix a;
  a.push_back(facet_normal);
  for (const auto& b : chart.basis) a.push_back(b);
  return a;
}

}  // namespace

LatticeVector orientation_form(const IntegerMatrix& basis) {
  const std::size_t dim = basis.size() + 1;
  LatticeVector w(dim);
  for (std::size_t col = 0; col < dim; ++col) {
    IntegerMatrix minor;
    for (const auto& row : basis) {
      LatticeVector r;
      for (std::size_t c = 0; c < dim; ++c)
        if (c != col) r.push_back(row[c]);
      minor.push_back(std::move(r));
    }
    Integer det = determinant(minor);
    w[col] = (col % 2 == 0) ? det : Integer(-det);
  }
  return w;
}

IntegerMatrix perp_lattice_basis(const LatticeVector& m) {
  if (m.empty() || !is_primitive(m)) throw std::invalid_argument("perp_lattice_basis: vector is not primitive");
  const std::size_t dim = m.size();
  IntegerMatrix u(dim, LatticeVector(dim, Integer(0)));
  for (std::size_t i = 0; i < dim; ++i) u[i][i] = 1;
  LatticeVector row = m;
  // Move a nonzero entry into column 0, then clear the rest with 2x2 steps.
  for (std::size_t j = 1; j < dim; ++j) {
    if (row[j] == 0) continue;
    Integer x, y;
    Integer g = extended_gcd(row[0], row[j], x, y);
    Integer s = -row[j] / g, t = row[0] / g;
    combine_columns(row, u, 0, j, x, y, s, t);
  }
  IntegerMatrix basis;
  for (std::size_t j = 1; j < dim; ++j) {
    LatticeVector col(dim);
    for (std::size_t i = 0; i < dim; ++i) col[i] = u[i][j];
    basis.push_back(std::move(col));
  }
  if (basis.empty()) return basis;
  basis = hermite_normal_form(std::move(basis));
  LatticeVector w = orientation_form(basis);
  if (w != m) {
    for (auto& x : basis.back()) x = -x;
    if (orientation_form(basis) != m) throw std::logic_error("perp_lattice_basis: basis does not span the complement");
  }
  return basis;
}

Chart make_chart(const LatticePolytope& p, std::size_t anchor_vertex) {
  if (anchor_vertex >= p.vertices().size()) throw std::out_of_range("make_chart: index is not a vertex");
  Chart c;
  c.anchor_vertex = anchor_vertex;
  c.anchor = p.vertices()[anchor_vertex];
  c.basis = perp_lattice_basis(c.anchor);
  c.domain_facets = star(p, anchor_vertex);
  return c;
}

RationalVector chart_map(const Chart& chart, const RationalVector& point) {
  RationalVector y;
  y.reserve(chart.basis.size());
  for (const auto& n : chart.basis) y.push_back(dot(n, point));
  return y;
}

LatticeVector chart_map(const Chart& chart, const LatticeVector& point) {
  LatticeVector y;
  y.reserve(chart.basis.size());
  for (const auto& n : chart.basis) y.push_back(dot(n, point));
  return y;
}

RationalVector chart_inverse(const Chart& chart, const LatticeVector& facet_normal, const RationalVector& y) {
  RationalVector rhs{Rational(1)};
  rhs.insert(rhs.end(), y.begin(), y.end());
  auto x = solve(to_rational(extended_frame(chart, facet_normal)), rhs);
  if (!x) throw GeometryError("chart is degenerate on this facet");
  return *x;
}

TransitionMap transition_map(const LatticePolytope& p, std::size_t facet, std::size_t anchor,
                             std::size_t anchor_prime) {
  const auto& h = p.hyperplanes().at(facet);
  auto on_facet = [&](std::size_t v) { return std::binary_search(h.vertices.begin(), h.vertices.end(), v); };
  if (!on_facet(anchor) || !on_facet(anchor_prime)) throw GeometryError("charts do not overlap on this facet");
  if (h.offset != 1) throw GeometryError("polytope is not reflexive");

  Chart c = make_chart(p, anchor);
  Chart c_prime = make_chart(p, anchor_prime);
  auto inv = inverse(to_rational(extended_frame(c_prime, h.normal)));
  if (!inv) throw GeometryError("chart is degenerate on this facet");
  RationalMatrix m = multiply(to_rational(extended_frame(c, h.normal)), *inv);

  const std::size_t d = c.basis.size();
  TransitionMap t;
  t.linear.assign(d, LatticeVector(d));
  t.translation.assign(d, Rational(0));
  for (std::size_t i = 0; i < d; ++i) {
    t.translation[i] = m[i + 1][0];
    for (std::size_t j = 0; j < d; ++j) {
      const Rational& e = m[i + 1][j + 1];
      if (mp::denominator(e) != 1) throw std::logic_error("transition_map: linear part is not integral");
      t.linear[i][j] = mp::numerator(e);
    }
  }
  return t;
}

RationalVector apply_transition(const TransitionMap& map, const RationalVector& y) {
  RationalVector out = map.translation;
  for (std::size_t i = 0; i < out.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) out[i] += map.linear[i][j] * y[j];
  return out;
}

}  // namespace hessian_ot
