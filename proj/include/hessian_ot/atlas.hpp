#pragma once

// Integral affine charts on the boundary of a reflexive polytope. The chart
// anchored at a vertex m maps a point x to (<x, n_1>, ..., <x, n_d>) where
// n_1..n_d generate the lattice of integral functionals vanishing on m.

#include <cstddef>
#include <vector>

#include "hessian_ot/exact.hpp"
#include "hessian_ot/polytope.hpp"

namespace hessian_ot {

struct Chart {
  std::size_t anchor_vertex = 0;  // index into the polytope's vertices
  LatticeVector anchor;           // the vertex itself
  IntegerMatrix basis;            // d rows generating N ∩ anchor^⊥
  IndexSet domain_facets;         // Star(anchor): facets containing it
};

/// Affine map y -> linear * y + translation between chart coordinates.
struct TransitionMap {
  IntegerMatrix linear;
  RationalVector translation;
};

/// Canonical basis of {n in Z^D : <m, n> = 0}: Hermite normal form of the
/// complement lattice, with the last vector's sign chosen so that
/// det(x, n_1, ..., n_d) = <m, x> for every x. Throws std::invalid_argument
/// when m is not primitive.
IntegerMatrix perp_lattice_basis(const LatticeVector& m);

/// det(x, n_1, ..., n_d) as a linear form in x; equals +m for the canonical
/// basis and ±m for any basis of the complement lattice.
LatticeVector orientation_form(const IntegerMatrix& basis);

Chart make_chart(const LatticePolytope& p, std::size_t anchor_vertex);

RationalVector chart_map(const Chart& chart, const RationalVector& point);
LatticeVector chart_map(const Chart& chart, const LatticeVector& point);

/// Inverse of the chart restricted to the affine span of a facet containing
/// the anchor: y -> x with <x, facet_normal> = 1 and chart_map(x) = y.
RationalVector chart_inverse(const Chart& chart, const LatticeVector& facet_normal, const RationalVector& y);

/// alpha_tau ∘ alpha_tau'^{-1} on the facet. Throws GeometryError when one of
/// the anchors is not a vertex of the facet.
TransitionMap transition_map(const LatticePolytope& p, std::size_t facet, std::size_t anchor,
                             std::size_t anchor_prime);

RationalVector apply_transition(const TransitionMap& map, const RationalVector& y);

}  // namespace hessian_ot
