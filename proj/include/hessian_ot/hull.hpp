#pragma once

// Exact convex-hull helpers for small point sets in Q^k (k <= 4 in practice).
// Everything is brute force over k-subsets; inputs are desk-sized.

#include <cstddef>
#include <vector>

#include "hessian_ot/exact.hpp"

namespace hessian_ot {

using PointSet = std::vector<RationalVector>;
using IndexSet = std::vector<std::size_t>;

struct HullFacet {
  RationalVector normal;  // outward: normal . x <= offset on the hull
  Rational offset;
  IndexSet points;        // sorted indices of points on the facet
};

/// Dimension of the affine span; -1 for an empty set.
int affine_dimension(const PointSet& points);

/// Facets of conv(points). The set must be full-dimensional in its ambient
/// space of dimension k >= 1.
std::vector<HullFacet> hull_facets(const PointSet& points);

/// Indices of the extreme points, with duplicates collapsed to their first
/// occurrence. Works for any affine dimension.
IndexSet extreme_points(const PointSet& points);

/// Coordinates of the points in an affine basis of their span, so the result
/// is full-dimensional in Q^dim. Affine maps preserve volume ratios but not
/// volumes; use only where ratios or combinatorics matter.
PointSet affine_coordinates(const PointSet& points);

/// Pulling triangulation of conv(points) for a full-dimensional set in Q^k.
/// Each simplex is a list of k+1 point indices.
std::vector<IndexSet> triangulate(const PointSet& points);

/// |det(v_1 - v_0, ..., v_k - v_0)| / k!
Rational simplex_volume(const PointSet& vertices);

/// k-dimensional Lebesgue volume of conv(points) in Q^k; 0 when the set is
/// not full-dimensional. For k = 0 the volume of a point is 1.
Rational convex_volume(const PointSet& points);

/// Vertices of a 2D convex polygon in counterclockwise order.
IndexSet counterclockwise_order(const PointSet& polygon);

}  // namespace hessian_ot
