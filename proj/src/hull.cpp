#include "hessian_ot/hull.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace hessian_ot {

namespace {

RationalVector subtract(const RationalVector& a, const RationalVector& b) {
  RationalVector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const IndexSet&)>& f) {
  if (k > n) return;
  IndexSet idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    f(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Rational factorial(std::size_t k) {
  Rational f = 1;
  for (std::size_t i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

int affine_dimension(const PointSet& points) {
  if (points.empty()) return -1;
  RationalMatrix diffs;
  for (std::size_t i = 1; i < points.size(); ++i) diffs.push_back(subtract(points[i], points[0]));
  return static_cast<int>(rank(diffs));
}

std::vector<HullFacet> hull_facets(const PointSet& points) {
  if (points.empty()) throw std::invalid_argument("hull_facets: empty point set");
  const std::size_t k = points.front().size();
  if (k == 0 || affine_dimension(points) != static_cast<int>(k))
    throw std::invalid_argument("hull_facets: point set is not full-dimensional");

  std::map<IndexSet, HullFacet> found;
  for_each_subset(points.size(), k, [&](const IndexSet& subset) {
    RationalMatrix diffs;
    for (std::size_t i = 1; i < subset.size(); ++i)
      diffs.push_back(subtract(points[subset[i]], points[subset[0]]));
    auto null = nullspace(diffs, k);
    if (null.size() != 1) return;
    RationalVector normal = null.front();
    Rational offset = dot(normal, points[subset[0]]);
    bool above = false, below = false;
    IndexSet on;
    for (std::size_t i = 0; i < points.size(); ++i) {
      Rational s = dot(normal, points[i]) - offset;
      if (s > 0) above = true;
      else if (s < 0) below = true;
      else on.push_back(i);
      if (above && below) return;
    }
    if (above) {
      for (auto& x : normal) x = -x;
      offset = -offset;
    }
    if (found.count(on)) return;
    found.emplace(on, HullFacet{std::move(normal), std::move(offset), on});
  });

  std::vector<HullFacet> facets;
  for (auto& [key, facet] : found) facets.push_back(std::move(facet));
  return facets;
}

IndexSet extreme_points(const PointSet& points) {
  IndexSet unique;
  for (std::size_t i = 0; i < points.size(); ++i) {
    bool dup = false;
    for (auto j : unique)
      if (points[j] == points[i]) {
        dup = true;
        break;
      }
    if (!dup) unique.push_back(i);
  }
  if (unique.size() <= 1) return unique;

  PointSet distinct;
  for (auto i : unique) distinct.push_back(points[i]);
  PointSet coords = affine_coordinates(distinct);
  const std::size_t dim = coords.front().size();
  if (dim == 0) return {unique.front()};

  auto facets = hull_facets(coords);
  IndexSet result;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    RationalMatrix normals;
    for (const auto& f : facets)
      if (std::binary_search(f.points.begin(), f.points.end(), i)) normals.push_back(f.normal);
    if (rank(normals) == dim) result.push_back(unique[i]);
  }
  return result;
}

PointSet affine_coordinates(const PointSet& points) {
  if (points.empty()) return {};
  const std::size_t n = points.front().size();
  // Greedy affine basis.
  RationalMatrix basis;
  for (std::size_t i = 1; i < points.size(); ++i) {
    auto candidate = basis;
    candidate.push_back(subtract(points[i], points[0]));
    if (rank(candidate) > basis.size()) basis = std::move(candidate);
  }
  const std::size_t dim = basis.size();
  if (dim == 0) return PointSet(points.size(), RationalVector{});
  // Pick dim coordinate columns on which the basis is invertible.
  std::vector<std::size_t> cols;
  for (std::size_t c = 0; c < n && cols.size() < dim; ++c) {
    auto trial = cols;
    trial.push_back(c);
    RationalMatrix sub;
    for (const auto& b : basis) {
      RationalVector row;
      for (auto t : trial) row.push_back(b[t]);
      sub.push_back(row);
    }
    if (rank(transpose(sub)) == trial.size()) cols = std::move(trial);
  }
  RationalMatrix square(dim, RationalVector(dim));
  for (std::size_t r = 0; r < dim; ++r)
    for (std::size_t j = 0; j < dim; ++j) square[r][j] = basis[j][cols[r]];
  PointSet out;
  out.reserve(points.size());
  for (const auto& p : points) {
    auto d = subtract(p, points[0]);
    RationalVector rhs;
    for (auto c : cols) rhs.push_back(d[c]);
    auto x = solve(square, rhs);
    if (!x) throw std::logic_error("affine_coordinates: singular basis");
    out.push_back(std::move(*x));
  }
  return out;
}

std::vector<IndexSet> triangulate(const PointSet& points) {
  if (points.empty()) return {};
  const std::size_t k = points.front().size();
  if (affine_dimension(points) != static_cast<int>(k))
    throw std::invalid_argument("triangulate: point set is not full-dimensional");
  if (k == 0) return {{0}};
  if (k == 1) {
    auto [lo, hi] = std::minmax_element(points.begin(), points.end(),
                                        [](const auto& a, const auto& b) { return a[0] < b[0]; });
    return {{static_cast<std::size_t>(lo - points.begin()), static_cast<std::size_t>(hi - points.begin())}};
  }
  const std::size_t apex = extreme_points(points).front();
  std::vector<IndexSet> simplices;
  for (const auto& facet : hull_facets(points)) {
    if (std::binary_search(facet.points.begin(), facet.points.end(), apex)) continue;
    PointSet sub;
    for (auto i : facet.points) sub.push_back(points[i]);
    for (const auto& s : triangulate(affine_coordinates(sub))) {
      IndexSet simplex;
      for (auto local : s) simplex.push_back(facet.points[local]);
      simplex.push_back(apex);
      simplices.push_back(std::move(simplex));
    }
  }
  return simplices;
}

Rational simplex_volume(const PointSet& vertices) {
  if (vertices.empty()) return 0;
  const std::size_t k = vertices.size() - 1;
  if (k == 0) return 1;
  RationalMatrix m;
  for (std::size_t i = 1; i < vertices.size(); ++i) m.push_back(subtract(vertices[i], vertices[0]));
  Rational det = determinant(m);
  if (det < 0) det = -det;
  return det / factorial(k);
}

Rational convex_volume(const PointSet& points) {
  if (points.empty()) return 0;
  const std::size_t k = points.front().size();
  if (k == 0) return 1;
  if (affine_dimension(points) != static_cast<int>(k)) return 0;
  Rational total = 0;
  for (const auto& s : triangulate(points)) {
    PointSet simplex;
    for (auto i : s) simplex.push_back(points[i]);
    total += simplex_volume(simplex);
  }
  return total;
}

IndexSet counterclockwise_order(const PointSet& polygon) {
  const std::size_t n = polygon.size();
  if (n == 0) return {};
  RationalVector center(2, Rational(0));
  for (const auto& p : polygon) {
    center[0] += p[0];
    center[1] += p[1];
  }
  center[0] /= n;
  center[1] /= n;
  auto half = [&](std::size_t i) {
    Rational dx = polygon[i][0] - center[0], dy = polygon[i][1] - center[1];
    return (dy > 0 || (dy == 0 && dx > 0)) ? 0 : 1;
  };
  IndexSet order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    int ha = half(a), hb = half(b);
    if (ha != hb) return ha < hb;
    Rational ax = polygon[a][0] - center[0], ay = polygon[a][1] - center[1];
    Rational bx = polygon[b][0] - center[0], by = polygon[b][1] - center[1];
    return ax * by - ay * bx > 0;
  });
  return order;
}

}  // namespace hessian_ot
