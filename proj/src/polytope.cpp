#include "hessian_ot/polytope.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>

#include "hessian_ot/atlas.hpp"

namespace hessian_ot {

namespace {

LatticeVector subtract(const LatticeVector& a, const LatticeVector& b) {
  LatticeVector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

// Normal of the hyperplane through D points via cofactor expansion of the
// (D-1) x D difference matrix. Zero when the points are affinely dependent.
LatticeVector cofactor_normal(const std::vector<LatticeVector>& pts, const IndexSet& subset) {
  const std::size_t dim = pts.front().size();
  IntegerMatrix diffs;
  for (std::size_t i = 1; i < subset.size(); ++i) diffs.push_back(subtract(pts[subset[i]], pts[subset[0]]));
  LatticeVector normal(dim);
  for (std::size_t col = 0; col < dim; ++col) {
    IntegerMatrix minor;
    for (const auto& row : diffs) {
      LatticeVector r;
      for (std::size_t c = 0; c < dim; ++c)
        if (c != col) r.push_back(row[c]);
      minor.push_back(std::move(r));
    }
    Integer det = determinant(minor);
    normal[col] = (col % 2 == 0) ? det : Integer(-det);
  }
  return normal;
}

bool next_subset(IndexSet& idx, std::size_t n) {
  const std::size_t k = idx.size();
  std::size_t i = k;
  while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
  if (i == 0) return false;
  ++idx[i - 1];
  for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  return true;
}

std::vector<SupportingHyperplane> integer_hull(const std::vector<LatticeVector>& pts) {
  const std::size_t dim = pts.front().size();
  std::map<IndexSet, SupportingHyperplane> found;
  IndexSet subset(dim);
  for (std::size_t i = 0; i < dim; ++i) subset[i] = i;
  if (pts.size() < dim) return {};
  do {
    LatticeVector normal = cofactor_normal(pts, subset);
    Integer g = gcd_of(normal);
    if (g == 0) continue;
    for (auto& x : normal) x /= g;
    Integer offset = dot(normal, pts[subset[0]]);
    bool above = false, below = false;
    IndexSet on;
    for (std::size_t i = 0; i < pts.size() && !(above && below); ++i) {
      Integer s = dot(normal, pts[i]) - offset;
      if (s > 0) above = true;
      else if (s < 0) below = true;
      else on.push_back(i);
    }
    if (above && below) continue;
    if (above) {
      for (auto& x : normal) x = -x;
      offset = -offset;
    }
    found.try_emplace(on, SupportingHyperplane{normal, offset, on});
  } while (next_subset(subset, pts.size()));

  std::vector<SupportingHyperplane> out;
  for (auto& [key, h] : found) out.push_back(std::move(h));
  return out;
}

}  // namespace

LatticePolytope::LatticePolytope(std::vector<LatticeVector> points) {
  if (points.empty()) throw GeometryError("polytope needs at least one point");
  dimension_ = points.front().size();
  if (dimension_ == 0) throw GeometryError("polytope must have positive ambient dimension");
  for (const auto& p : points)
    if (p.size() != dimension_) throw GeometryError("points have inconsistent dimensions");

  std::vector<LatticeVector> distinct;
  for (auto& p : points)
    if (std::find(distinct.begin(), distinct.end(), p) == distinct.end()) distinct.push_back(std::move(p));
  if (affine_dimension(PointSet(to_rational(distinct))) != static_cast<int>(dimension_))
    throw GeometryError("polytope is not full-dimensional");

  auto hull = integer_hull(distinct);
  // Keep exactly the points whose incident facet normals span the space.
  std::vector<std::size_t> new_index(distinct.size(), SIZE_MAX);
  for (std::size_t i = 0; i < distinct.size(); ++i) {
    IntegerMatrix normals;
    for (const auto& h : hull)
      if (std::binary_search(h.vertices.begin(), h.vertices.end(), i)) normals.push_back(h.normal);
    if (rank(to_rational(normals)) == dimension_) {
      new_index[i] = vertices_.size();
      vertices_.push_back(distinct[i]);
    }
  }
  for (auto& h : hull) {
    IndexSet kept;
    for (auto i : h.vertices)
      if (new_index[i] != SIZE_MAX) kept.push_back(new_index[i]);
    h.vertices = std::move(kept);
  }
  std::sort(hull.begin(), hull.end(), [](const auto& a, const auto& b) { return a.vertices < b.vertices; });
  hyperplanes_ = std::move(hull);
}

bool LatticePolytope::origin_in_interior() const {
  return std::all_of(hyperplanes_.begin(), hyperplanes_.end(), [](const auto& h) { return h.offset > 0; });
}

std::optional<std::size_t> LatticePolytope::vertex_index(const LatticeVector& point) const {
  auto it = std::find(vertices_.begin(), vertices_.end(), point);
  if (it == vertices_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - vertices_.begin());
}

std::vector<Facet> enumerate_facets(const LatticePolytope& p) {
  if (!p.origin_in_interior())
    throw GeometryError("origin is not interior: not a valid candidate for reflexive duality");
  std::vector<Facet> facets;
  facets.reserve(p.hyperplanes().size());
  for (const auto& h : p.hyperplanes()) {
    RationalVector normal;
    for (const auto& x : h.normal) normal.emplace_back(x, h.offset);
    facets.push_back(Facet{h.vertices, std::move(normal)});
  }
  return facets;
}

bool is_reflexive(const LatticePolytope& p) {
  if (!p.origin_in_interior()) return false;
  // primitive normal / offset is integral iff offset == 1
  return std::all_of(p.hyperplanes().begin(), p.hyperplanes().end(), [](const auto& h) { return h.offset == 1; });
}

LatticePolytope dual_polytope(const LatticePolytope& p) {
  if (!is_reflexive(p)) throw GeometryError("polytope is not reflexive");
  std::vector<LatticeVector> normals;
  for (const auto& h : p.hyperplanes()) normals.push_back(h.normal);
  return LatticePolytope(std::move(normals));
}

IndexSet star(const LatticePolytope& p, std::size_t vertex) {
  if (vertex >= p.vertices().size()) throw std::out_of_range("star: index is not a vertex");
  IndexSet out;
  for (std::size_t f = 0; f < p.hyperplanes().size(); ++f) {
    const auto& vs = p.hyperplanes()[f].vertices;
    if (std::binary_search(vs.begin(), vs.end(), vertex)) out.push_back(f);
  }
  return out;
}

IndexSet star(const LatticePolytope& p, const LatticeVector& vertex) {
  auto idx = p.vertex_index(vertex);
  if (!idx) throw std::out_of_range("star: point is not a vertex");
  return star(p, *idx);
}

IntegerMatrix vertex_facet_pairing(const LatticePolytope& p) {
  if (!is_reflexive(p)) throw GeometryError("polytope is not reflexive");
  IntegerMatrix m;
  for (const auto& v : p.vertices()) {
    LatticeVector row;
    for (const auto& h : p.hyperplanes()) row.push_back(dot(v, h.normal));
    m.push_back(std::move(row));
  }
  return m;
}

std::optional<std::size_t> facet_with_normal(const LatticePolytope& p, const LatticeVector& normal) {
  for (std::size_t f = 0; f < p.hyperplanes().size(); ++f) {
    const auto& h = p.hyperplanes()[f];
    if (h.offset == 1 && h.normal == normal) return f;
  }
  return std::nullopt;
}

FaceLattice face_lattice(const LatticePolytope& p) {
  const std::size_t dim = p.ambient_dimension();
  std::set<IndexSet> faces;
  for (const auto& h : p.hyperplanes()) faces.insert(h.vertices);
  std::vector<IndexSet> frontier(faces.begin(), faces.end());
  while (!frontier.empty()) {
    std::vector<IndexSet> next;
    for (const auto& a : frontier) {
      for (const auto& h : p.hyperplanes()) {
        IndexSet meet;
        std::set_intersection(a.begin(), a.end(), h.vertices.begin(), h.vertices.end(), std::back_inserter(meet));
        if (!meet.empty() && faces.insert(meet).second) next.push_back(meet);
      }
    }
    frontier = std::move(next);
  }

  FaceLattice lattice;
  lattice.by_dimension.resize(dim);
  for (const auto& vs : faces) {
    PointSet pts;
    for (auto i : vs) pts.push_back(to_rational(p.vertices()[i]));
    int d = affine_dimension(pts);
    Face face{vs, d, {}, {}};
    for (std::size_t f = 0; f < p.hyperplanes().size(); ++f) {
      const auto& fv = p.hyperplanes()[f].vertices;
      if (std::includes(fv.begin(), fv.end(), vs.begin(), vs.end())) face.facets.push_back(f);
    }
    lattice.by_dimension[static_cast<std::size_t>(d)].push_back(std::move(face));
  }
  for (std::size_t d = 0; d + 1 < dim; ++d) {
    for (auto& face : lattice.by_dimension[d]) {
      const auto& upper = lattice.by_dimension[d + 1];
      for (std::size_t j = 0; j < upper.size(); ++j)
        if (std::includes(upper[j].vertices.begin(), upper[j].vertices.end(), face.vertices.begin(),
                          face.vertices.end()))
          face.cofaces.push_back(j);
    }
  }
  return lattice;
}

Rational relative_lattice_volume(const LatticePolytope& p, std::size_t facet, std::size_t anchor_vertex) {
  if (!is_reflexive(p)) throw GeometryError("polytope is not reflexive");
  const auto& vs = p.hyperplanes().at(facet).vertices;
  if (!std::binary_search(vs.begin(), vs.end(), anchor_vertex))
    throw GeometryError("chart anchor is not a vertex of the facet");
  Chart chart = make_chart(p, anchor_vertex);
  PointSet image;
  for (auto v : vs) image.push_back(to_rational(chart_map(chart, p.vertices()[v])));
  return convex_volume(image);
}

Rational relative_lattice_volume(const LatticePolytope& p, std::size_t facet) {
  return relative_lattice_volume(p, facet, p.hyperplanes().at(facet).vertices.front());
}

ParallelMeasure parallel_measure(const LatticePolytope& p) {
  ParallelMeasure m;
  Rational total = 0;
  for (std::size_t f = 0; f < p.hyperplanes().size(); ++f) {
    m.facet_weights.push_back(relative_lattice_volume(p, f));
    total += m.facet_weights.back();
  }
  for (auto& w : m.facet_weights) w /= total;
  return m;
}

}  // namespace hessian_ot
