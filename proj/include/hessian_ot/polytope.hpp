#pragma once

// Exact lattice-polytope geometry: facets, polar duality, reflexivity, face
// incidence, Star sets and the parallel measure on the boundary.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hessian_ot/exact.hpp"
#include "hessian_ot/hull.hpp"

namespace hessian_ot {

/// Raised when a polytope cannot take part in reflexive duality.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Supporting hyperplane {x : <normal, x> = offset} with a primitive integral
/// normal; the polytope lies on the side <normal, x> <= offset.
struct SupportingHyperplane {
  LatticeVector normal;
  Integer offset;
  IndexSet vertices;
};

/// A facet in reflexive normalization: <v, normal> = 1 exactly on its vertices
/// and < 1 on every other vertex.
struct Facet {
  IndexSet vertex_indices;
  RationalVector normal;
};

/// Full-dimensional convex hull of finitely many lattice points. The stored
/// vertices are exactly the extreme points, in first-occurrence order of the
/// input. Immutable after construction.
class LatticePolytope {
 public:
  /// Throws GeometryError when the points are not full-dimensional.
  explicit LatticePolytope(std::vector<LatticeVector> points);

  std::size_t ambient_dimension() const { return dimension_; }
  const std::vector<LatticeVector>& vertices() const { return vertices_; }
  const std::vector<SupportingHyperplane>& hyperplanes() const { return hyperplanes_; }
  bool origin_in_interior() const;

  /// Index of a vertex, or nullopt when the point is not a vertex.
  std::optional<std::size_t> vertex_index(const LatticeVector& point) const;

 private:
  std::size_t dimension_ = 0;
  std::vector<LatticeVector> vertices_;
  std::vector<SupportingHyperplane> hyperplanes_;
};

std::vector<Facet> enumerate_facets(const LatticePolytope& p);

/// Requires a reflexive input. Vertex i of the dual is the normal of facet i.
LatticePolytope dual_polytope(const LatticePolytope& p);

bool is_reflexive(const LatticePolytope& p);

/// Facets containing the vertex; throws std::out_of_range if v is not a vertex.
IndexSet star(const LatticePolytope& p, std::size_t vertex);
IndexSet star(const LatticePolytope& p, const LatticeVector& vertex);

/// Rows are vertices m of p, columns are facets sigma of p (vertices n_sigma
/// of the dual); entries <m, n_sigma>.
IntegerMatrix vertex_facet_pairing(const LatticePolytope& p);

/// Index of the facet whose reflexive normal equals `normal`.
std::optional<std::size_t> facet_with_normal(const LatticePolytope& p, const LatticeVector& normal);

struct Face {
  IndexSet vertices;
  int dimension = 0;
  IndexSet facets;    // facets containing this face
  IndexSet cofaces;   // indices into the next dimension's face list
};

/// Proper faces of dimension 0..D-1, each an intersection of facets.
struct FaceLattice {
  std::vector<std::vector<Face>> by_dimension;
};

FaceLattice face_lattice(const LatticePolytope& p);

/// Lebesgue volume of the facet in the integral chart of its lowest-index
/// vertex (any chart with anchor on the facet gives the same value).
Rational relative_lattice_volume(const LatticePolytope& p, std::size_t facet);

/// Same volume measured in the chart anchored at a given vertex of the facet.
Rational relative_lattice_volume(const LatticePolytope& p, std::size_t facet, std::size_t anchor_vertex);

struct ParallelMeasure {
  std::vector<Rational> facet_weights;  // indexed like enumerate_facets
};

ParallelMeasure parallel_measure(const LatticePolytope& p);

}  // namespace hessian_ot
