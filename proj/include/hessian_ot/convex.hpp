#pragma once

// Piecewise-linear convex analysis over exact rationals: max-affine
// functions, Legendre and c-transforms, subgradients and the Monge-Ampère
// measure of a max-affine function.

#include <optional>
#include <stdexcept>
#include <vector>

#include "hessian_ot/exact.hpp"
#include "hessian_ot/hull.hpp"

namespace hessian_ot {

struct AffinePiece {
  RationalVector slope;
  Rational intercept;
};

/// Closed halfspace {x : <normal, x> <= offset}.
struct Halfspace {
  RationalVector normal;
  Rational offset;
};

/// f(x) = max_i <a_i, x> + b_i on an effective domain that is either all of
/// R^d or a bounded full-dimensional polytope given by its vertices; +inf
/// outside the domain.
class MaxAffineFunction {
 public:
  explicit MaxAffineFunction(std::vector<AffinePiece> pieces, std::optional<PointSet> domain = std::nullopt);

  std::size_t dimension() const { return dimension_; }
  const std::vector<AffinePiece>& pieces() const { return pieces_; }
  const std::optional<PointSet>& domain() const { return domain_; }
  const std::vector<Halfspace>& domain_halfspaces() const { return halfspaces_; }

  bool in_domain(const RationalVector& x) const;
  /// nullopt stands for +inf.
  std::optional<Rational> evaluate(const RationalVector& x) const;
  /// Indices of the pieces attaining the max at x (x assumed in the domain).
  IndexSet active(const RationalVector& x) const;

  /// Drops pieces whose linearity region is lower-dimensional.
  MaxAffineFunction normalized() const;

 private:
  std::size_t dimension_ = 0;
  std::vector<AffinePiece> pieces_;
  std::optional<PointSet> domain_;
  std::vector<Halfspace> halfspaces_;
};

/// A vertex of the linearity complex together with the pieces active there.
struct ComplexVertex {
  RationalVector point;
  Rational value;
  IndexSet active;
};

struct SubdifferentialComplex {
  std::vector<ComplexVertex> vertices;  // vertices of the epigraph, domain corners included
  /// For each piece, the inequalities cutting out its linearity region.
  std::vector<std::vector<Halfspace>> cells;
};

SubdifferentialComplex subdifferential_complex(const MaxAffineFunction& f);

/// f*(y) = sup_x <x, y> - f(x). A bounded domain gives an f* finite
/// everywhere; the whole-space case gives f* on conv(slopes) and throws
/// std::domain_error("empty effective domain") when the slopes do not span.
MaxAffineFunction legendre_transform(const MaxAffineFunction& f);

/// Vertices of ∂f(x) = conv(active slopes). Throws std::domain_error when x is
/// outside the domain.
PointSet subgradient(const MaxAffineFunction& f, const RationalVector& x);

struct Atom {
  RationalVector point;
  Rational mass;
};

struct AtomicMeasure {
  std::vector<Atom> atoms;
  Rational total() const;
};

/// Atoms at the vertices of the linearity complex lying in the closed region
/// (a polytope given by vertices; the whole domain when omitted), each with
/// mass vol(∂f(v)).
AtomicMeasure ma_measure(const MaxAffineFunction& f, const std::optional<PointSet>& region = std::nullopt);

/// x -> linear * x + translation.
struct AffineMap {
  RationalMatrix linear;
  RationalVector translation;
};

MaxAffineFunction compose(const MaxAffineFunction& f, const AffineMap& map);

/// MA(f ∘ L) == (L^{-1})_# MA(f), compared exactly. Throws
/// std::invalid_argument when |det L| != 1.
bool affine_invariance_check(const MaxAffineFunction& f, const AffineMap& map);

/// Φ^c(n) = max_{m in S} <m, n> - Φ(m) for every target n.
std::vector<Rational> c_transform(const PointSet& support, const std::vector<Rational>& phi, const PointSet& targets);

/// Argmax set of <m, n> - Φ(m) over the support.
IndexSet c_gradient(const PointSet& support, const std::vector<Rational>& phi, const RationalVector& n);

}  // namespace hessian_ot
