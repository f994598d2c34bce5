#include "hessian_ot/convex.hpp"

#include <algorithm>
#include <functional>
#include <map>

namespace hessian_ot {

namespace {

std::vector<Halfspace> halfspaces_of(const PointSet& polytope) {
  std::vector<Halfspace> out;
  for (auto& f : hull_facets(polytope)) out.push_back(Halfspace{std::move(f.normal), std::move(f.offset)});
  return out;
}

bool inside(const std::vector<Halfspace>& hs, const RationalVector& x) {
  return std::all_of(hs.begin(), hs.end(), [&](const Halfspace& h) { return dot(h.normal, x) <= h.offset; });
}

void for_each_subset(std::size_t n, std::size_t k, const std::function<void(const IndexSet&)>& f) {
  if (k > n || k == 0) return;
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

RationalVector mat_vec(const RationalMatrix& a, const RationalVector& x) {
  RationalVector y(a.size(), Rational(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

bool atom_less(const Atom& a, const Atom& b) {
  if (a.point != b.point) return a.point < b.point;
  return a.mass < b.mass;
}

}  // namespace

MaxAffineFunction::MaxAffineFunction(std::vector<AffinePiece> pieces, std::optional<PointSet> domain)
    : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw std::invalid_argument("max-affine function needs at least one piece");
  dimension_ = pieces_.front().slope.size();
  if (dimension_ == 0) throw std::invalid_argument("max-affine function needs positive dimension");
  for (const auto& p : pieces_)
    if (p.slope.size() != dimension_) throw std::invalid_argument("pieces have inconsistent dimensions");
  if (domain) {
    for (const auto& v : *domain)
      if (v.size() != dimension_) throw std::invalid_argument("domain has the wrong dimension");
    if (affine_dimension(*domain) != static_cast<int>(dimension_))
      throw std::invalid_argument("domain is not full-dimensional");
    PointSet corners;
    for (auto i : extreme_points(*domain)) corners.push_back((*domain)[i]);
    domain_ = std::move(corners);
    halfspaces_ = halfspaces_of(*domain_);
  }
}

bool MaxAffineFunction::in_domain(const RationalVector& x) const {
  return x.size() == dimension_ && inside(halfspaces_, x);
}

std::optional<Rational> MaxAffineFunction::evaluate(const RationalVector& x) const {
  if (!in_domain(x)) return std::nullopt;
  Rational best = dot(pieces_.front().slope, x) + pieces_.front().intercept;
  for (std::size_t i = 1; i < pieces_.size(); ++i) best = std::max(best, dot(pieces_[i].slope, x) + pieces_[i].intercept);
  return best;
}

IndexSet MaxAffineFunction::active(const RationalVector& x) const {
  std::vector<Rational> values;
  for (const auto& p : pieces_) values.push_back(dot(p.slope, x) + p.intercept);
  const Rational best = *std::max_element(values.begin(), values.end());
  IndexSet out;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] == best) out.push_back(i);
  return out;
}

MaxAffineFunction MaxAffineFunction::normalized() const {
  MaxAffineFunction twice = legendre_transform(legendre_transform(*this));
  std::vector<AffinePiece> kept;
  for (const auto& p : pieces_) {
    bool essential = std::any_of(twice.pieces().begin(), twice.pieces().end(), [&](const AffinePiece& q) {
      return q.slope == p.slope && q.intercept == p.intercept;
    });
    bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const AffinePiece& q) {
      return q.slope == p.slope && q.intercept == p.intercept;
    });
    if (essential && !duplicate) kept.push_back(p);
  }
  return MaxAffineFunction(std::move(kept), domain_);
}

SubdifferentialComplex subdifferential_complex(const MaxAffineFunction& f) {
  const std::size_t d = f.dimension();
  const auto& pieces = f.pieces();
  const auto& hs = f.domain_halfspaces();
  // Constraint rows in (x, t): pieces first (<a, x> - t = -b), then domain walls.
  RationalMatrix rows;
  RationalVector rhs;
  for (const auto& p : pieces) {
    RationalVector r = p.slope;
    r.push_back(-1);
    rows.push_back(std::move(r));
    rhs.push_back(-p.intercept);
  }
  for (const auto& h : hs) {
    RationalVector r = h.normal;
    r.push_back(0);
    rows.push_back(std::move(r));
    rhs.push_back(h.offset);
  }

  std::map<RationalVector, ComplexVertex> found;
  for_each_subset(rows.size(), d + 1, [&](const IndexSet& subset) {
    if (subset.front() >= pieces.size()) return;  // t must be pinned by some piece
    RationalMatrix a;
    RationalVector b;
    for (auto i : subset) {
      a.push_back(rows[i]);
      b.push_back(rhs[i]);
    }
    auto sol = solve(a, b);
    if (!sol) return;
    RationalVector x(sol->begin(), sol->begin() + static_cast<std::ptrdiff_t>(d));
    if (found.count(x) || !inside(hs, x)) return;
    auto value = f.evaluate(x);
    if (!value || *value != sol->back()) return;
    found.emplace(x, ComplexVertex{x, *value, f.active(x)});
  });

  SubdifferentialComplex complex;
  for (auto& [key, v] : found) complex.vertices.push_back(std::move(v));
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    std::vector<Halfspace> cell = hs;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      if (j == i) continue;
      RationalVector n(d);
      for (std::size_t k = 0; k < d; ++k) n[k] = pieces[j].slope[k] - pieces[i].slope[k];
      cell.push_back(Halfspace{std::move(n), pieces[i].intercept - pieces[j].intercept});
    }
    complex.cells.push_back(std::move(cell));
  }
  return complex;
}

MaxAffineFunction legendre_transform(const MaxAffineFunction& f) {
  std::optional<PointSet> dual_domain;
  if (!f.domain()) {
    PointSet slopes;
    for (const auto& p : f.pieces()) slopes.push_back(p.slope);
    if (affine_dimension(slopes) != static_cast<int>(f.dimension()))
      throw std::domain_error("empty effective domain");
    dual_domain = std::move(slopes);
  }
  std::vector<AffinePiece> pieces;
  for (const auto& v : subdifferential_complex(f).vertices) pieces.push_back(AffinePiece{v.point, -v.value});
  return MaxAffineFunction(std::move(pieces), std::move(dual_domain));
}

PointSet subgradient(const MaxAffineFunction& f, const RationalVector& x) {
  if (!f.in_domain(x)) throw std::domain_error("subgradient: point outside the effective domain");
  PointSet slopes;
  for (auto i : f.active(x)) slopes.push_back(f.pieces()[i].slope);
  PointSet out;
  for (auto i : extreme_points(slopes)) out.push_back(slopes[i]);
  std::sort(out.begin(), out.end());
  return out;
}

Rational AtomicMeasure::total() const {
  Rational sum = 0;
  for (const auto& a : atoms) sum += a.mass;
  return sum;
}

AtomicMeasure ma_measure(const MaxAffineFunction& f, const std::optional<PointSet>& region) {
  std::vector<Halfspace> bounds;
  if (region) {
    if (region->empty()) return {};
    if (affine_dimension(*region) != static_cast<int>(f.dimension()))
      throw std::invalid_argument("ma_measure: region is not full-dimensional");
    bounds = halfspaces_of(*region);
  }
  AtomicMeasure mu;
  for (const auto& v : subdifferential_complex(f).vertices) {
    if (!inside(bounds, v.point)) continue;
    PointSet slopes;
    for (auto i : v.active) slopes.push_back(f.pieces()[i].slope);
    Rational mass = convex_volume(slopes);
    if (mass > 0) mu.atoms.push_back(Atom{v.point, mass});
  }
  return mu;
}

MaxAffineFunction compose(const MaxAffineFunction& f, const AffineMap& map) {
  const std::size_t d = f.dimension();
  if (map.linear.size() != d || map.translation.size() != d)
    throw std::invalid_argument("compose: map has the wrong dimension");
  auto inv = inverse(map.linear);
  if (!inv) throw std::invalid_argument("compose: map is not invertible");
  RationalMatrix at = transpose(map.linear);
  std::vector<AffinePiece> pieces;
  for (const auto& p : f.pieces())
    pieces.push_back(AffinePiece{mat_vec(at, p.slope), dot(p.slope, map.translation) + p.intercept});
  std::optional<PointSet> domain;
  if (f.domain()) {
    domain.emplace();
    for (const auto& v : *f.domain()) {
      RationalVector shifted(d);
      for (std::size_t k = 0; k < d; ++k) shifted[k] = v[k] - map.translation[k];
      domain->push_back(mat_vec(*inv, shifted));
    }
  }
  return MaxAffineFunction(std::move(pieces), std::move(domain));
}

bool affine_invariance_check(const MaxAffineFunction& f, const AffineMap& map) {
  Rational det = determinant(map.linear);
  if (det != 1 && det != -1) throw std::invalid_argument("affine_invariance_check: map is not volume preserving");
  auto lhs = ma_measure(compose(f, map)).atoms;
  auto inv = *inverse(map.linear);
  std::vector<Atom> rhs;
  for (const auto& a : ma_measure(f).atoms) {
    RationalVector shifted(a.point.size());
    for (std::size_t k = 0; k < shifted.size(); ++k) shifted[k] = a.point[k] - map.translation[k];
    rhs.push_back(Atom{mat_vec(inv, shifted), a.mass});
  }
  std::sort(lhs.begin(), lhs.end(), atom_less);
  std::sort(rhs.begin(), rhs.end(), atom_less);
  if (lhs.size() != rhs.size()) return false;
  for (std::size_t i = 0; i < lhs.size(); ++i)
    if (lhs[i].point != rhs[i].point || lhs[i].mass != rhs[i].mass) return false;
  return true;
}

std::vector<Rational> c_transform(const PointSet& support, const std::vector<Rational>& phi, const PointSet& targets) {
  if (support.empty()) throw std::invalid_argument("c_transform: empty support");
  if (phi.size() != support.size()) throw std::invalid_argument("c_transform: one value per support point required");
  std::vector<Rational> out;
  out.reserve(targets.size());
  for (const auto& n : targets) {
    Rational best = dot(support[0], n) - phi[0];
    for (std::size_t i = 1; i < support.size(); ++i) best = std::max(best, dot(support[i], n) - phi[i]);
    out.push_back(best);
  }
  return out;
}

IndexSet c_gradient(const PointSet& support, const std::vector<Rational>& phi, const RationalVector& n) {
  const Rational best = c_transform(support, phi, PointSet{n}).front();
  IndexSet out;
  for (std::size_t i = 0; i < support.size(); ++i)
    if (dot(support[i], n) - phi[i] == best) out.push_back(i);
  return out;
}

}  // namespace hessian_ot
