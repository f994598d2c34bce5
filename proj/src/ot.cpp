#include "hessian_ot/ot.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "hessian_ot/atlas.hpp"
#include "hessian_ot/clip.hpp"

namespace hessian_ot {

namespace {

void check_targets(const std::vector<TargetAtom>& targets, std::size_t dim) {
  if (targets.empty()) throw std::invalid_argument("at least one target atom is required");
  Rational total = 0;
  for (const auto& t : targets) {
    if (t.point.size() != dim) throw std::invalid_argument("target atom has the wrong dimension");
    if (t.mass <= 0) throw std::invalid_argument("target masses must be positive");
    total += t.mass;
  }
  if (total != 1) throw std::invalid_argument("target masses must sum to 1, got " + to_string(total));
}

RationalVector column(const RationalMatrix& m, std::size_t c) {
  RationalVector out;
  for (const auto& row : m) out.push_back(row[c]);
  return out;
}

template <class T>
T from_rational(const Rational& q);
template <>
double from_rational<double>(const Rational& q) {
  return to_double(q);
}
template <>
Rational from_rational<Rational>(const Rational& q) {
  return q;
}

// ---------------------------------------------------------------------------
// Region evaluation, shared by the exact and floating pipelines.

template <class T>
struct LocalRegion {
  std::size_t dimension = 2;
  clip::Polygon<T> polygon;
  clip::Interval<T> interval;
  std::vector<std::array<T, 2>> corners;
  T density, constant;
  std::vector<std::size_t> atom;
  std::vector<std::array<T, 2>> slope;
  std::vector<T> offset;
};

template <class T>
LocalRegion<T> localise(const SourceRegion& r) {
  LocalRegion<T> out;
  out.dimension = r.dimension;
  out.density = from_rational<T>(r.density);
  out.constant = from_rational<T>(r.constant);
  for (const auto& p : r.polygon) {
    std::array<T, 2> c{from_rational<T>(p[0]), r.dimension == 2 ? from_rational<T>(p[1]) : T(0)};
    out.corners.push_back(c);
  }
  if (r.dimension == 2) {
    for (const auto& c : out.corners) {
      out.polygon.vertices.push_back({c[0], c[1]});
      out.polygon.tags.push_back(-1);
    }
  } else {
    out.interval.lo = out.corners[0][0];
    out.interval.hi = out.corners[1][0];
  }
  for (const auto& s : r.sites) {
    out.atom.push_back(s.atom);
    out.slope.push_back({from_rational<T>(s.slope[0]), r.dimension == 2 ? from_rational<T>(s.slope[1]) : T(0)});
    out.offset.push_back(from_rational<T>(s.offset));
  }
  return out;
}

template <class T>
struct LocalPiece {
  std::size_t site = 0;
  T mass;
  T integral;
  std::array<T, 2> centroid;
  std::vector<std::vector<double>> polygon;
};

struct HessianTerm {
  std::size_t j, k;
  double weight;
};

template <class T>
struct RegionOutput {
  std::vector<LocalPiece<T>> pieces;
  std::vector<HessianTerm> hessian;
  T objective;
};

template <class T>
RegionOutput<T> evaluate_region(const LocalRegion<T>& r, const std::vector<T>& psi, bool reverse, bool hessian) {
  const std::size_t n = r.atom.size();
  const std::size_t dim = r.dimension;
  std::vector<T> base(n);
  for (std::size_t s = 0; s < n; ++s) base[s] = r.offset[s] - psi[r.atom[s]];
  auto score = [&](std::size_t s, const std::array<T, 2>& y) { return r.slope[s][0] * y[0] + r.slope[s][1] * y[1] + base[s]; };

  // A site whose best corner value is below some other site's worst corner
  // value is dominated everywhere on the convex region.
  std::vector<T> hi(n), lo(n);
  for (std::size_t s = 0; s < n; ++s) {
    hi[s] = lo[s] = score(s, r.corners[0]);
    for (std::size_t c = 1; c < r.corners.size(); ++c) {
      T v = score(s, r.corners[c]);
      if (v > hi[s]) hi[s] = v;
      if (v < lo[s]) lo[s] = v;
    }
  }
  T floor = *std::max_element(lo.begin(), lo.end());
  std::vector<std::size_t> live;
  for (std::size_t s = 0; s < n; ++s)
    if (!(hi[s] < floor)) live.push_back(s);
  if (reverse) std::reverse(live.begin(), live.end());

  RegionOutput<T> out;
  out.objective = r.constant;
  for (auto s : live) {
    clip::Polygon<T> poly = r.polygon;
    clip::Interval<T> iv = r.interval;
    bool empty = false;
    for (auto t : live) {
      if (t == s) continue;
      T ax = r.slope[t][0] - r.slope[s][0];
      T ay = r.slope[t][1] - r.slope[s][1];
      T b = base[s] - base[t];
      if (ax == 0 && ay == 0) {
        if (b < 0 || (b == 0 && t < s)) empty = true;
      } else if (dim == 2) {
        poly = clip::clip(poly, ax, ay, b, static_cast<long>(t));
        empty = poly.empty();
      } else {
        iv = clip::clip(iv, ax, b, static_cast<long>(t));
        empty = iv.empty();
      }
      if (empty) break;
    }
    if (empty) continue;

    LocalPiece<T> piece;
    piece.site = s;
    T size;
    if (dim == 2) {
      size = clip::area(poly);
      auto c = clip::centroid(poly);
      piece.centroid = {c.x, c.y};
      for (const auto& v : poly.vertices) piece.polygon.push_back({clip::as_double(v.x), clip::as_double(v.y)});
    } else {
      size = iv.hi - iv.lo;
      piece.centroid = {(iv.lo + iv.hi) / 2, T(0)};
      piece.polygon = {{clip::as_double(iv.lo)}, {clip::as_double(iv.hi)}};
    }
    piece.mass = r.density * size;
    piece.integral = piece.mass * (r.slope[s][0] * piece.centroid[0] + r.slope[s][1] * piece.centroid[1] + r.offset[s]);
    out.objective += piece.integral - piece.mass * psi[r.atom[s]];

    if (hessian) {
      auto add = [&](long tag, double length) {
        if (tag < 0) return;
        auto t = static_cast<std::size_t>(tag);
        if (r.atom[t] == r.atom[s]) return;
        double gx = clip::as_double(r.slope[t][0] - r.slope[s][0]);
        double gy = clip::as_double(r.slope[t][1] - r.slope[s][1]);
        double w = clip::as_double(r.density) * length / std::hypot(gx, gy);
        out.hessian.push_back({r.atom[s], r.atom[t], w});
      };
      if (dim == 2) {
        for (std::size_t e = 0; e < poly.vertices.size(); ++e) add(poly.tags[e], clip::edge_length(poly, e));
      } else {
        add(iv.lo_tag, 1.0);
        add(iv.hi_tag, 1.0);
      }
    }
    out.pieces.push_back(std::move(piece));
  }
  return out;
}

template <class T>
std::vector<RegionOutput<T>> evaluate_all(const SemiDiscreteProblem& problem, const std::vector<T>& psi, bool reverse,
                                          bool hessian, unsigned threads) {
  const std::size_t nr = problem.regions.size();
  std::vector<RegionOutput<T>> out(nr);
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < nr; i += step)
      out[i] = evaluate_region(localise<T>(problem.regions[i]), psi, reverse, hessian);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(nr)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  return out;
}

template <class T>
LaguerreDecomposition assemble(const SemiDiscreteProblem& problem, const std::vector<T>& psi,
                               std::vector<RegionOutput<T>> regions, bool reverse, bool hessian) {
  const std::size_t n = problem.targets.size();
  LaguerreDecomposition d;
  d.atom_mass.assign(n, 0.0);
  std::vector<T> mass(n, T(0));
  T objective = 0;
  for (std::size_t j = 0; j < n; ++j) objective += from_rational<T>(problem.targets[j].mass) * psi[j];
  if (hessian) d.hessian.assign(n, std::vector<double>(n, 0.0));

  std::vector<std::size_t> order(regions.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = reverse ? order.size() - 1 - i : i;
  for (auto i : order) {
    auto& r = regions[i];
    const auto& src = problem.regions[i];
    objective += r.objective;
    for (auto& p : r.pieces) {
      const std::size_t atom = src.sites[p.site].atom;
      mass[atom] += p.mass;
      CellPiece piece;
      piece.region = i;
      piece.atom = atom;
      piece.polygon = std::move(p.polygon);
      piece.mass = clip::as_double(p.mass);
      piece.integral = clip::as_double(p.integral);
      piece.centroid = {clip::as_double(p.centroid[0])};
      if (src.dimension == 2) piece.centroid.push_back(clip::as_double(p.centroid[1]));
      if constexpr (std::is_same_v<T, Rational>) {
        piece.exact_mass = p.mass;
        piece.exact_centroid = {p.centroid[0]};
        if (src.dimension == 2) piece.exact_centroid.push_back(p.centroid[1]);
      }
      d.pieces.push_back(std::move(piece));
    }
    for (const auto& h : r.hessian) {
      d.hessian[h.j][h.k] -= h.weight;
      d.hessian[h.j][h.j] += h.weight;
    }
  }
  if (reverse) std::reverse(d.pieces.begin(), d.pieces.end());
  for (std::size_t j = 0; j < n; ++j) d.atom_mass[j] = clip::as_double(mass[j]);
  d.objective = clip::as_double(objective);
  if constexpr (std::is_same_v<T, Rational>) {
    d.arithmetic = Arithmetic::exact;
    d.exact_atom_mass = mass;
    d.exact_objective = objective;
  } else {
    d.arithmetic = Arithmetic::floating;
  }
  return d;
}

// Atom masses of a decomposition in double precision.
std::vector<double> residual_vector(const SemiDiscreteProblem& problem, const LaguerreDecomposition& d) {
  std::vector<double> g(problem.targets.size());
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (d.arithmetic == Arithmetic::exact)
      g[j] = to_double(problem.targets[j].mass - d.exact_atom_mass[j]);
    else
      g[j] = to_double(problem.targets[j].mass) - d.atom_mass[j];
  }
  return g;
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Problem construction

SemiDiscreteProblem make_polytope_problem(const LatticePolytope& delta, std::vector<TargetAtom> targets,
                                          const std::vector<Rational>& facet_factor) {
  const std::size_t dim = delta.ambient_dimension();
  if (dim != 2 && dim != 3) throw std::invalid_argument("polytope transport needs dimension 2 or 3");
  if (!is_reflexive(delta)) throw GeometryError("polytope is not reflexive");
  check_targets(targets, dim);
  const auto& hs = delta.hyperplanes();
  if (!facet_factor.empty() && facet_factor.size() != hs.size())
    throw std::invalid_argument("one density factor per facet is required");

  SemiDiscreteProblem problem;
  problem.kind = SourceKind::polytope;
  problem.ambient_dimension = dim;
  auto weights = parallel_measure(delta).facet_weights;
  if (!facet_factor.empty()) {
    Rational total = 0;
    for (std::size_t f = 0; f < hs.size(); ++f) {
      if (facet_factor[f] < 0) throw std::invalid_argument("density factors must be nonnegative");
      weights[f] *= facet_factor[f];
      total += weights[f];
    }
    if (total == 0) throw std::invalid_argument("density factors vanish everywhere");
    for (auto& w : weights) w /= total;
  }
  problem.facet_mass = weights;

  for (std::size_t f = 0; f < hs.size(); ++f) {
    const auto& h = hs[f];
    Chart chart = make_chart(delta, h.vertices.front());
    IntegerMatrix a{h.normal};
    a.insert(a.end(), chart.basis.begin(), chart.basis.end());
    auto inv = inverse(to_rational(a));
    if (!inv) throw GeometryError("degenerate chart");

    SourceRegion r;
    r.label = f;
    r.dimension = dim - 1;
    r.origin = column(*inv, 0);
    r.frame.assign(dim, RationalVector(dim - 1));
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t k = 0; k + 1 < dim; ++k) r.frame[i][k] = (*inv)[i][k + 1];

    PointSet image;
    for (auto v : h.vertices) image.push_back(to_rational(chart_map(chart, delta.vertices()[v])));
    if (r.dimension == 2) {
      for (auto i : counterclockwise_order(image)) r.polygon.push_back(image[i]);
    } else {
      auto [lo, hi] = std::minmax_element(image.begin(), image.end());
      r.polygon = {*lo, *hi};
    }
    r.density = weights[f] / convex_volume(image);
    r.constant = 0;
    for (std::size_t j = 0; j < targets.size(); ++j) {
      Site s;
      s.atom = j;
      for (std::size_t k = 0; k + 1 < dim; ++k) s.slope.push_back(dot(column(r.frame, k), targets[j].point));
      s.offset = dot(r.origin, targets[j].point);
      r.sites.push_back(std::move(s));
    }
    problem.regions.push_back(std::move(r));
  }
  problem.targets = std::move(targets);
  return problem;
}

SemiDiscreteProblem make_torus_problem(const TorusDensity& density, std::vector<TargetAtom> targets) {
  const std::size_t d = density.dimension;
  if (d != 1 && d != 2) throw std::invalid_argument("torus dimension must be 1 or 2");
  check_targets(targets, d);
  for (const auto& t : targets)
    for (const auto& x : t.point)
      if (x < 0 || x >= 1) throw std::invalid_argument("torus atoms must lie in [0, 1)^d");

  const std::size_t n = density.grid == 0 ? 1 : density.grid;
  std::size_t cells = d == 1 ? n : n * n;
  std::vector<Rational> mass(cells, Rational(1, static_cast<long>(cells)));
  if (density.grid != 0) {
    if (density.values.size() != cells) throw std::invalid_argument("grid density has the wrong number of values");
    Rational total = 0;
    for (const auto& v : density.values) {
      if (v < 0) throw std::invalid_argument("grid density must be nonnegative");
      total += v;
    }
    if (total == 0) throw std::invalid_argument("grid density vanishes everywhere");
    for (std::size_t c = 0; c < cells; ++c) mass[c] = density.values[c] / total;
  }

  SemiDiscreteProblem problem;
  problem.kind = SourceKind::torus;
  problem.ambient_dimension = d;
  const Rational h(1, static_cast<long>(n));
  auto cube = [](const Rational& a, const Rational& b) { return (b * b * b - a * a * a) / 6; };
  for (std::size_t c = 0; c < cells; ++c) {
    if (mass[c] == 0) continue;
    SourceRegion r;
    r.label = c;
    r.dimension = d;
    r.origin.assign(d, Rational(0));
    r.frame.assign(d, RationalVector(d, Rational(0)));
    for (std::size_t i = 0; i < d; ++i) r.frame[i][i] = 1;
    const Rational x0 = h * static_cast<long>(c % n), x1 = x0 + h;
    if (d == 1) {
      r.polygon = {{x0}, {x1}};
      r.density = mass[c] / h;
      r.constant = -r.density * cube(x0, x1);
    } else {
      const Rational y0 = h * static_cast<long>(c / n), y1 = y0 + h;
      r.polygon = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
      r.density = mass[c] / (h * h);
      r.constant = -r.density * (h * cube(x0, x1) + h * cube(y0, y1));
    }
    for (std::size_t j = 0; j < targets.size(); ++j) {
      const int images = d == 1 ? 3 : 9;
      for (int k = 0; k < images; ++k) {
        RationalVector z = targets[j].point;
        z[0] += (k % 3) - 1;
        if (d == 2) z[1] += (k / 3) - 1;
        Site s;
        s.atom = j;
        s.slope = z;
        s.offset = -dot(z, z) / 2;
        r.sites.push_back(std::move(s));
      }
    }
    problem.regions.push_back(std::move(r));
  }
  problem.targets = std::move(targets);
  return problem;
}

double torus_cost(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("torus_cost: dimension mismatch");
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double diff = x[i] - y[i];
    diff -= std::round(diff);
    total += diff * diff;
  }
  return total / 2;
}

IndexSet carrier_face(const LatticePolytope& delta, const RationalVector& point) {
  std::vector<const LatticeVector*> tight;
  for (const auto& m : delta.vertices())
    if (dot(m, point) == 1) tight.push_back(&m);
  if (tight.empty()) throw std::invalid_argument("point is not on the dual boundary");
  IndexSet out;
  for (std::size_t f = 0; f < delta.hyperplanes().size(); ++f) {
    const auto& n = delta.hyperplanes()[f].normal;
    if (std::all_of(tight.begin(), tight.end(), [&](const LatticeVector* m) { return dot(*m, n) == 1; }))
      out.push_back(f);
  }
  return out;
}

std::vector<TargetAtom> discretize_parallel_measure(const LatticePolytope& delta, int level) {
  if (level < 0) throw std::invalid_argument("subdivision level must be nonnegative");
  const std::size_t dim = delta.ambient_dimension();
  if (dim != 2 && dim != 3) throw std::invalid_argument("discretisation needs dimension 2 or 3");
  LatticePolytope dual = dual_polytope(delta);
  auto nu = parallel_measure(dual).facet_weights;
  std::vector<TargetAtom> atoms;
  for (std::size_t t = 0; t < dual.hyperplanes().size(); ++t) {
    const auto& h = dual.hyperplanes()[t];
    Chart chart = make_chart(dual, h.vertices.front());
    PointSet image;
    for (auto v : h.vertices) image.push_back(to_rational(chart_map(chart, dual.vertices()[v])));
    auto emit = [&](const RationalVector& y, const Rational& mass) {
      atoms.push_back(TargetAtom{chart_inverse(chart, h.normal, y), mass, h.vertices});
    };
    if (dim == 2) {
      auto [lo, hi] = std::minmax_element(image.begin(), image.end());
      const long pieces = level == 0 ? 1 : 2L * level;
      for (long i = 0; i < pieces; ++i) {
        Rational s = Rational(2 * i + 1, 2 * pieces);
        emit({(*lo)[0] + s * ((*hi)[0] - (*lo)[0])}, nu[t] / pieces);
      }
      continue;
    }
    clip::Polygon<Rational> poly;
    for (auto i : counterclockwise_order(image)) {
      poly.vertices.push_back({image[i][0], image[i][1]});
      poly.tags.push_back(-1);
    }
    const Rational total = clip::area(poly);
    const auto c = clip::centroid(poly);
    if (level == 0) {
      emit({c.x, c.y}, nu[t]);
      continue;
    }
    const long k = level;
    const std::size_t nv = poly.vertices.size();
    for (std::size_t e = 0; e < nv; ++e) {
      const auto& a = poly.vertices[e];
      const auto& b = poly.vertices[(e + 1) % nv];
      clip::Polygon<Rational> tri{{c, a, b}, {-1, -1, -1}};
      const Rational small = clip::area(tri) / (k * k);
      auto lattice = [&](long i, long j) {
        return std::array<Rational, 2>{c.x + Rational(i, k) * (a.x - c.x) + Rational(j, k) * (b.x - c.x),
                                       c.y + Rational(i, k) * (a.y - c.y) + Rational(j, k) * (b.y - c.y)};
      };
      auto add = [&](std::array<Rational, 2> p, std::array<Rational, 2> q, std::array<Rational, 2> r) {
        emit({(p[0] + q[0] + r[0]) / 3, (p[1] + q[1] + r[1]) / 3}, nu[t] * small / total);
      };
      for (long i = 0; i < k; ++i)
        for (long j = 0; i + j < k; ++j) {
          add(lattice(i, j), lattice(i + 1, j), lattice(i, j + 1));
          if (i + j + 2 <= k) add(lattice(i + 1, j), lattice(i, j + 1), lattice(i + 1, j + 1));
        }
    }
  }
  return atoms;
}

// ---------------------------------------------------------------------------
// Evaluation

LaguerreDecomposition laguerre_cells(const SemiDiscreteProblem& problem, const std::vector<double>& psi,
                                     const EvaluationOptions& options) {
  if (psi.size() != problem.targets.size()) throw std::invalid_argument("one weight per target atom is required");
  if (options.arithmetic == Arithmetic::exact) {
    std::vector<Rational> q;
    for (double x : psi) q.push_back(rational_from_double(x));
    auto regions = evaluate_all<Rational>(problem, q, options.reverse_order, options.with_hessian, options.threads);
    return assemble<Rational>(problem, q, std::move(regions), options.reverse_order, options.with_hessian);
  }
  auto regions = evaluate_all<double>(problem, psi, options.reverse_order, options.with_hessian, options.threads);
  return assemble<double>(problem, psi, std::move(regions), options.reverse_order, options.with_hessian);
}

LaguerreDecomposition laguerre_cells_exact(const SemiDiscreteProblem& problem, const std::vector<Rational>& psi,
                                           bool reverse_order) {
  if (psi.size() != problem.targets.size()) throw std::invalid_argument("one weight per target atom is required");
  auto regions = evaluate_all<Rational>(problem, psi, reverse_order, false, 1);
  return assemble<Rational>(problem, psi, std::move(regions), reverse_order, false);
}

double dual_objective(const SemiDiscreteProblem& problem, const std::vector<double>& psi) {
  return laguerre_cells(problem, psi, {Arithmetic::floating, false, false, 1}).objective;
}

std::vector<double> gradient(const SemiDiscreteProblem& problem, const std::vector<double>& psi) {
  return residual_vector(problem, laguerre_cells(problem, psi, {Arithmetic::floating, false, false, 1}));
}

RationalVector region_point(const SourceRegion& region, const RationalVector& local) {
  RationalVector x = region.origin;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t k = 0; k < local.size(); ++k) x[i] += region.frame[i][k] * local[k];
  return x;
}

// ---------------------------------------------------------------------------
// Solver

SolveResult solve(const SemiDiscreteProblem& problem, const SolverConfig& config,
                  std::optional<std::vector<double>> start) {
  if (!(config.tolerance > 0)) throw std::invalid_argument("tolerance must be positive");
  if (!(config.damping > 0 && config.damping <= 1)) throw std::invalid_argument("damping must lie in (0, 1]");
  const std::size_t n = problem.targets.size();
  EvaluationOptions eval{config.arithmetic, false, true, config.threads};

  std::vector<double> psi = start.value_or(std::vector<double>(n, 0.0));
  if (psi.size() != n) throw std::invalid_argument("start vector has the wrong size");
  const double shift = psi[0];
  for (auto& x : psi) x -= shift;

  double min_nu = std::numeric_limits<double>::infinity();
  for (const auto& t : problem.targets) min_nu = std::min(min_nu, to_double(t.mass));

  SolveResult result;
  auto& report = result.report;
  LaguerreDecomposition current = laguerre_cells(problem, psi, eval);
  std::vector<double> grad = residual_vector(problem, current);

  auto min_mass = [](const LaguerreDecomposition& d) { return *std::min_element(d.atom_mass.begin(), d.atom_mass.end()); };

  int iteration = 0;
  for (;; ++iteration) {
    double residual = max_abs(grad);
    report.objective_trace.push_back(current.objective);
    report.residual_trace.push_back(residual);
    if (residual <= config.tolerance) {
      report.converged = true;
      break;
    }
    if (iteration >= config.max_iterations) {
      report.message = "iteration cap reached";
      break;
    }
    const double smallest = min_mass(current);
    const double floor = 0.5 * std::min(smallest, min_nu);

    // Reduced system on atoms 1..n-1 (gauge psi_0 = 0).
    const Eigen::Index m = static_cast<Eigen::Index>(n) - 1;
    Eigen::MatrixXd h(m, m);
    Eigen::VectorXd g(m);
    double diag_max = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
      g(i) = grad[i + 1];
      for (Eigen::Index j = 0; j < m; ++j) h(i, j) = current.hessian[i + 1][j + 1];
      diag_max = std::max(diag_max, h(i, i));
    }

    std::vector<std::pair<Eigen::VectorXd, bool>> directions;  // (step, is_newton)
    if (smallest > 0) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(h);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        Eigen::VectorXd step = ldlt.solve(-g);
        if (step.allFinite()) directions.emplace_back(std::move(step), true);
      }
    }
    {
      const double eta = diag_max > 0 ? 1e-3 * diag_max : 1.0;
      Eigen::MatrixXd reg = h + eta * Eigen::MatrixXd::Identity(m, m);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(reg);
      Eigen::VectorXd step = ldlt.solve(-g);
      if (ldlt.info() == Eigen::Success && step.allFinite()) directions.emplace_back(std::move(step), false);
    }
    directions.emplace_back(-g, false);

    bool accepted = false;
    for (auto& [step, newton] : directions) {
      double tau = config.damping;
      for (int halving = 0; halving < 60 && !accepted; ++halving, tau *= 0.5) {
        std::vector<double> trial = psi;
        for (Eigen::Index i = 0; i < m; ++i) trial[i + 1] += tau * step(i);
        LaguerreDecomposition next = laguerre_cells(problem, trial, eval);
        std::vector<double> next_grad = residual_vector(problem, next);
        const double rounding = 64 * std::numeric_limits<double>::epsilon() * (1 + std::abs(current.objective));
        const bool decrease = next.objective < current.objective ||
                              (next.objective <= current.objective + rounding && max_abs(next_grad) < residual);
        if (decrease && min_mass(next) >= floor) {
          psi = std::move(trial);
          current = std::move(next);
          grad = std::move(next_grad);
          accepted = true;
          (newton ? report.newton_steps : report.fallback_steps)++;
        }
      }
      if (accepted) break;
    }
    if (!accepted) {
      report.message = "line search failed";
      break;
    }
  }

  report.iterations = iteration;
  report.residual = max_abs(grad);
  report.dual_value = current.objective;
  TransportPlan plan = extract_plan(problem, current);
  report.primal_value = plan.cost;
  report.duality_gap = report.dual_value + report.primal_value;
  if (report.converged && report.message.empty()) report.message = "converged";
  result.psi = std::move(psi);
  result.cells = std::move(current);
  return result;
}

TransportPlan extract_plan(const SemiDiscreteProblem& problem, const LaguerreDecomposition& cells) {
  TransportPlan plan;
  std::vector<double> column(problem.targets.size(), 0.0);
  double integral = 0;
  for (std::size_t i = 0; i < cells.pieces.size(); ++i) {
    const auto& p = cells.pieces[i];
    plan.entries.push_back({i, p.atom, p.mass});
    column[p.atom] += p.mass;
    integral += p.integral;
  }
  for (const auto& r : problem.regions) integral += to_double(r.constant);
  plan.cost = -integral;
  for (std::size_t j = 0; j < column.size(); ++j)
    plan.target_residual = std::max(plan.target_residual, std::abs(column[j] - to_double(problem.targets[j].mass)));
  return plan;
}

MaVerification ma_verify(const SemiDiscreteProblem& problem, const std::vector<double>& psi, double tolerance,
                         Arithmetic arithmetic) {
  auto cells = laguerre_cells(problem, psi, {arithmetic, true, false, 1});
  MaVerification v;
  for (double g : residual_vector(problem, cells)) v.residuals.push_back(-g);
  v.max_residual = max_abs(v.residuals);
  v.ok = v.max_residual <= tolerance;
  return v;
}

std::vector<ChartRegion> chart_regions_from_potential(const LatticePolytope& delta, const SemiDiscreteProblem& problem,
                                                      const LaguerreDecomposition& cells) {
  if (problem.kind != SourceKind::polytope) throw std::invalid_argument("chart regions need a polytope source");
  LatticePolytope dual = dual_polytope(delta);
  std::vector<ChartRegion> regions;
  for (std::size_t t = 0; t < dual.hyperplanes().size(); ++t) {
    ChartRegion r;
    r.dual_facet = t;
    r.anchor = dual.hyperplanes()[t].normal;
    regions.push_back(std::move(r));
  }
  std::vector<std::size_t> owner(problem.targets.size());
  for (std::size_t j = 0; j < problem.targets.size(); ++j) {
    IndexSet carrier = problem.targets[j].carrier.empty() ? carrier_face(delta, problem.targets[j].point)
                                                          : problem.targets[j].carrier;
    std::size_t t = 0;
    while (t < regions.size() && !std::includes(dual.hyperplanes()[t].vertices.begin(),
                                                dual.hyperplanes()[t].vertices.end(), carrier.begin(), carrier.end()))
      ++t;
    if (t == regions.size()) throw GeometryError("atom carrier lies on no dual facet");
    owner[j] = t;
    regions[t].atoms.push_back(j);
  }
  for (std::size_t i = 0; i < cells.pieces.size(); ++i) {
    auto& r = regions[owner[cells.pieces[i].atom]];
    r.pieces.push_back(i);
    r.mass += cells.pieces[i].mass;
  }
  return regions;
}

}  // namespace hessian_ot
