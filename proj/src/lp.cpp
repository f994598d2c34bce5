#include "hessian_ot/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace hessian_ot {

namespace {

// a + b * eps for an infinitesimal eps > 0.
struct Lex {
  Rational a, b;
  bool operator<(const Lex& o) const { return a != o.a ? a < o.a : b < o.b; }
  bool is_zero() const { return a == 0 && b == 0; }
  Lex& operator+=(const Lex& o) {
    a += o.a;
    b += o.b;
    return *this;
  }
  Lex& operator-=(const Lex& o) {
    a -= o.a;
    b -= o.b;
    return *this;
  }
};

struct Basic {
  std::size_t i, j;
  Lex flow;
};

class Simplex {
 public:
  explicit Simplex(const DiscreteInstance& in) : in_(in), m_(in.supply.size()), n_(in.demand.size()) {
    cost_d_.resize(m_ * n_);
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) cost_d_[i * n_ + j] = to_double(in.cost[i][j]);
    northwest_corner();
  }

  LpSolution run() {
    LpSolution out;
    while (true) {
      potentials();
      auto entering = price();
      if (!entering) break;
      pivot(entering->first, entering->second);
      ++out.pivots;
    }
    out.plan.assign(m_, std::vector<Rational>(n_, Rational(0)));
    for (const auto& e : basis_) out.plan[e.i][e.j] = e.flow.a;
    out.value = plan_cost(in_, out.plan);
    out.u = u_;
    out.v = v_;
    return out;
  }

 private:
  void northwest_corner() {
    // Lexicographic perturbation keeps every basis nondegenerate.
    std::vector<Lex> rs(m_), rd(n_);
    for (std::size_t i = 0; i < m_; ++i) rs[i] = {in_.supply[i], Rational(1)};
    for (std::size_t j = 0; j < n_; ++j) rd[j] = {in_.demand[j], Rational(0)};
    rd[n_ - 1].b = static_cast<long>(m_);
    std::size_t i = 0, j = 0;
    while (i < m_ && j < n_) {
      Lex x = rd[j] < rs[i] ? rd[j] : rs[i];
      basis_.push_back({i, j, x});
      rs[i] -= x;
      rd[j] -= x;
      if (rs[i].is_zero() && i + 1 < m_)
        ++i;
      else
        ++j;
    }
    if (basis_.size() != m_ + n_ - 1) throw std::logic_error("lp_oracle: initial basis is not a spanning tree");
  }

  // Tree adjacency over nodes 0..m-1 (rows) and m..m+n-1 (columns).
  std::vector<std::vector<std::size_t>> adjacency() const {
    std::vector<std::vector<std::size_t>> adj(m_ + n_);
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      adj[basis_[k].i].push_back(k);
      adj[m_ + basis_[k].j].push_back(k);
    }
    return adj;
  }

  void potentials() {
    auto adj = adjacency();
    u_.assign(m_, Rational(0));
    v_.assign(n_, Rational(0));
    std::vector<bool> seen(m_ + n_, false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
      std::size_t node = stack.back();
      stack.pop_back();
      for (auto k : adj[node]) {
        const auto& e = basis_[k];
        const std::size_t other = node < m_ ? m_ + e.j : e.i;
        if (seen[other]) continue;
        seen[other] = true;
        if (node < m_)
          v_[e.j] = in_.cost[e.i][e.j] - u_[e.i];
        else
          u_[e.i] = in_.cost[e.i][e.j] - v_[e.j];
        stack.push_back(other);
      }
    }
  }

  std::optional<std::pair<std::size_t, std::size_t>> exact_scan() const {
    std::optional<std::pair<std::size_t, std::size_t>> best;
    Rational best_r = 0;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        Rational r = in_.cost[i][j] - u_[i] - v_[j];
        if (r < best_r) {
          best_r = r;
          best = {{i, j}};
        }
      }
    return best;
  }

  std::optional<std::pair<std::size_t, std::size_t>> price() const {
    std::vector<double> ud(m_), vd(n_);
    for (std::size_t i = 0; i < m_; ++i) ud[i] = to_double(u_[i]);
    for (std::size_t j = 0; j < n_; ++j) vd[j] = to_double(v_[j]);
    double best = 0, scale = 1;
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < m_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const double c = cost_d_[i * n_ + j];
        scale = std::max(scale, std::abs(c));
        const double r = c - ud[i] - vd[j];
        if (r < best) {
          best = r;
          bi = i;
          bj = j;
        }
      }
    if (best < -1e-9 * scale && in_.cost[bi][bj] - u_[bi] - v_[bj] < 0) return {{bi, bj}};
    return exact_scan();
  }

  void pivot(std::size_t ei, std::size_t ej) {
    // Tree path from row ei to column ej closes the cycle with the entering cell.
    auto adj = adjacency();
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> via(m_ + n_, none);
    std::vector<bool> seen(m_ + n_, false);
    std::vector<std::size_t> queue{ei};
    seen[ei] = true;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const std::size_t node = queue[q];
      for (auto k : adj[node]) {
        const std::size_t other = node < m_ ? m_ + basis_[k].j : basis_[k].i;
        if (seen[other]) continue;
        seen[other] = true;
        via[other] = k;
        queue.push_back(other);
      }
    }
    std::vector<std::size_t> path;  // from column ej back to row ei
    for (std::size_t node = m_ + ej; node != ei;) {
      const auto k = via[node];
      path.push_back(k);
      node = node < m_ ? m_ + basis_[k].j : basis_[k].i;
    }
    // Edges alternate -, +, -, ... starting from the one touching column ej.
    std::size_t leave = path[0];
    for (std::size_t p = 0; p < path.size(); p += 2)
      if (basis_[path[p]].flow < basis_[leave].flow) leave = path[p];
    const Lex theta = basis_[leave].flow;
    for (std::size_t p = 0; p < path.size(); ++p) {
      if (p % 2 == 0)
        basis_[path[p]].flow -= theta;
      else
        basis_[path[p]].flow += theta;
    }
    basis_[leave] = {ei, ej, theta};
  }

  const DiscreteInstance& in_;
  std::size_t m_, n_;
  std::vector<double> cost_d_;
  std::vector<Basic> basis_;
  std::vector<Rational> u_, v_;
};

}  // namespace

LpSolution lp_oracle(const DiscreteInstance& instance) {
  const std::size_t m = instance.supply.size(), n = instance.demand.size();
  if (m == 0 || n == 0) throw std::invalid_argument("infeasible marginals: empty side");
  if (instance.cost.size() != m) throw std::invalid_argument("cost matrix has the wrong shape");
  for (const auto& row : instance.cost)
    if (row.size() != n) throw std::invalid_argument("cost matrix has the wrong shape");
  Rational s = 0, d = 0;
  for (const auto& x : instance.supply) {
    if (x < 0) throw std::invalid_argument("infeasible marginals: negative mass");
    s += x;
  }
  for (const auto& x : instance.demand) {
    if (x < 0) throw std::invalid_argument("infeasible marginals: negative mass");
    d += x;
  }
  if (s != d) throw std::invalid_argument("infeasible marginals: totals differ");
  return Simplex(instance).run();
}

Rational discrete_dual_objective(const DiscreteInstance& instance, const std::vector<Rational>& psi) {
  if (psi.size() != instance.demand.size()) throw std::invalid_argument("one weight per target is required");
  Rational total = 0;
  for (std::size_t j = 0; j < psi.size(); ++j) total += instance.demand[j] * psi[j];
  for (std::size_t i = 0; i < instance.supply.size(); ++i) {
    Rational best = -instance.cost[i][0] - psi[0];
    for (std::size_t j = 1; j < psi.size(); ++j) best = std::max(best, Rational(-instance.cost[i][j] - psi[j]));
    total += instance.supply[i] * best;
  }
  return total;
}

Rational plan_cost(const DiscreteInstance& instance, const RationalMatrix& plan) {
  Rational total = 0;
  for (std::size_t i = 0; i < plan.size(); ++i)
    for (std::size_t j = 0; j < plan[i].size(); ++j)
      if (plan[i][j] != 0) total += instance.cost[i][j] * plan[i][j];
  return total;
}

namespace {

std::vector<Rational> random_simplex_point(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<int> w(0, 12);
  std::vector<Rational> out;
  Rational total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    out.emplace_back(w(rng));
    total += out.back();
  }
  if (total == 0) {
    out[0] = 1;
    total = 1;
  }
  for (auto& x : out) x /= total;
  return out;
}

RationalVector random_face_point(std::mt19937_64& rng, const LatticePolytope& p) {
  std::uniform_int_distribution<std::size_t> pick(0, p.hyperplanes().size() - 1);
  std::uniform_int_distribution<int> w(1, 7);
  const auto& h = p.hyperplanes()[pick(rng)];
  RationalVector x(p.ambient_dimension(), Rational(0));
  Rational total = 0;
  for (auto v : h.vertices) {
    Rational c = w(rng);
    total += c;
    for (std::size_t k = 0; k < x.size(); ++k) x[k] += c * p.vertices()[v][k];
  }
  for (auto& c : x) c /= total;
  return x;
}

LatticePolytope from_rows(std::initializer_list<std::initializer_list<long>> rows) {
  std::vector<LatticeVector> pts;
  for (auto r : rows) {
    LatticeVector v;
    for (long x : r) v.emplace_back(x);
    pts.push_back(std::move(v));
  }
  return LatticePolytope(std::move(pts));
}

}  // namespace

DiscreteInstance random_boundary_instance(std::uint64_t seed, std::size_t sources, std::size_t targets) {
  if (sources == 0 || targets == 0) throw std::invalid_argument("instance sizes must be positive");
  static const LatticePolytope cube = from_rows(
      {{-1, -1, -1}, {-1, -1, 1}, {-1, 1, -1}, {-1, 1, 1}, {1, -1, -1}, {1, -1, 1}, {1, 1, -1}, {1, 1, 1}});
  static const LatticePolytope octahedron =
      from_rows({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}});
  std::mt19937_64 rng(seed);
  DiscreteInstance in;
  in.supply = random_simplex_point(rng, sources);
  in.demand = random_simplex_point(rng, targets);
  PointSet xs, ys;
  for (std::size_t i = 0; i < sources; ++i) xs.push_back(random_face_point(rng, cube));
  for (std::size_t j = 0; j < targets; ++j) ys.push_back(random_face_point(rng, octahedron));
  for (const auto& x : xs) {
    std::vector<Rational> row;
    for (const auto& y : ys) row.push_back(-dot(x, y));
    in.cost.push_back(std::move(row));
  }
  return in;
}

DualityCertificate certify_duality(const DiscreteInstance& instance, std::uint64_t seed, int probes) {
  DualityCertificate cert;
  auto lp = lp_oracle(instance);
  cert.value = lp.value;
  cert.pivots = lp.pivots;
  std::vector<Rational> psi;
  for (const auto& v : lp.v) psi.push_back(-v);
  cert.gap = discrete_dual_objective(instance, psi) + lp.value;

  const std::size_t m = instance.supply.size(), n = instance.demand.size();
  RationalMatrix product(m, std::vector<Rational>(n));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) product[i][j] = instance.supply[i] * instance.demand[j];
  const Rational product_cost = plan_cost(instance, product);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> w(-20, 20);
  cert.weak_minimum = cert.gap;
  for (int k = 0; k < probes; ++k) {
    std::vector<Rational> probe;
    for (std::size_t j = 0; j < n; ++j) probe.emplace_back(w(rng), 10);
    const Rational f = discrete_dual_objective(instance, probe);
    cert.weak_minimum = std::min(cert.weak_minimum, Rational(f + lp.value));
    cert.weak_minimum = std::min(cert.weak_minimum, Rational(f + product_cost));
    ++cert.probes;
  }
  return cert;
}

DiscreteInstance matched_discrete_instance(const SemiDiscreteProblem& problem, const LaguerreDecomposition& cells) {
  if (problem.kind != SourceKind::polytope) throw std::invalid_argument("matched instances need a polytope source");
  if (cells.arithmetic != Arithmetic::exact) throw std::invalid_argument("matched instances need exact cells");
  DiscreteInstance out;
  for (const auto& t : problem.targets) out.demand.push_back(t.mass);
  for (const auto& p : cells.pieces) {
    const RationalVector x = region_point(problem.regions[p.region], p.exact_centroid);
    out.supply.push_back(p.exact_mass);
    std::vector<Rational> row;
    for (const auto& t : problem.targets) row.push_back(-dot(x, t.point));
    out.cost.push_back(std::move(row));
  }
  return out;
}

}  // namespace hessian_ot
