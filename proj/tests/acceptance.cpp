// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "corpus.hpp"
#include "hessian_ot/atlas.hpp"
#include "hessian_ot/census.hpp"
#include "hessian_ot/convex.hpp"
#include "hessian_ot/lp.hpp"
#include "hessian_ot/ot.hpp"
#include "json.hpp"

using namespace hessian_ot;

namespace {

// Tolerances.
constexpr double geometry_seconds = 10.0;
constexpr double solver_residual = 1e-7;
constexpr double solver_tolerance = 1e-10;
constexpr int solver_iterations = 500;
constexpr double solver_seconds = 60.0;
constexpr double constant_weights = 1e-8;
constexpr double duality_gap = 1e-6;
constexpr double gradient_relative = 1e-5;
constexpr double torus_boundary = 1e-9;
constexpr std::size_t census_violations = 1542;
constexpr std::size_t census_li = 238;
constexpr std::size_t census_total = 4319;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool condition, const std::string& what) {
    if (!condition && pass) {
      pass = false;
      detail << "failed: " << what << "; ";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RationalVector rv(std::initializer_list<long> xs) {
  RationalVector out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

// ---------------------------------------------------------------------------

void exact_geometry(Outcome& out) {
  auto t0 = std::chrono::steady_clock::now();
  auto corpus = hot_test::reflexive_corpus();
  std::size_t transitions = 0;
  for (const auto& [name, p] : corpus) {
    const std::string tag = name;
    out.require(is_reflexive(p), tag + " reflexive");
    auto d = dual_polytope(p);
    auto bidual = dual_polytope(d).vertices();
    auto original = p.vertices();
    std::sort(bidual.begin(), bidual.end());
    std::sort(original.begin(), original.end());
    out.require(bidual == original, tag + " biduality");
    for (const auto& f : enumerate_facets(p))
      for (std::size_t i = 0; i < p.vertices().size(); ++i) {
        const Rational s = dot(p.vertices()[i], f.normal);
        const bool on = std::binary_search(f.vertex_indices.begin(), f.vertex_indices.end(), i);
        out.require(on ? s == 1 : s < 1, tag + " facet certificate");
      }
    for (std::size_t f = 0; f < p.hyperplanes().size(); ++f) {
      const auto& h = p.hyperplanes()[f];
      for (auto a : h.vertices) {
        auto chart = make_chart(p, a);
        for (auto i : h.vertices) out.require(is_integral(chart_map(chart, to_rational(p.vertices()[i]))), tag + " chart integrality");
        for (auto b : h.vertices) {
          out.require(determinant(transition_map(p, f, a, b).linear) == 1, tag + " transition determinant");
          ++transitions;
        }
      }
    }
  }
  const double t = seconds_since(t0);
  out.require(corpus.size() >= 10, "corpus size");
  out.require(t < geometry_seconds, "runtime");
  out.detail << corpus.size() << " polytopes, " << transitions << " transitions, " << t << " s";
}

MaxAffineFunction random_function(std::mt19937& rng, std::size_t pieces, bool bounded) {
  std::uniform_int_distribution<int> c(-3, 3);
  while (true) {
    std::vector<AffinePiece> ps;
    for (std::size_t i = 0; i < pieces; ++i) ps.push_back({rv({c(rng), c(rng)}), Rational(c(rng))});
    PointSet slopes;
    for (const auto& p : ps) slopes.push_back(p.slope);
    if (!bounded && affine_dimension(slopes) != 2) continue;
    if (bounded) return MaxAffineFunction(ps, PointSet{rv({-2, -2}), rv({2, -2}), rv({2, 2}), rv({-2, 2})});
    return MaxAffineFunction(ps);
  }
}

void convex_kernel(Outcome& out) {
  std::mt19937 rng(11);
  const MaxAffineFunction abs1({{rv({1}), 0}, {rv({-1}), 0}});
  const MaxAffineFunction four({{rv({1, 1}), 0}, {rv({1, -1}), 0}, {rv({-1, 1}), 0}, {rv({-1, -1}), 0}});

  std::vector<MaxAffineFunction> fs{four};
  for (int i = 0; i < 6; ++i) fs.push_back(random_function(rng, 5, i % 2 == 0));
  std::size_t points = 0;
  for (const auto& f : fs) {
    auto ff = legendre_transform(legendre_transform(f));
    for (int i = 0; i <= 16; ++i)
      for (int j = 0; j <= 16; ++j) {
        RationalVector x{Rational(-2) + Rational(i, 4), Rational(-2) + Rational(j, 4)};
        out.require(ff.evaluate(x) == f.evaluate(x), "legendre involution");
        ++points;
      }
  }
  for (int i = -8; i <= 8; ++i) {
    RationalVector x{Rational(i, 4)};
    out.require(legendre_transform(legendre_transform(abs1)).evaluate(x) == abs1.evaluate(x), "legendre involution of |x|");
  }

  auto m = ma_measure(abs1);
  out.require(m.atoms.size() == 1 && m.atoms[0].point == rv({0}) && m.atoms[0].mass == 2, "MA(|x|) = 2 delta_0");
  auto m4 = ma_measure(four, PointSet{rv({-1, -1}), rv({1, -1}), rv({1, 1}), rv({-1, 1})});
  out.require(m4.atoms.size() == 1 && m4.atoms[0].mass == 4, "four-piece mass");

  std::uniform_int_distribution<int> c(-2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    RationalMatrix a{rv({1, 0}), rv({0, 1})};
    for (int step = 0; step < 4; ++step) {
      const int k = c(rng);
      a = multiply(a, step % 2 == 0 ? RationalMatrix{rv({1, k}), rv({0, 1})} : RationalMatrix{rv({1, 0}), rv({k, 1})});
    }
    if (trial % 3 == 0) a = multiply(a, RationalMatrix{rv({0, 1}), rv({1, 0})});
    out.require(affine_invariance_check(random_function(rng, 5, false), AffineMap{a, rv({c(rng), c(rng)})}),
                "affine invariance");
  }

  PointSet cube, octa;
  const auto cube_polytope = hot_test::cube(), octahedron = hot_test::octahedron();
  for (const auto& v : cube_polytope.vertices()) cube.push_back(to_rational(v));
  for (const auto& v : octahedron.vertices()) octa.push_back(to_rational(v));
  std::uniform_int_distribution<int> w(-4, 4);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Rational> phi;
    for (std::size_t i = 0; i < cube.size(); ++i) phi.push_back(w(rng));
    auto phic = c_transform(cube, phi, octa);
    auto phiccc = c_transform(cube, c_transform(octa, phic, cube), octa);
    out.require(phiccc == phic, "c-transform idempotence");
  }
  out.detail << fs.size() + 1 << " functions on " << points << " points, 20 unimodular maps, 50 c-transforms";
}

void solver_optimality(Outcome& out) {
  struct Case {
    const char* name;
    LatticePolytope delta;
    int level;
  };
  std::vector<Case> cases{{"cube", hot_test::cube(), 0},
                          {"cube", hot_test::cube(), 1},
                          {"simplex", hot_test::simplex(), 0},
                          {"simplex", hot_test::simplex(), 1}};
  for (const auto& c : cases) {
    auto problem = make_polytope_problem(c.delta, discretize_parallel_measure(c.delta, c.level));
    SolverConfig config;
    config.tolerance = solver_tolerance;
    config.max_iterations = solver_iterations;
    std::mt19937 rng(c.level + 17);
    std::uniform_real_distribution<double> shift(-0.2, 0.2);
    std::vector<double> start(problem.targets.size());
    for (auto& x : start) x = shift(rng);
    auto t0 = std::chrono::steady_clock::now();
    auto result = solve(problem, config, start);
    const double t = seconds_since(t0);
    const std::string tag = std::string(c.name) + " k=" + std::to_string(c.level);
    out.require(result.report.converged && result.report.residual <= solver_residual, tag + " residual");
    out.require(result.report.iterations <= solver_iterations, tag + " iterations");
    out.require(t < solver_seconds, tag + " runtime");
    double spread = 0;
    for (double x : result.psi) spread = std::max(spread, std::abs(x - result.psi[0]));
    out.require(spread <= constant_weights, tag + " constant weights");
    out.detail << tag << ": " << problem.targets.size() << " atoms, residual " << result.report.residual << ", "
               << result.report.iterations << " it, spread " << spread << "; ";
  }
}

void duality(Outcome& out) {
  const std::vector<std::pair<std::size_t, std::size_t>> sizes{{1, 1}, {3, 7}, {8, 5}, {20, 13}, {50, 40}, {120, 90}, {200, 200}};
  int instances = 0;
  Rational worst_gap = 0;
  std::uint64_t seed = 1;
  for (int rep = 0; instances < 105; ++rep)
    for (auto [m, n] : sizes) {
      if (m * n >= 10000 && rep > 0) continue;
      auto cert = certify_duality(random_boundary_instance(seed, m, n), seed + 1000);
      ++seed;
      ++instances;
      out.require(cert.weak_minimum >= 0, "weak duality");
      worst_gap = std::max(worst_gap, Rational(abs(cert.gap)));
    }
  out.require(to_double(worst_gap) <= duality_gap, "gap at optimum");

  double worst_semi = 0;
  for (auto delta : {hot_test::cube(), hot_test::simplex()}) {
    auto problem = make_polytope_problem(delta, discretize_parallel_measure(delta, 1));
    SolverConfig config;
    config.tolerance = 1e-9;
    auto result = solve(problem, config);
    auto cells = laguerre_cells(problem, result.psi, {Arithmetic::exact, false, false});
    auto lp = lp_oracle(matched_discrete_instance(problem, cells));
    const double gap = to_double(*cells.exact_objective + lp.value);
    out.require(gap >= -1e-12, "semi-discrete weak duality");
    worst_semi = std::max(worst_semi, gap);
  }
  out.require(worst_semi <= duality_gap, "semi-discrete gap");
  out.detail << instances << " discrete instances up to 200x200, worst gap " << to_string(worst_gap)
             << ", semi-discrete gap " << worst_semi;
}

SemiDiscreteProblem random_polytope_problem(std::mt19937& rng, const LatticePolytope& delta, int atoms) {
  auto dual = dual_polytope(delta);
  std::uniform_int_distribution<std::size_t> pick(0, dual.hyperplanes().size() - 1);
  std::uniform_int_distribution<int> weight(1, 9);
  std::vector<TargetAtom> targets;
  Rational total = 0;
  while (static_cast<int>(targets.size()) < atoms) {
    const auto& h = dual.hyperplanes()[pick(rng)];
    RationalVector p(delta.ambient_dimension(), Rational(0));
    Rational s = 0;
    for (auto v : h.vertices) {
      Rational c = weight(rng);
      s += c;
      for (std::size_t i = 0; i < p.size(); ++i) p[i] += c * dual.vertices()[v][i];
    }
    for (auto& x : p) x /= s;
    Rational m = weight(rng);
    total += m;
    targets.push_back({p, m, carrier_face(delta, p)});
  }
  for (auto& t : targets) t.mass /= total;
  return make_polytope_problem(delta, targets);
}

void gradient_check(Outcome& out) {
  std::mt19937 rng(101);
  std::uniform_real_distribution<double> shift(-0.05, 0.05);
  std::uniform_int_distribution<int> weight(1, 9);
  std::uniform_int_distribution<int> coord(0, 19);
  auto corpus = hot_test::reflexive_corpus();
  int instances = 0;
  double worst = 0;
  for (int trial = 0; trial < 120; ++trial) {
    SemiDiscreteProblem problem;
    if (trial % 4 == 0) {
      const std::size_t d = trial % 8 == 0 ? 1 : 2;
      std::vector<TargetAtom> atoms;
      Rational total = 0;
      for (int j = 0; j < 4; ++j) {
        RationalVector p;
        for (std::size_t i = 0; i < d; ++i) p.emplace_back(coord(rng), 20);
        atoms.push_back({p, Rational(weight(rng)), {}});
        total += atoms.back().mass;
      }
      for (auto& a : atoms) a.mass /= total;
      TorusDensity density{d, 3, {}};
      for (std::size_t c = 0; c < (d == 1 ? 3u : 9u); ++c) density.values.emplace_back(weight(rng));
      problem = make_torus_problem(density, atoms);
    } else {
      problem = random_polytope_problem(rng, corpus[trial % corpus.size()].second, 6);
    }
    std::vector<double> psi(problem.targets.size());
    for (auto& x : psi) x = shift(rng);
    auto g = gradient(problem, psi);
    double scale = 1;
    for (double x : g) scale = std::max(scale, std::abs(x));
    const double h = 1e-6;
    for (std::size_t j = 0; j < psi.size(); ++j) {
      auto up = psi, down = psi;
      up[j] += h;
      down[j] -= h;
      const double fd = (dual_objective(problem, up) - dual_objective(problem, down)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g[j]) / scale);
    }
    ++instances;
  }
  out.require(instances >= 100, "instance count");
  out.require(worst <= gradient_relative, "relative error");
  out.detail << instances << " instances, worst relative error " << worst;
}

void torus_closed_form(Outcome& out) {
  auto problem = make_torus_problem({1, 0, {}}, {{{Rational(0)}, Rational(3, 10), {}}, {{Rational(1, 2)}, Rational(7, 10), {}}});
  SolverConfig config;
  config.tolerance = 1e-12;
  auto result = solve(problem, config);
  out.require(result.report.converged, "two-atom solve");
  // Atom 1 at 1/2 owns [1/2 - 0.35, 1/2 + 0.35].
  double lo = 1, hi = 0;
  for (const auto& p : result.cells.pieces)
    if (p.atom == 1) {
      lo = std::min(lo, p.polygon[0][0]);
      hi = std::max(hi, p.polygon[1][0]);
    }
  const double err = std::max(std::abs(lo - 0.15), std::abs(hi - 0.85));
  out.require(err <= torus_boundary, "cell boundaries");

  std::vector<TargetAtom> lattice;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) lattice.push_back({{Rational(i, 3), Rational(j, 3)}, Rational(1, 9), {}});
  auto grid = make_torus_problem({2, 0, {}}, lattice);
  auto grid_result = solve(grid);
  out.require(grid_result.report.converged && grid_result.report.iterations == 0, "lattice solve is trivial");
  for (double x : grid_result.psi) out.require(x == 0, "lattice weights vanish");
  for (const auto& m : laguerre_cells_exact(grid, std::vector<Rational>(9, Rational(0))).exact_atom_mass)
    out.require(m == Rational(1, 9), "lattice cells balanced exactly");

  auto pair = make_torus_problem({2, 0, {}}, {{{Rational(0), Rational(0)}, Rational(1, 2), {}},
                                              {{Rational(1, 2), Rational(1, 2)}, Rational(1, 2), {}}});
  auto pair_result = solve(pair);
  out.require(pair_result.report.converged && pair_result.report.iterations == 0, "uniform pair solve is trivial");
  out.require(ma_verify(problem, result.psi, 1e-7).ok, "Monge-Ampere verification");
  out.detail << "boundary error " << err << ", psi_1 " << result.psi[1] << ", lattice and uniform cases at zero";
}

void census_reproduction(Outcome& out) {
  const char* database = std::getenv("HESSIAN_OT_DATABASE");
  CensusOptions options;
  options.threads = std::max(1u, std::thread::hardware_concurrency());
  if (database && *database) {
    auto t0 = std::chrono::steady_clock::now();
    auto result = census(ingest_polytopes(std::string(database)), options);
    out.require(result.total == census_total, "record count");
    out.require(result.structural_violations == census_violations, "structural violations");
    out.require(result.li_pass == census_li, "Li passes");
    out.detail << "database " << database << ": " << result.total << " records, " << result.structural_violations
               << " violations, " << result.li_pass << " Li passes, " << seconds_since(t0) << " s";
    return;
  }
  auto records = ingest_polytopes(std::string(HOT_SOURCE_DIR) + "/data/reflexive3d_sample.txt");
  std::ifstream in(std::string(HOT_SOURCE_DIR) + "/tests/data/sample_expected.json");
  auto expected = nlohmann::json::parse(in);
  auto result = census(records, options);
  out.require(result.reports.size() == expected.size(), "sample size");
  std::size_t violations = 0, li = 0;
  for (std::size_t i = 0; i < std::min(result.reports.size(), expected.size()); ++i) {
    const auto& r = result.reports[i];
    const auto& e = expected[i];
    out.require(r.reflexive == e["reflexive"].get<bool>(), "record " + std::to_string(i) + " reflexive");
    out.require(r.li && *r.li == e["li"].get<bool>(), "record " + std::to_string(i) + " Li");
    out.require(r.structural_ok && *r.structural_ok == e["structural_ok"].get<bool>(),
                "record " + std::to_string(i) + " structural");
    out.require(r.equalities == e["equalities"].get<std::size_t>(), "record " + std::to_string(i) + " equalities");
    if (r.worst_violation)
      out.require(to_string(r.worst_violation->slack()) == e["worst_slack"].get<std::string>(),
                  "record " + std::to_string(i) + " worst slack");
    violations += !e["structural_ok"].get<bool>();
    li += e["li"].get<bool>();
  }
  out.require(result.structural_violations == violations && result.li_pass == li, "aggregates");
  out.detail << "bundled sample (set HESSIAN_OT_DATABASE for the full database): " << result.total << " records, "
             << result.structural_violations << " violations, " << result.li_pass << " Li passes";
}

void stability_diagnostic(Outcome& out) {
  auto simplex = hot_test::simplex();
  SolverConfig exact;
  exact.arithmetic = Arithmetic::exact;
  auto problem = make_polytope_problem(simplex, discretize_parallel_measure(simplex, 1));
  const double a = support_stability_diagnostic(simplex, problem, solve(problem, exact));
  const double b = support_stability_diagnostic(simplex, problem, solve(problem, exact));
  out.require(a == 0 && b == 0, "symmetric simplex leakage");

  auto atoms = discretize_parallel_measure(simplex, 0);
  atoms[0].mass = Rational(7, 10);
  for (std::size_t j = 1; j < atoms.size(); ++j) atoms[j].mass = Rational(1, 10);
  auto skewed = make_polytope_problem(simplex, atoms);
  const double c = support_stability_diagnostic(simplex, skewed, solve(skewed));
  const double d = support_stability_diagnostic(simplex, skewed, solve(skewed));
  out.require(c > 0, "mis-weighted leakage");
  out.require(c == d, "determinism");
  out.detail << "symmetric " << a << ", mis-weighted " << c;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"exact geometry", exact_geometry},
      {"convex kernel", convex_kernel},
      {"solver optimality", solver_optimality},
      {"duality certification", duality},
      {"gradient check", gradient_check},
      {"torus closed form", torus_closed_form},
      {"census reproduction", census_reproduction},
      {"stability diagnostic", stability_diagnostic},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome out;
    try {
      run(out);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail << "exception: " << e.what();
    }
    failures += !out.pass;
    std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << out.detail.str() << std::endl;
  }
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
