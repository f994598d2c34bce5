// hessian_ot: command-line front end.

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "hessian_ot/atlas.hpp"
#include "hessian_ot/census.hpp"
#include "hessian_ot/lp.hpp"
#include "hessian_ot/ot.hpp"
#include "hessian_ot/polytope.hpp"
#include "json.hpp"

using namespace hessian_ot;
using json = nlohmann::ordered_json;

namespace {

enum Exit { ok = 0, usage = 1, parse = 2, no_convergence = 3, violation = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double tolerance = 1e-7;
  int max_iterations = 500;
  double damping = 1.0;
  int subdivision = 1;
  int grid = 0;
  std::uint64_t seed = 0;
  std::string arithmetic = "float";
  unsigned threads = 1;

  json to_json() const {
    return {{"tolerance", tolerance}, {"max_iterations", max_iterations}, {"damping", damping},
            {"subdivision_level", subdivision}, {"torus_grid", grid}, {"seed", seed},
            {"arithmetic", arithmetic}};
  }

  SolverConfig solver() const {
    SolverConfig c;
    c.tolerance = tolerance;
    c.max_iterations = max_iterations;
    c.damping = damping;
    c.arithmetic = arithmetic == "exact" ? Arithmetic::exact : Arithmetic::floating;
    c.threads = threads;
    return c;
  }

  void validate() const {
    if (!(tolerance > 0)) throw UsageError("--tol must be positive");
    if (max_iterations < 0) throw UsageError("--max-iter must be nonnegative");
    if (!(damping > 0 && damping <= 1)) throw UsageError("--damping must lie in (0, 1]");
    if (subdivision < 0) throw UsageError("--subdiv must be nonnegative");
    if (grid < 0) throw UsageError("--grid must be nonnegative");
    if (arithmetic != "exact" && arithmetic != "float") throw UsageError("--arith must be exact or float");
  }
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string sha256(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  EVP_Digest(data.data(), data.size(), digest, &length, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned i = 0; i < length; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return "sha256:" + os.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw InputError("cannot write " + out);
  f << text;
}

std::vector<PolytopeRecord> load_polytopes(const std::string& path) {
  std::istringstream in(read_file(path));
  return ingest_polytopes(in);
}

const LatticePolytope& single_polytope(const std::vector<PolytopeRecord>& records, std::size_t id) {
  if (id >= records.size()) throw InputError("no record with id " + std::to_string(id));
  if (!records[id].polytope) throw InputError("record " + std::to_string(id) + ": " + records[id].error);
  return *records[id].polytope;
}

json lattice_json(const LatticeVector& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(x.convert_to<long long>());
  return out;
}

json rational_json(const RationalVector& v) {
  json out = json::array();
  for (const auto& x : v) out.push_back(to_string(x));
  return out;
}

std::string matrix_text(const std::vector<LatticeVector>& rows) {
  std::ostringstream os;
  os << rows.size() << ' ' << (rows.empty() ? 0 : rows[0].size()) << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? " " : "") << r[i];
    os << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------

int cmd_polytope(const std::string& sub, const std::string& path, std::size_t id, const std::string& out) {
  auto records = load_polytopes(path);
  const auto& p = single_polytope(records, id);
  if (sub == "reflexive") {
    emit(std::string(p.origin_in_interior() && is_reflexive(p) ? "true" : "false") + "\n", out);
    return ok;
  }
  if (sub == "dual") {
    emit(matrix_text(dual_polytope(p).vertices()), out);
    return ok;
  }
  if (sub == "pairing") {
    emit(matrix_text(vertex_facet_pairing(p)), out);
    return ok;
  }
  if (sub == "info") {
    json j;
    j["dimension"] = p.ambient_dimension();
    j["vertices"] = json::array();
    for (const auto& v : p.vertices()) j["vertices"].push_back(lattice_json(v));
    j["facets"] = json::array();
    const bool reflexive = p.origin_in_interior() && is_reflexive(p);
    std::optional<ParallelMeasure> pm;
    if (p.origin_in_interior()) pm = parallel_measure(p);
    for (std::size_t f = 0; f < p.hyperplanes().size(); ++f) {
      const auto& h = p.hyperplanes()[f];
      json facet = {{"normal", lattice_json(h.normal)}, {"offset", h.offset.convert_to<long long>()},
                    {"vertices", h.vertices}};
      if (p.origin_in_interior()) {
        facet["relative_volume"] = to_string(relative_lattice_volume(p, f));
        facet["weight"] = to_string(pm->facet_weights[f]);
      }
      j["facets"].push_back(std::move(facet));
    }
    j["origin_interior"] = p.origin_in_interior();
    j["reflexive"] = reflexive;
    emit(j.dump(1) + "\n", out);
    return ok;
  }
  if (sub == "charts") {
    if (!is_reflexive(p)) throw InputError("charts need a reflexive polytope");
    json j;
    j["charts"] = json::array();
    for (std::size_t v = 0; v < p.vertices().size(); ++v) {
      Chart c = make_chart(p, v);
      json basis = json::array();
      for (const auto& b : c.basis) basis.push_back(lattice_json(b));
      j["charts"].push_back({{"anchor", lattice_json(c.anchor)}, {"basis", basis}, {"domain_facets", c.domain_facets}});
    }
    std::size_t checked = 0, failures = 0;
    for (std::size_t f = 0; f < p.hyperplanes().size(); ++f) {
      const auto& vs = p.hyperplanes()[f].vertices;
      for (auto a : vs)
        for (auto b : vs) {
          auto t = transition_map(p, f, a, b);
          ++checked;
          if (determinant(t.linear) != 1) ++failures;
        }
    }
    j["transitions_checked"] = checked;
    j["determinant_failures"] = failures;
    j["certificate"] = failures == 0 ? "all transition determinants equal +1" : "determinant check failed";
    emit(j.dump(1) + "\n", out);
    return failures == 0 ? ok : violation;
  }
  throw UsageError("unknown polytope subcommand " + sub);
}

json report_json(const SolveReport& r) {
  return {{"iterations", r.iterations},         {"converged", r.converged},
          {"residual", r.residual},             {"dual_value", r.dual_value},
          {"primal_value", r.primal_value},     {"duality_gap", r.duality_gap},
          {"newton_steps", r.newton_steps},     {"fallback_steps", r.fallback_steps},
          {"objective_trace", r.objective_trace}, {"residual_trace", r.residual_trace},
          {"message", r.message}};
}

json cells_json(const SemiDiscreteProblem& problem, const LaguerreDecomposition& cells) {
  json summary = json::array();
  for (std::size_t j = 0; j < problem.targets.size(); ++j)
    summary.push_back({{"atom", j}, {"target", to_string(problem.targets[j].mass)}, {"mass", cells.atom_mass[j]}});
  json pieces = json::array();
  for (const auto& p : cells.pieces)
    pieces.push_back({{"region", problem.regions[p.region].label}, {"atom", p.atom}, {"mass", p.mass}, {"polygon", p.polygon}});
  return {{"summary", summary}, {"pieces", pieces}};
}

json bundle_base(const std::string& hash, const RunConfig& config, const SolveResult& result,
                 const SemiDiscreteProblem& problem, const MaVerification& check) {
  json b;
  b["provenance"] = {{"input_hash", hash}, {"config", config.to_json()}};
  b["psi"] = result.psi;
  b["cells"] = cells_json(problem, result.cells);
  b["report"] = report_json(result.report);
  b["verification"] = {{"ok", check.ok}, {"max_residual", check.max_residual}, {"residuals", check.residuals}};
  return b;
}

int cmd_solve_polytope(const std::string& path, std::size_t id, const RunConfig& config, const std::string& out) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  auto records = ingest_polytopes(in);
  const auto& delta = single_polytope(records, id);
  if (!delta.origin_in_interior() || !is_reflexive(delta)) throw InputError("polytope is not reflexive");
  auto problem = make_polytope_problem(delta, discretize_parallel_measure(delta, config.subdivision));
  auto result = solve(problem, config.solver());
  auto check = ma_verify(problem, result.psi, 10 * config.tolerance, config.solver().arithmetic);
  json b = bundle_base(sha256(text), config, result, problem, check);
  json atoms = json::array();
  for (const auto& t : problem.targets) atoms.push_back({{"point", rational_json(t.point)}, {"mass", to_string(t.mass)}, {"carrier", t.carrier}});
  b["atoms"] = atoms;
  if (result.report.converged) {
    StabilityReport s = stability_report(id, delta, {});
    json stab = {{"id", id}, {"reflexive", true}, {"li_condition", *s.li}, {"structural_ok", *s.structural_ok},
                 {"worst_violation", s.worst_violation ? json(s.worst_violation->face()) : json(nullptr)},
                 {"support_leakage", support_stability_diagnostic(delta, problem, result)}};
    b["stability"] = stab;
  }
  emit(b.dump(1) + "\n", out);
  return result.report.converged ? ok : no_convergence;
}

// Torus source: {"dimension": d, "density": "uniform"} or a row-major list of
// g^d nonnegative rationals. Atoms: one line per atom, d coordinates then the
// mass, all rationals; '#' starts a comment line.
int cmd_solve_torus(const std::string& source_path, const std::string& atoms_path, const RunConfig& config,
                    const std::string& out) {
  const std::string source_text = read_file(source_path), atoms_text = read_file(atoms_path);
  json source;
  try {
    source = json::parse(source_text);
  } catch (const json::exception& e) {
    throw InputError(std::string("torus source: ") + e.what());
  }
  TorusDensity density;
  try {
    density.dimension = source.at("dimension").get<std::size_t>();
    const auto& d = source.at("density");
    std::vector<Rational> values;
    std::size_t native = 1;
    if (d.is_string()) {
      if (d.get<std::string>() != "uniform") throw InputError("density must be \"uniform\" or a list");
      values = {Rational(1)};
    } else {
      for (const auto& v : d) values.push_back(parse_rational(v.is_string() ? v.get<std::string>() : v.dump()));
      native = density.dimension == 1 ? values.size() : static_cast<std::size_t>(std::llround(std::sqrt(double(values.size()))));
      if (density.dimension == 2 && native * native != values.size()) throw InputError("2D density needs g*g values");
    }
    const std::size_t grid = config.grid == 0 ? native : static_cast<std::size_t>(config.grid);
    if (grid % native != 0) throw UsageError("--grid must be a multiple of the density resolution");
    const std::size_t r = grid / native;
    if (grid == 1) {
      density.grid = 0;
    } else {
      density.grid = grid;
      if (density.dimension == 1) {
        for (std::size_t c = 0; c < grid; ++c) density.values.push_back(values[c / r]);
      } else {
        for (std::size_t y = 0; y < grid; ++y)
          for (std::size_t x = 0; x < grid; ++x) density.values.push_back(values[(y / r) * native + x / r]);
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("torus source: ") + e.what());
  }

  std::vector<TargetAtom> atoms;
  std::istringstream in(atoms_text);
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<Rational> xs;
    std::string tok;
    try {
      while (ls >> tok) xs.push_back(parse_rational(tok));
    } catch (const std::exception&) {
      throw ParseError(number, line.find(tok) + 1, "expected a rational, found '" + tok + "'");
    }
    if (xs.empty()) continue;
    if (xs.size() != density.dimension + 1)
      throw ParseError(number, 1, "expected " + std::to_string(density.dimension + 1) + " values per atom");
    atoms.push_back({RationalVector(xs.begin(), xs.end() - 1), xs.back(), {}});
  }

  auto problem = make_torus_problem(density, atoms);
  auto result = solve(problem, config.solver());
  auto check = ma_verify(problem, result.psi, 10 * config.tolerance, config.solver().arithmetic);
  json b = bundle_base(sha256(source_text + atoms_text), config, result, problem, check);
  b["plan_cost"] = extract_plan(problem, result.cells).cost;
  emit(b.dump(1) + "\n", out);
  return result.report.converged ? ok : no_convergence;
}

json stability_json(const StabilityReport& r) {
  json j;
  j["id"] = r.id;
  j["reflexive"] = r.reflexive;
  j["li_condition"] = r.li ? json(*r.li) : json(nullptr);
  j["structural_ok"] = r.structural_ok ? json(*r.structural_ok) : json(nullptr);
  j["worst_violation"] = r.worst_violation ? json({{"face", r.worst_violation->face()},
                                                   {"lhs", to_string(r.worst_violation->lhs)},
                                                   {"rhs", to_string(r.worst_violation->rhs)}})
                                           : json(nullptr);
  j["equalities"] = r.equalities;
  j["support_leakage"] = r.leakage ? json(*r.leakage) : json(nullptr);
  if (r.solver) j["solver"] = {{"iterations", r.solver->iterations}, {"converged", r.solver->converged},
                               {"residual", r.solver->residual}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

CensusOptions census_options(const RunConfig& config, bool with_ot) {
  CensusOptions o;
  o.with_ot = with_ot;
  o.subdivision = config.subdivision;
  o.solver = config.solver();
  o.solver.threads = 1;
  o.threads = config.threads;
  return o;
}

int cmd_stability(const std::string& path, const RunConfig& config, bool with_ot, const std::string& out) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  auto result = census(ingest_polytopes(in), census_options(config, with_ot));
  json j;
  j["provenance"] = {{"input_hash", sha256(text)}, {"config", config.to_json()}};
  j["reports"] = json::array();
  bool converged = true;
  for (const auto& r : result.reports) {
    j["reports"].push_back(stability_json(r));
    if (r.solver && !r.solver->converged) converged = false;
  }
  emit(j.dump(1) + "\n", out);
  return converged ? ok : no_convergence;
}

int cmd_census(const std::string& path, const RunConfig& config, bool with_ot, const std::string& out) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  auto result = census(ingest_polytopes(in), census_options(config, with_ot));
  const std::string csv = census_csv(result);
  if (out.empty()) {
    std::cout << csv;
  } else {
    std::string stem = out;
    if (stem.size() > 4 && stem.substr(stem.size() - 4) == ".csv") stem.resize(stem.size() - 4);
    emit(csv, stem + ".csv");
    json j = json::parse(census_json(result));
    json bundle;
    bundle["provenance"] = {{"input_hash", sha256(text)}, {"config", config.to_json()}};
    bundle["reports"] = j["reports"];
    bundle["aggregates"] = j["aggregates"];
    emit(bundle.dump(1) + "\n", stem + ".json");
  }
  std::cerr << "records=" << result.total << " reflexive=" << result.reflexive << " skipped=" << result.skipped
            << " structural_violations=" << result.structural_violations << " li_pass=" << result.li_pass
            << " equality_cases=" << result.equality_cases << "\n";
  return ok;
}

int cmd_oracle(const std::vector<std::string>& sizes, int instances, const RunConfig& config, const std::string& out) {
  json j;
  j["provenance"] = {{"input_hash", sha256("oracle")}, {"config", config.to_json()}};
  j["instances"] = json::array();
  double worst_gap = 0;
  bool violated = false;
  std::uint64_t counter = 0;
  for (const auto& size : sizes) {
    std::size_t m = 0, n = 0;
    char x = 0;
    std::istringstream ss(size);
    if (!(ss >> m >> x >> n) || x != 'x' || !ss.eof() || m == 0 || n == 0 || m > 200 || n > 200)
      throw UsageError("sizes look like 8x5 with both sides in 1..200, got '" + size + "'");
    for (int k = 0; k < instances; ++k, ++counter) {
      const std::uint64_t seed = config.seed * 1000003 + counter;
      auto instance = random_boundary_instance(seed, m, n);
      auto cert = certify_duality(instance, seed);
      const double gap = std::abs(to_double(cert.gap));
      const bool weak = cert.weak_minimum >= 0;
      worst_gap = std::max(worst_gap, gap);
      if (!weak || gap > 1e-6) violated = true;
      j["instances"].push_back({{"size", size}, {"seed", seed}, {"value", to_string(cert.value)},
                                {"gap", to_string(cert.gap)}, {"weak_duality", weak}, {"pivots", cert.pivots}});
    }
  }
  j["worst_gap"] = worst_gap;
  j["ok"] = !violated;
  emit(j.dump(1) + "\n", out);
  std::cerr << "worst_gap=" << worst_gap << (violated ? " VIOLATION" : "") << "\n";
  return violated ? violation : ok;
}

void apply_config_file(const std::string& path, RunConfig& c) {
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw InputError(std::string("config: ") + e.what());
  }
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "tol" || key == "tolerance") c.tolerance = value.get<double>();
      else if (key == "max_iter" || key == "max_iterations") c.max_iterations = value.get<int>();
      else if (key == "damping") c.damping = value.get<double>();
      else if (key == "subdiv" || key == "subdivision_level") c.subdivision = value.get<int>();
      else if (key == "grid" || key == "torus_grid") c.grid = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "arith" || key == "arithmetic") c.arithmetic = value.get<std::string>();
      else throw UsageError("config: unknown key " + key);
    } catch (const json::exception& e) {
      throw InputError("config: bad value for " + key);
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Semi-discrete optimal transport on reflexive polytope boundaries"};
  app.require_subcommand(1);

  RunConfig defaults;
  RunConfig flags;
  std::string config_path, out;
  bool with_ot = false;
  std::size_t id = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", flags.tolerance, "residual tolerance");
    sub->add_option("--max-iter", flags.max_iterations, "iteration cap");
    sub->add_option("--damping", flags.damping, "initial step length in (0, 1]");
    sub->add_option("--subdiv", flags.subdivision, "target subdivision level");
    sub->add_option("--grid", flags.grid, "torus integration cells per axis (0: native)");
    sub->add_option("--seed", flags.seed, "random seed");
    sub->add_option("--arith", flags.arithmetic, "exact or float")->check(CLI::IsMember({"exact", "float"}));
    sub->add_option("--config", config_path, "JSON config file; flags win");
    sub->add_option("--out", out, "output path");
  };

  std::string poly_sub, path, source, atoms_path;
  auto* polytope = app.add_subcommand("polytope", "inspect a polytope");
  polytope->add_option("what", poly_sub, "info, dual, reflexive, charts or pairing")
      ->required()
      ->check(CLI::IsMember({"info", "dual", "reflexive", "charts", "pairing"}));
  polytope->add_option("path", path, "vertex-matrix file")->required();
  polytope->add_option("--id", id, "record id in the file");
  polytope->add_option("--out", out, "output path");

  auto* solve_polytope = app.add_subcommand("solve-polytope", "solve the transport problem on a polytope boundary");
  solve_polytope->add_option("path", path, "vertex-matrix file")->required();
  solve_polytope->add_option("--id", id, "record id in the file");
  add_common(solve_polytope);

  auto* solve_torus = app.add_subcommand("solve-torus", "solve the periodic transport problem");
  solve_torus->add_option("source", source, "density description (JSON)")->required();
  solve_torus->add_option("atoms", atoms_path, "atom list")->required();
  add_common(solve_torus);

  auto* stability = app.add_subcommand("stability", "stability criteria for every record");
  stability->add_option("path", path, "vertex-matrix file")->required();
  stability->add_flag("--with-ot", with_ot, "also run the transport diagnostic");
  add_common(stability);

  auto* census_cmd = app.add_subcommand("census", "census CSV and JSON over a database file");
  census_cmd->add_option("path", path, "vertex-matrix file")->required();
  census_cmd->add_flag("--with-ot", with_ot, "also run the transport diagnostic");
  add_common(census_cmd);

  std::vector<std::string> sizes{"8x5"};
  int instances = 1;
  auto* oracle = app.add_subcommand("oracle", "certify duality on random discrete instances");
  oracle->add_option("--sizes", sizes, "instance sizes such as 8x5")->delimiter(',');
  oracle->add_option("--instances", instances, "instances per size")->check(CLI::PositiveNumber);
  add_common(oracle);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : usage;
  }

  try {
    RunConfig config = defaults;
    if (!config_path.empty()) apply_config_file(config_path, config);
    CLI::App* active = app.get_subcommands().front();
    auto given = [&](const char* name) { return active->get_option_no_throw(name) && active->count(name) > 0; };
    if (given("--tol")) config.tolerance = flags.tolerance;
    if (given("--max-iter")) config.max_iterations = flags.max_iterations;
    if (given("--damping")) config.damping = flags.damping;
    if (given("--subdiv")) config.subdivision = flags.subdivision;
    if (given("--grid")) config.grid = flags.grid;
    if (given("--seed")) config.seed = flags.seed;
    if (given("--arith")) config.arithmetic = flags.arithmetic;
    config.threads = threads_from_environment();
    config.validate();

    if (*polytope) return cmd_polytope(poly_sub, path, id, out);
    if (*solve_polytope) return cmd_solve_polytope(path, id, config, out);
    if (*solve_torus) return cmd_solve_torus(source, atoms_path, config, out);
    if (*stability) return cmd_stability(path, config, with_ot, out);
    if (*census_cmd) return cmd_census(path, config, with_ot, out);
    if (*oracle) return cmd_oracle(sizes, instances, config, out);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return usage;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return parse;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return parse;
  } catch (const GeometryError& e) {
    std::cerr << "geometry error: " << e.what() << "\n";
    return parse;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return parse;
  }
  return usage;
}
