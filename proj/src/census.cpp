#include "hessian_ot/census.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace hessian_ot {

namespace {

Rational sum_over(const std::vector<Rational>& weights, const IndexSet& idx) {
  Rational s = 0;
  for (auto i : idx) s += weights[i];
  return s;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace

std::string StructuralWitness::face() const {
  std::string out = kind + ":(";
  for (std::size_t i = 0; i < vertex.size(); ++i) {
    if (i) out += ' ';
    out += to_string(vertex[i]);
  }
  return out + ")";
}

StructuralCheck structural_volume_check(const LatticePolytope& delta) {
  if (!is_reflexive(delta)) throw GeometryError("polytope is not reflexive");
  LatticePolytope dual = dual_polytope(delta);
  const auto mu = parallel_measure(delta).facet_weights;
  const auto nu = parallel_measure(dual).facet_weights;
  StructuralCheck check;
  auto consider = [&](StructuralWitness w) {
    ++check.inequalities;
    if (w.lhs == w.rhs) ++check.equalities;
    if (w.lhs <= w.rhs) return;
    check.ok = false;
    if (!check.worst || w.slack() > check.worst->slack()) check.worst = w;
    check.violations.push_back(std::move(w));
  };
  for (std::size_t t = 0; t < delta.vertices().size(); ++t) {
    const auto& m = delta.vertices()[t];
    auto tau = facet_with_normal(dual, m);
    if (!tau) throw std::logic_error("structural_volume_check: vertex without dual facet");
    consider({"tau", t, m, nu[*tau], sum_over(mu, star(delta, t))});
  }
  for (std::size_t s = 0; s < delta.hyperplanes().size(); ++s) {
    const auto& n = delta.hyperplanes()[s].normal;
    consider({"sigma", s, n, mu[s], sum_over(nu, star(dual, n))});
  }
  return check;
}

bool li_condition(const LatticePolytope& delta) {
  for (const auto& row : vertex_facet_pairing(delta))
    for (const auto& x : row)
      if (x == 0) return false;
  return true;
}

double support_stability_diagnostic(const LatticePolytope& delta, const SemiDiscreteProblem& problem,
                                    const SolveResult& solved) {
  if (!solved.report.converged)
    throw std::invalid_argument("support diagnostic needs a converged solve (" + solved.report.message + ")");
  if (problem.kind != SourceKind::polytope) throw std::invalid_argument("support diagnostic needs a polytope source");
  std::vector<IndexSet> carriers;
  for (const auto& t : problem.targets)
    carriers.push_back(t.carrier.empty() ? carrier_face(delta, t.point) : t.carrier);
  double leak = 0;
  for (const auto& p : solved.cells.pieces) {
    const std::size_t sigma = problem.regions[p.region].label;
    const auto& c = carriers[p.atom];
    if (!std::binary_search(c.begin(), c.end(), sigma)) leak += p.mass;
  }
  return leak;
}

// ---------------------------------------------------------------------------
// Ingestion

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

namespace {

struct Token {
  std::string text;
  std::size_t column;
};

std::vector<Token> tokenize(const std::string& line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), start + 1});
  }
  return out;
}

bool is_integer(const std::string& s) {
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  return std::all_of(s.begin() + static_cast<std::ptrdiff_t>(i), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Integer parse_integer(const Token& t, std::size_t line) {
  if (!is_integer(t.text)) throw ParseError(line, t.column, "expected an integer, found '" + t.text + "'");
  return Integer(t.text[0] == '+' ? t.text.substr(1) : t.text);
}

}  // namespace

std::vector<PolytopeRecord> ingest_polytopes(std::istream& in) {
  std::vector<std::pair<std::size_t, std::vector<Token>>> lines;
  std::string text;
  for (std::size_t number = 1; std::getline(in, text); ++number) {
    if (!text.empty() && text.back() == '\r') text.pop_back();
    if (!text.empty() && text[0] == '#') continue;
    auto tokens = tokenize(text);
    if (tokens.empty()) continue;
    lines.emplace_back(number, std::move(tokens));
  }

  std::vector<PolytopeRecord> records;
  std::size_t k = 0;
  while (k < lines.size()) {
    const auto& [header_line, header] = lines[k];
    if (header.size() < 2) throw ParseError(header_line, header[0].column, "header needs two integers R C");
    Integer r = parse_integer(header[0], header_line), c = parse_integer(header[1], header_line);
    if (r <= 0 || r > 1000) throw ParseError(header_line, header[0].column, "row count out of range");
    if (c <= 0 || c > 100000) throw ParseError(header_line, header[1].column, "column count out of range");
    const auto rows = static_cast<std::size_t>(r), cols = static_cast<std::size_t>(c);
    std::vector<LatticeVector> matrix;
    for (std::size_t i = 0; i < rows; ++i) {
      if (k + 1 + i >= lines.size())
        throw ParseError(header_line, 1, "record ends after " + std::to_string(i) + " of " + std::to_string(rows) + " rows");
      const auto& [number, tokens] = lines[k + 1 + i];
      if (tokens.size() != cols)
        throw ParseError(number, tokens.size() > cols ? tokens[cols].column : tokens.back().column + tokens.back().text.size(),
                         "expected " + std::to_string(cols) + " integers, found " + std::to_string(tokens.size()));
      LatticeVector row;
      for (const auto& t : tokens) row.push_back(parse_integer(t, number));
      matrix.push_back(std::move(row));
    }
    std::vector<LatticeVector> points;
    if (rows < cols) {
      for (std::size_t j = 0; j < cols; ++j) {
        LatticeVector p;
        for (std::size_t i = 0; i < rows; ++i) p.push_back(matrix[i][j]);
        points.push_back(std::move(p));
      }
    } else {
      points = std::move(matrix);
    }
    PolytopeRecord rec;
    rec.id = records.size();
    rec.line = header_line;
    try {
      rec.polytope.emplace(std::move(points));
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
    records.push_back(std::move(rec));
    k += 1 + rows;
  }
  return records;
}

std::vector<PolytopeRecord> ingest_polytopes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return ingest_polytopes(in);
}

// ---------------------------------------------------------------------------
// Census

StabilityReport stability_report(std::size_t id, const LatticePolytope& delta, const CensusOptions& options) {
  StabilityReport report;
  report.id = id;
  report.reflexive = delta.origin_in_interior() && is_reflexive(delta);
  if (!report.reflexive) return report;
  report.li = li_condition(delta);
  auto check = structural_volume_check(delta);
  report.structural_ok = check.ok;
  report.worst_violation = check.worst;
  report.equalities = check.equalities;
  if (options.with_ot) {
    auto problem = make_polytope_problem(delta, discretize_parallel_measure(delta, options.subdivision));
    auto solved = solve(problem, options.solver);
    report.solver = solved.report;
    if (solved.report.converged)
      report.leakage = support_stability_diagnostic(delta, problem, solved);
    else
      report.error = "solver did not converge: " + solved.report.message;
  }
  return report;
}

CensusRecord census(const std::vector<PolytopeRecord>& records, const CensusOptions& options) {
  CensusRecord out;
  out.reports.resize(records.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      const auto& rec = records[i];
      StabilityReport& r = out.reports[i];
      r.id = rec.id;
      if (!rec.polytope) {
        r.error = rec.error;
        continue;
      }
      try {
        r = stability_report(rec.id, *rec.polytope, options);
      } catch (const std::exception& e) {
        r = StabilityReport{};
        r.id = rec.id;
        r.error = e.what();
      }
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(records.size())));
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& r : out.reports) {
    ++out.total;
    if (!r.reflexive || !r.structural_ok) {
      ++out.skipped;
      continue;
    }
    ++out.reflexive;
    if (!*r.structural_ok) ++out.structural_violations;
    if (*r.li) ++out.li_pass;
    if (r.equalities > 0) ++out.equality_cases;
  }
  return out;
}

std::string census_csv(const CensusRecord& record) {
  std::ostringstream os;
  os << "id,reflexive,li,structural_ok,worst_face,worst_lhs,worst_rhs,leakage\n";
  auto flag = [](const std::optional<bool>& b) { return b ? (*b ? "true" : "false") : ""; };
  for (const auto& r : record.reports) {
    os << r.id << ',';
    if (r.error.empty() || r.reflexive) os << (r.reflexive ? "true" : "false");
    os << ',' << flag(r.li) << ',' << flag(r.structural_ok) << ',';
    if (r.worst_violation)
      os << r.worst_violation->face() << ',' << to_string(r.worst_violation->lhs) << ','
         << to_string(r.worst_violation->rhs);
    else
      os << ",,";
    os << ',';
    if (r.leakage) os << format_double(*r.leakage);
    os << '\n';
  }
  return os.str();
}

std::string census_json(const CensusRecord& record) {
  using json = nlohmann::ordered_json;
  json reports = json::array();
  auto opt = [](const std::optional<bool>& b) { return b ? json(*b) : json(nullptr); };
  for (const auto& r : record.reports) {
    json j;
    j["id"] = r.id;
    j["reflexive"] = r.error.empty() || r.reflexive ? json(r.reflexive) : json(nullptr);
    j["li"] = opt(r.li);
    j["structural_ok"] = opt(r.structural_ok);
    j["worst_face"] = r.worst_violation ? json(r.worst_violation->face()) : json(nullptr);
    j["worst_lhs"] = r.worst_violation ? json(to_string(r.worst_violation->lhs)) : json(nullptr);
    j["worst_rhs"] = r.worst_violation ? json(to_string(r.worst_violation->rhs)) : json(nullptr);
    j["leakage"] = r.leakage ? json(*r.leakage) : json(nullptr);
    j["equalities"] = r.equalities;
    if (!r.error.empty()) j["error"] = r.error;
    reports.push_back(std::move(j));
  }
  json out;
  out["reports"] = std::move(reports);
  out["aggregates"] = {{"total", record.total},
                       {"reflexive", record.reflexive},
                       {"skipped", record.skipped},
                       {"structural_violations", record.structural_violations},
                       {"li_pass", record.li_pass},
                       {"equality_cases", record.equality_cases}};
  return out.dump(1) + "\n";
}

unsigned threads_from_environment() {
  const char* env = std::getenv("HESSIAN_OT_THREADS");
  if (!env) return 1;
  char* end = nullptr;
  long n = std::strtol(env, &end, 10);
  if (end == env || *end != '\0' || n < 1) return 1;
  return static_cast<unsigned>(std::min(n, 256L));
}

}  // namespace hessian_ot
