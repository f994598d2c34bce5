#pragma once

// Solvability diagnostics for reflexive polytopes and a batch census over
// vertex-matrix files.

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hessian_ot/ot.hpp"
#include "hessian_ot/polytope.hpp"

namespace hessian_ot {

/// One structural inequality: for kind "tau", nu(tau) <= mu(Star(m_tau)) with
/// vertex = m_tau; for kind "sigma", mu(sigma) <= nu(Star(n_sigma)) with
/// vertex = n_sigma.
struct StructuralWitness {
  std::string kind;
  std::size_t index = 0;  // vertex index of Δ (tau) or facet index of Δ (sigma)
  LatticeVector vertex;
  Rational lhs, rhs;
  Rational slack() const { return lhs - rhs; }
  /// "tau:(x y z)" or "sigma:(x y z)".
  std::string face() const;
};

struct StructuralCheck {
  bool ok = true;
  std::size_t inequalities = 0;
  std::size_t equalities = 0;  // inequalities holding with equality
  std::vector<StructuralWitness> violations;
  std::optional<StructuralWitness> worst;  // largest slack among violations
};

StructuralCheck structural_volume_check(const LatticePolytope& delta);

/// No vertex of Δ pairs to zero with a vertex of Δ^∨.
bool li_condition(const LatticePolytope& delta);

/// Plan mass on (facet σ, atom) pairs whose carrier face does not contain n_σ.
/// Throws std::invalid_argument for a solve that did not converge.
double support_stability_diagnostic(const LatticePolytope& delta, const SemiDiscreteProblem& problem,
                                    const SolveResult& solved);

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

struct PolytopeRecord {
  std::size_t id = 0;
  std::size_t line = 0;  // header line, 1-based
  std::optional<LatticePolytope> polytope;
  std::string error;  // geometry rejection for this record
};

/// Records in file order. Malformed text throws ParseError; records whose
/// vertices fail to span are kept with an error message.
std::vector<PolytopeRecord> ingest_polytopes(std::istream& in);
std::vector<PolytopeRecord> ingest_polytopes(const std::string& path);

struct CensusOptions {
  bool with_ot = false;
  int subdivision = 1;
  SolverConfig solver;
  unsigned threads = 1;
};

struct StabilityReport {
  std::size_t id = 0;
  bool reflexive = false;
  std::optional<bool> li;
  std::optional<bool> structural_ok;
  std::optional<StructuralWitness> worst_violation;
  std::size_t equalities = 0;
  std::optional<double> leakage;
  std::optional<SolveReport> solver;
  std::string error;
};

struct CensusRecord {
  std::vector<StabilityReport> reports;
  std::size_t total = 0;
  std::size_t reflexive = 0;
  std::size_t skipped = 0;  // not reflexive or rejected
  std::size_t structural_violations = 0;
  std::size_t li_pass = 0;
  std::size_t equality_cases = 0;  // polytopes passing only with some equality
};

StabilityReport stability_report(std::size_t id, const LatticePolytope& delta, const CensusOptions& options);

/// Reports in input order; work is spread over options.threads workers.
CensusRecord census(const std::vector<PolytopeRecord>& records, const CensusOptions& options);

std::string census_csv(const CensusRecord& record);
std::string census_json(const CensusRecord& record);

/// Worker count from HESSIAN_OT_THREADS, defaulting to 1.
unsigned threads_from_environment();

}  // namespace hessian_ot
