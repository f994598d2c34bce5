#pragma once

// Semi-discrete optimal transport from a continuous source (the parallel
// measure on a polytope boundary, or a density on a flat torus) to finitely
// many weighted atoms. Scores are s_j(x) = <x, n_j> - psi_j on polytopes and
// -c(x, y_j) - psi_j on tori; cells are the argmax regions.
//
// Dual objective F(psi) = sum_j nu_j psi_j + ∫ max_j s_j dmu is convex and is
// minimised; its gradient is nu_j - mu(Lag_j).

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hessian_ot/exact.hpp"
#include "hessian_ot/hull.hpp"
#include "hessian_ot/polytope.hpp"

namespace hessian_ot {

enum class Arithmetic { exact, floating };

struct TargetAtom {
  RationalVector point;
  Rational mass;
  IndexSet carrier;  // dual-vertex indices (= facet indices of the source polytope) of the carrier face
};

/// A competitor inside one source region: score slope·y + offset - psi[atom]
/// in the region's local coordinates.
struct Site {
  std::size_t atom = 0;
  RationalVector slope;
  Rational offset;
};

/// A convex piece of the source with uniform density in local coordinates:
/// a polygon (counterclockwise) for 2D regions, {lo, hi} for 1D regions.
struct SourceRegion {
  std::size_t label = 0;  // facet index, or grid cell index on the torus
  std::size_t dimension = 2;
  PointSet polygon;
  Rational density;
  Rational constant;  // ψ-independent part of ∫ max_j s_j over the region
  std::vector<Site> sites;
  // Local coordinates y map to ambient points origin + frame * y.
  RationalVector origin;
  RationalMatrix frame;  // ambient_dim x dimension
};

enum class SourceKind { polytope, torus };

struct SemiDiscreteProblem {
  SourceKind kind = SourceKind::polytope;
  std::size_t ambient_dimension = 0;
  std::vector<SourceRegion> regions;
  std::vector<TargetAtom> targets;
  std::vector<Rational> facet_mass;  // polytope only: source mass per facet
};

/// Source μ_M on ∂Δ (optionally reweighted per facet and renormalised). Δ must be
/// reflexive of dimension 2 or 3. Throws std::invalid_argument on bad targets.
SemiDiscreteProblem make_polytope_problem(const LatticePolytope& delta, std::vector<TargetAtom> targets,
                                          const std::vector<Rational>& facet_factor = {});

/// Density on the torus R^d / Z^d, d in {1, 2}.
struct TorusDensity {
  std::size_t dimension = 1;
  std::size_t grid = 0;          // 0: uniform; otherwise cells per axis
  std::vector<Rational> values;  // grid^d nonnegative weights, row-major (x fastest)
};

/// Periodic cost min_k |x - y - k|^2 / 2 with atoms in [0, 1)^d.
SemiDiscreteProblem make_torus_problem(const TorusDensity& density, std::vector<TargetAtom> targets);

double torus_cost(const std::vector<double>& x, const std::vector<double>& y);

/// Atoms on ∂Δ^∨ discretising ν_N: level 0 puts one atom at the area centroid
/// of each dual facet; level k fans each facet from its centroid and splits
/// every triangle into k^2 similar ones (2k segments for polygons). Masses are
/// proportional to the parallel measure; carriers are the dual facets.
std::vector<TargetAtom> discretize_parallel_measure(const LatticePolytope& delta, int level);

/// Dual-vertex indices of the smallest face of Δ^∨ containing a point.
IndexSet carrier_face(const LatticePolytope& delta, const RationalVector& point);

struct CellPiece {
  std::size_t region = 0;
  std::size_t atom = 0;
  std::vector<std::vector<double>> polygon;  // local coordinates
  double mass = 0;
  Rational exact_mass;                        // set in exact mode
  RationalVector exact_centroid;              // local coordinates, exact mode
  std::vector<double> centroid;
  double integral = 0;  // ∫ (s_j + psi_j) dmu over the piece
};

struct LaguerreDecomposition {
  Arithmetic arithmetic = Arithmetic::floating;
  std::vector<CellPiece> pieces;
  std::vector<double> atom_mass;
  std::vector<Rational> exact_atom_mass;  // exact mode only
  double objective = 0;                   // F(psi)
  std::optional<Rational> exact_objective;
  std::vector<std::vector<double>> hessian;  // ∂²F, a weighted graph Laplacian
};

struct EvaluationOptions {
  Arithmetic arithmetic = Arithmetic::floating;
  bool reverse_order = false;  // process regions and sites backwards
  bool with_hessian = true;
  unsigned threads = 1;
};

LaguerreDecomposition laguerre_cells(const SemiDiscreteProblem& problem, const std::vector<double>& psi,
                                     const EvaluationOptions& options = {});

/// Exact evaluation at rational weights.
LaguerreDecomposition laguerre_cells_exact(const SemiDiscreteProblem& problem, const std::vector<Rational>& psi,
                                           bool reverse_order = false);

double dual_objective(const SemiDiscreteProblem& problem, const std::vector<double>& psi);
std::vector<double> gradient(const SemiDiscreteProblem& problem, const std::vector<double>& psi);

struct SolverConfig {
  double tolerance = 1e-7;
  int max_iterations = 500;
  double damping = 1.0;
  Arithmetic arithmetic = Arithmetic::floating;
  unsigned threads = 1;
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  double residual = 0;
  double dual_value = 0;
  double primal_value = 0;
  double duality_gap = 0;
  int newton_steps = 0;
  int fallback_steps = 0;
  std::vector<double> objective_trace;
  std::vector<double> residual_trace;
  std::string message;
};

struct SolveResult {
  std::vector<double> psi;
  LaguerreDecomposition cells;
  SolveReport report;
};

/// Damped Newton from psi = 0 (or a given start) with gauge psi_0 = 0. Steps are
/// accepted only when F strictly decreases and no cell drops below half of
/// min(current smallest cell, smallest target). Empty cells make the Hessian
/// singular; then a regularised step (H + eta I) and finally a plain gradient
/// step are tried.
SolveResult solve(const SemiDiscreteProblem& problem, const SolverConfig& config = {},
                  std::optional<std::vector<double>> start = std::nullopt);

struct PlanEntry {
  std::size_t source = 0;  // piece index in the decomposition
  std::size_t target = 0;
  double mass = 0;
};

struct TransportPlan {
  std::vector<PlanEntry> entries;
  double cost = 0;
  double source_residual = 0;  // max |row sum - piece mass|
  double target_residual = 0;  // max |column sum - nu_j|
};

TransportPlan extract_plan(const SemiDiscreteProblem& problem, const LaguerreDecomposition& cells);

/// Ambient coordinates of a local point of a region.
RationalVector region_point(const SourceRegion& region, const RationalVector& local);

struct MaVerification {
  bool ok = false;
  std::vector<double> residuals;  // mu(Lag_j) - nu_j
  double max_residual = 0;
};

/// Recomputes cell masses in a fresh pass with reversed region and site order.
MaVerification ma_verify(const SemiDiscreteProblem& problem, const std::vector<double>& psi, double tolerance,
                         Arithmetic arithmetic = Arithmetic::floating);

/// U_τ for a facet τ of Δ^∨ (dual facet index = vertex index of Δ): the union
/// of the cells of atoms carried by τ. Atoms on lower-dimensional faces go to
/// the lowest-index dual facet containing them, so the regions partition ∂Δ.
struct ChartRegion {
  std::size_t dual_facet = 0;
  LatticeVector anchor;        // m_τ
  IndexSet atoms;
  std::vector<std::size_t> pieces;  // indices into the decomposition
  double mass = 0;
  bool empty() const { return pieces.empty(); }
};

std::vector<ChartRegion> chart_regions_from_potential(const LatticePolytope& delta, const SemiDiscreteProblem& problem,
                                                      const LaguerreDecomposition& cells);

}  // namespace hessian_ot
