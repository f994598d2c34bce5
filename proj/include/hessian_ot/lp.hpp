#pragma once

// Exact discrete optimal transport by the transportation simplex, used to
// certify the semi-discrete solver.

#include <cstdint>
#include <vector>

#include "hessian_ot/exact.hpp"
#include "hessian_ot/ot.hpp"

namespace hessian_ot {

struct DiscreteInstance {
  std::vector<Rational> supply;  // source masses
  std::vector<Rational> demand;  // target masses
  RationalMatrix cost;           // supply.size() x demand.size()
};

struct LpSolution {
  RationalMatrix plan;
  Rational value;
  // Optimal dual pair: u_i + v_j <= c_ij with equality on the plan's support.
  std::vector<Rational> u, v;
  int pivots = 0;
};

/// min sum c_ij x_ij over couplings of supply and demand. Throws
/// std::invalid_argument("infeasible marginals") when the totals differ or a
/// mass is negative.
LpSolution lp_oracle(const DiscreteInstance& instance);

/// F(psi) = sum_j demand_j psi_j + sum_i supply_i max_j (-c_ij - psi_j).
Rational discrete_dual_objective(const DiscreteInstance& instance, const std::vector<Rational>& psi);

Rational plan_cost(const DiscreteInstance& instance, const RationalMatrix& plan);

/// Replaces every cell piece by an atom at its exact centroid carrying its
/// exact mass, with cost -<x, n_j>. The discrete dual objective of the result
/// equals the semi-discrete one at the weights that produced the cells.
/// Polytope sources only; the cells must come from an exact evaluation.
DiscreteInstance matched_discrete_instance(const SemiDiscreteProblem& problem, const LaguerreDecomposition& cells);

/// Seeded instance with sources on the boundary of [-1,1]^3, targets on the
/// boundary of the octahedron, cost -<x, y> and random rational masses.
DiscreteInstance random_boundary_instance(std::uint64_t seed, std::size_t sources, std::size_t targets);

struct DualityCertificate {
  Rational value;         // exact optimum
  Rational gap;           // F(-v) + value, zero at an exact optimum
  Rational weak_minimum;  // smallest F(psi) + I(gamma) over the random probes
  int probes = 0;
  int pivots = 0;
};

/// Solves exactly, evaluates the dual objective at the LP duals and probes
/// weak duality with random weights against the optimal and product plans.
DualityCertificate certify_duality(const DiscreteInstance& instance, std::uint64_t seed, int probes = 3);

}  // namespace hessian_ot
