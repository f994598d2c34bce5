#pragma once

#include <utility>
#include <vector>

#include "hessian_ot/polytope.hpp"

namespace hot_test {

using hessian_ot::LatticePolytope;
using hessian_ot::LatticeVector;

inline LatticeVector v(std::initializer_list<long> xs) {
  LatticeVector out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

inline LatticePolytope make(std::initializer_list<std::initializer_list<long>> pts) {
  std::vector<LatticeVector> out;
  for (auto p : pts) out.push_back(v(p));
  return LatticePolytope(std::move(out));
}

inline LatticePolytope cube() {
  return make({{-1, -1, -1}, {-1, -1, 1}, {-1, 1, -1}, {-1, 1, 1}, {1, -1, -1}, {1, -1, 1}, {1, 1, -1}, {1, 1, 1}});
}
inline LatticePolytope octahedron() { return make({{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}); }
inline LatticePolytope simplex() { return make({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, -1, -1}}); }
inline LatticePolytope dual_simplex() { return make({{3, -1, -1}, {-1, 3, -1}, {-1, -1, 3}, {-1, -1, -1}}); }
inline LatticePolytope square() { return make({{-1, -1}, {-1, 1}, {1, -1}, {1, 1}}); }
inline LatticePolytope hexagon() { return make({{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}}); }

/// Reflexive 3-polytopes used across the exact-geometry tests.
inline std::vector<std::pair<const char*, LatticePolytope>> reflexive_corpus() {
  return {
      {"cube", cube()},
      {"octahedron", octahedron()},
      {"simplex", simplex()},
      {"dual simplex", dual_simplex()},
      {"triangular prism", make({{2, -1, 1}, {-1, 2, 1}, {-1, -1, 1}, {2, -1, -1}, {-1, 2, -1}, {-1, -1, -1}})},
      {"triangular bipyramid", make({{1, 0, 0}, {0, 1, 0}, {-1, -1, 0}, {0, 0, 1}, {0, 0, -1}})},
      {"hexagonal prism", make({{1, 0, 1}, {0, 1, 1}, {-1, 1, 1}, {-1, 0, 1}, {0, -1, 1}, {1, -1, 1},
                                {1, 0, -1}, {0, 1, -1}, {-1, 1, -1}, {-1, 0, -1}, {0, -1, -1}, {1, -1, -1}})},
      {"wedge", make({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, -1, 0}, {0, 0, -1}, {1, 1, 1}})},
      {"blown-up simplex", make({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, -1, -1}, {1, 1, 1}})},
      {"unbalanced five-vertex", make({{-1, -1, -1}, {-1, -1, 3}, {-1, 3, -1}, {0, -1, -1}, {1, 1, -1}})},
      {"unbalanced dual witness", make({{-1, -1, -1}, {-1, 1, -1}, {0, 0, 1}, {1, 0, 0}, {3, -1, -1}})},
      {"weighted simplex 1113", make({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {-1, -1, -3}})},
  };
}

}  // namespace hot_test
