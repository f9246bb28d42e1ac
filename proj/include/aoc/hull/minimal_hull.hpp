#pragma once

#include "aoc/hull/cache.hpp"
#include "aoc/hull/geometry.hpp"

#include <vector>

namespace aoc::hull {

enum class HullMode { Enumeration, Heuristic };

struct HullDecomposition {
    std::vector<int> support;  // corpus entry ids, ascending
    Vec weights;               // aligned with support, on the simplex
    double residual = 0.0;     // ||projected - b_t||_2
    Vec projected;             // b_hat = sum w^c b^c
    HullMode mode = HullMode::Enumeration;
    bool contained = false;
};

// Containment tolerance on the corpus residual.
inline constexpr double kContainTol = 1e-7;

// Minimal-hull search restricted to the k_search nearest neighbors of b_t
// (default 2(d_b+1)). Enumeration mode scans every (d_b+1)-subset for the
// containing subset of smallest simplex volume (ties: lexicographically
// smallest support). When nothing contains b_t the projection onto the
// neighbor hull supplies the minimal-residual decomposition, and subsets are
// ranked by containment of the projected point, which preserves the
// residual-then-volume-then-lexicographic order. Heuristic mode starts from
// the active support of that projection and swaps single points while the
// volume shrinks and the residual does not worsen.
HullDecomposition minimal_hull(const BeliefCache& cache, const Vec& b_t, int d_b, int k_search = -1);

// minimal_hull plus the existence/uniqueness checks: a contained
// decomposition must have an affinely independent support whose barycentric
// solve reproduces the weights. A violation is a geometry bug and surfaces
// as an internal error.
HullDecomposition decompose_or_reject(const BeliefCache& cache, const Vec& b_t, int d_b,
                                      int k_search = -1);

}  // namespace aoc::hull
