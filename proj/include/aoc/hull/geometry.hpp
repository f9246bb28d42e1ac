#pragma once

#include "aoc/common.hpp"

#include <vector>

namespace aoc::hull {

struct SimplexProjection {
    Vec weights;       // length m, on the probability simplex
    Vec point;         // P^T w
    double residual;   // ||point - q||_2
    int iterations = 0;
};

// Projects q onto the convex hull of the rows of P (m x d) by an active-set
// method: min ||P^T w - q|| s.t. w >= 0, sum w = 1. The equality-constrained
// subproblems are solved through the difference parameterization, which keeps
// the conditioning of the original points.
SimplexProjection simplex_project(const Mat& P, const Vec& q);

// Most negative directional derivative over feasible simplex directions
// e_i - e_j (j in the support of w); >= 0 at an exact optimum.
double kkt_min_directional(const Mat& P, const Vec& q, const Vec& w, double support_tol = 1e-10);

// True iff the m points (rows) are affinely independent, judged by the
// singular values of the difference vectors.
bool affine_independent(const Mat& P, double rel_tol = 1e-9);

// Hyper-volume of the simplex spanned by d+1 points in R^d:
// |det(p_2-p_1, ..., p_{d+1}-p_1)| / d!.
double simplex_volume(const Mat& P);

// Unique affine coordinates of q w.r.t. an affinely independent point set
// (least-squares onto the affine span when q lies outside it).
Vec barycentric_weights(const Mat& P, const Vec& q);

// Caratheodory reduction: rewrites the convex combination (points, weights)
// over an affinely independent subset without moving the combined point.
// Returns the kept row indices; weights is shrunk in place.
std::vector<int> caratheodory_reduce(const Mat& P, Vec& weights, double rel_tol = 1e-9);

}  // namespace aoc::hull
