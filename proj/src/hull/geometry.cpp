#include "aoc/hull/geometry.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace aoc::hull {

namespace {

// Equality-constrained least squares on the active set: weights sum to one,
// sign-unconstrained. ref is the first active point.
Vec solve_on_set(const Mat& P, const Vec& q, const std::vector<int>& set) {
    const int s = static_cast<int>(set.size());
    Vec w(s);
    if (s == 1) {
        w(0) = 1.0;
        return w;
    }
    const int d = static_cast<int>(P.cols());
    Mat D(d, s - 1);
    for (int j = 1; j < s; ++j) D.col(j - 1) = (P.row(set[j]) - P.row(set[0])).transpose();
    const Vec rhs = q - P.row(set[0]).transpose();
    const Vec z = D.completeOrthogonalDecomposition().solve(rhs);
    w(0) = 1.0 - z.sum();
    w.tail(s - 1) = z;
    return w;
}

}  // namespace

SimplexProjection simplex_project(const Mat& P, const Vec& q) {
    const int m = static_cast<int>(P.rows());
    const int d = static_cast<int>(P.cols());
    if (m < 1) throw Error(ErrorCategory::invalid_argument, "simplex_project: no points");
    if (q.size() != d) throw Error(ErrorCategory::invalid_argument, "simplex_project: dim mismatch");
    if (!P.allFinite() || !q.allFinite()) {
        throw Error(ErrorCategory::numeric_divergence, "simplex_project: non-finite inputs");
    }

    SimplexProjection out;
    out.weights = Vec::Zero(m);

    // Start from the nearest vertex (ties to the lower index).
    int start = 0;
    double best = (P.row(0).transpose() - q).squaredNorm();
    for (int i = 1; i < m; ++i) {
        const double di = (P.row(i).transpose() - q).squaredNorm();
        if (di < best) {
            best = di;
            start = i;
        }
    }
    std::vector<int> active{start};
    out.weights(start) = 1.0;

    const int max_iter = 100 + 20 * m;
    int iter = 0;
    for (; iter < max_iter; ++iter) {
        const Vec ws = solve_on_set(P, q, active);

        if (ws.minCoeff() >= -1e-12) {
            // Feasible optimum on the active set; check the dual condition.
            out.weights.setZero();
            std::vector<int> kept;
            kept.reserve(active.size());
            for (size_t j = 0; j < active.size(); ++j) {
                const double wj = std::max(ws(static_cast<int>(j)), 0.0);
                if (wj > 0.0) {
                    out.weights(active[j]) = wj;
                    kept.push_back(active[j]);
                }
            }
            active = std::move(kept);
            out.weights /= out.weights.sum();

            const Vec r = P.transpose() * out.weights - q;
            const Vec g = P * r;
            double mu = -std::numeric_limits<double>::infinity();
            for (int j : active) mu = std::max(mu, g(j));

            const double tol = 1e-11 * (1.0 + g.cwiseAbs().maxCoeff());
            int enter = -1;
            double worst = -tol;
            for (int i = 0; i < m; ++i) {
                if (out.weights(i) > 0.0) continue;
                const double gap = g(i) - mu;
                if (gap < worst) {
                    worst = gap;
                    enter = i;
                }
            }
            if (enter < 0) break;
            active.push_back(enter);
        } else {
            // Step toward the subproblem optimum until a weight hits zero.
            double alpha = 1.0;
            for (size_t j = 0; j < active.size(); ++j) {
                const double wj = out.weights(active[j]);
                const double tj = ws(static_cast<int>(j));
                if (tj < -1e-12) alpha = std::min(alpha, wj / (wj - tj));
            }
            alpha = clip(alpha, 0.0, 1.0);
            std::vector<int> next;
            next.reserve(active.size());
            Vec updated = Vec::Zero(m);
            for (size_t j = 0; j < active.size(); ++j) {
                const double wj = out.weights(active[j]);
                const double nj = wj + alpha * (ws(static_cast<int>(j)) - wj);
                if (nj > 1e-12) {
                    updated(active[j]) = nj;
                    next.push_back(active[j]);
                }
            }
            if (next.empty()) {
                // Numerical corner: restore the best single vertex.
                next.push_back(active[0]);
                updated(active[0]) = 1.0;
            }
            active = std::move(next);
            out.weights = updated / updated.sum();
        }
    }

    out.iterations = iter;
    out.point = P.transpose() * out.weights;
    out.residual = (out.point - q).norm();
    return out;
}

double kkt_min_directional(const Mat& P, const Vec& q, const Vec& w, double support_tol) {
    const Vec r = P.transpose() * w - q;
    const Vec g = P * r;
    double support_max = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < w.size(); ++i) {
        if (w(i) > support_tol) support_max = std::max(support_max, g(i));
    }
    return g.minCoeff() - support_max;
}

bool affine_independent(const Mat& P, double rel_tol) {
    const int m = static_cast<int>(P.rows());
    const int d = static_cast<int>(P.cols());
    if (m == 1) return true;
    if (m > d + 1) return false;
    Mat D(m - 1, d);
    for (int i = 1; i < m; ++i) D.row(i - 1) = P.row(i) - P.row(0);
    Eigen::JacobiSVD<Mat> svd(D);
    const Vec sv = svd.singularValues();
    const double top = sv(0);
    if (top <= 0.0) return false;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > rel_tol * top) ++rank;
    }
    return rank == m - 1;
}

double simplex_volume(const Mat& P) {
    const int d = static_cast<int>(P.cols());
    if (P.rows() != d + 1) {
        throw Error(ErrorCategory::invalid_argument, "simplex_volume: needs d+1 points");
    }
    Mat D(d, d);
    for (int i = 1; i <= d; ++i) D.row(i - 1) = P.row(i) - P.row(0);
    double factorial = 1.0;
    for (int i = 2; i <= d; ++i) factorial *= static_cast<double>(i);
    return std::abs(D.determinant()) / factorial;
}

Vec barycentric_weights(const Mat& P, const Vec& q) {
    const int s = static_cast<int>(P.rows());
    Vec w(s);
    if (s == 1) {
        w(0) = 1.0;
        return w;
    }
    Mat D(P.cols(), s - 1);
    for (int j = 1; j < s; ++j) D.col(j - 1) = (P.row(j) - P.row(0)).transpose();
    const Vec z = D.completeOrthogonalDecomposition().solve(Vec(q - P.row(0).transpose()));
    w(0) = 1.0 - z.sum();
    w.tail(s - 1) = z;
    return w;
}

std::vector<int> caratheodory_reduce(const Mat& P, Vec& weights, double rel_tol) {
    std::vector<int> keep(static_cast<size_t>(P.rows()));
    for (size_t i = 0; i < keep.size(); ++i) keep[i] = static_cast<int>(i);

    while (keep.size() > 1) {
        Mat sub(static_cast<int>(keep.size()), P.cols());
        for (size_t i = 0; i < keep.size(); ++i) sub.row(static_cast<int>(i)) = P.row(keep[i]);
        if (affine_independent(sub, rel_tol)) break;

        // Affine dependence: [p_i; 1] columns have a null vector lambda with
        // sum(lambda) = 0 and sum(lambda p_i) = 0.
        const int s = static_cast<int>(keep.size());
        Mat A(P.cols() + 1, s);
        for (int i = 0; i < s; ++i) {
            A.col(i).head(P.cols()) = sub.row(i).transpose();
            A(P.cols(), i) = 1.0;
        }
        Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
        Vec lambda = svd.matrixV().col(s - 1);
        if (lambda.maxCoeff() <= 0.0) lambda = -lambda;

        double t = std::numeric_limits<double>::infinity();
        for (int i = 0; i < s; ++i) {
            if (lambda(i) > 1e-14) t = std::min(t, weights(i) / lambda(i));
        }
        Vec reduced = weights - t * lambda;

        std::vector<int> next_keep;
        Vec next_w(s);
        int n = 0;
        bool dropped = false;
        for (int i = 0; i < s; ++i) {
            if (!dropped && reduced(i) <= 1e-12) {
                dropped = true;  // drop exactly one per round
                continue;
            }
            next_keep.push_back(keep[static_cast<size_t>(i)]);
            next_w(n++) = std::max(reduced(i), 0.0);
        }
        if (!dropped) break;  // no progress possible
        keep = std::move(next_keep);
        weights = next_w.head(n);
        weights /= weights.sum();
    }
    return keep;
}

}  // namespace aoc::hull
