#include "aoc/hull/minimal_hull.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace aoc::hull {

namespace {

constexpr double kWeightTol = 1e-10;
constexpr double kBoxTol = 1e-6;
constexpr long kEnumerationCap = 200000;

long subset_count(int k, int s) {
    long c = 1;
    for (int i = 0; i < s; ++i) {
        c = c * (k - i) / (i + 1);
        if (c > kEnumerationCap) return kEnumerationCap + 1;
    }
    return c;
}

Mat gather_rows(const Mat& src, const std::vector<int>& rows) {
    Mat out(static_cast<int>(rows.size()), src.cols());
    for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<int>(i)) = src.row(rows[i]);
    return out;
}

// Builds the final decomposition from a projection over `neighbor_ids`
// points: prune zero weights, reduce to an affinely independent support,
// sort by entry id.
HullDecomposition finalize(const Mat& points, const std::vector<int>& neighbor_ids,
                           const SimplexProjection& proj, const Vec& b_t, HullMode mode,
                           bool contained) {
    std::vector<int> local;
    for (int i = 0; i < proj.weights.size(); ++i) {
        if (proj.weights(i) > kWeightTol) local.push_back(i);
    }
    if (local.empty()) local.push_back(0);

    Mat sub = gather_rows(points, local);
    Vec w(static_cast<int>(local.size()));
    for (size_t i = 0; i < local.size(); ++i) w(static_cast<int>(i)) = proj.weights(local[i]);
    w /= w.sum();

    const std::vector<int> kept = caratheodory_reduce(sub, w);

    HullDecomposition out;
    out.mode = mode;
    out.contained = contained;
    // (entry id, weight, neighbor row), sorted by entry id.
    std::vector<std::tuple<int, double, int>> entries;
    entries.reserve(kept.size());
    for (size_t i = 0; i < kept.size(); ++i) {
        const int local_row = local[static_cast<size_t>(kept[i])];
        entries.push_back({neighbor_ids[static_cast<size_t>(local_row)], w(static_cast<int>(i)),
                           local_row});
    }
    std::sort(entries.begin(), entries.end());

    out.support.reserve(entries.size());
    out.weights = Vec(static_cast<int>(entries.size()));
    out.projected = Vec::Zero(points.cols());
    for (size_t i = 0; i < entries.size(); ++i) {
        const auto& [entry_id, weight, neighbor_row] = entries[i];
        out.support.push_back(entry_id);
        out.weights(static_cast<int>(i)) = weight;
        out.projected += weight * points.row(neighbor_row).transpose();
    }
    out.residual = (out.projected - b_t).norm();
    return out;
}

}  // namespace

HullDecomposition minimal_hull(const BeliefCache& cache, const Vec& b_t, int d_b, int k_search) {
    if (cache.size() == 0) {
        throw Error(ErrorCategory::invalid_argument, "minimal_hull: empty cache");
    }
    if (k_search <= 0) k_search = 2 * (d_b + 1);
    const int k = std::min(k_search, cache.size());
    const int s = std::min(d_b + 1, k);

    const std::vector<int> ids = cache.knn(b_t, k);
    const Mat points = gather_rows(cache.beliefs(), ids);

    const SimplexProjection full = simplex_project(points, b_t);
    const bool contained = full.residual <= kContainTol;
    const Vec target = contained ? b_t : full.point;

    const bool enumerate = (d_b <= 8) && (subset_count(k, s) <= kEnumerationCap);

    if (!enumerate) {
        // Heuristic: active support of the projection, then single-point
        // swaps that shrink the volume without hurting the residual.
        HullDecomposition dec = finalize(points, ids, full, b_t, HullMode::Heuristic, contained);
        if (static_cast<int>(dec.support.size()) == d_b + 1) {
            std::vector<int> rows;  // neighbor rows of the current support
            for (int id : dec.support) {
                for (size_t j = 0; j < ids.size(); ++j) {
                    if (ids[j] == id) {
                        rows.push_back(static_cast<int>(j));
                        break;
                    }
                }
            }
            double best_vol = simplex_volume(gather_rows(points, rows));
            double best_res = dec.residual;
            for (int pass = 0; pass < 3; ++pass) {
                bool improved = false;
                for (size_t p = 0; p < rows.size() && !improved; ++p) {
                    for (int u = 0; u < k && !improved; ++u) {
                        if (std::find(rows.begin(), rows.end(), u) != rows.end()) continue;
                        std::vector<int> cand = rows;
                        cand[p] = u;
                        const Mat cand_pts = gather_rows(points, cand);
                        const double vol = simplex_volume(cand_pts);
                        if (vol >= best_vol - 1e-12) continue;
                        const SimplexProjection proj = simplex_project(cand_pts, b_t);
                        if (proj.residual > best_res + 1e-9) continue;
                        rows = cand;
                        best_vol = vol;
                        best_res = proj.residual;
                        std::vector<int> cand_ids(cand.size());
                        for (size_t i = 0; i < cand.size(); ++i) {
                            cand_ids[i] = ids[static_cast<size_t>(cand[i])];
                        }
                        dec = finalize(cand_pts, cand_ids, proj, b_t, HullMode::Heuristic, contained);
                        improved = true;
                    }
                }
                if (!improved) break;
            }
        }
        return dec;
    }

    // Enumeration over all s-subsets of the k neighbors.
    std::vector<int> comb(static_cast<size_t>(s));
    for (int i = 0; i < s; ++i) comb[static_cast<size_t>(i)] = i;

    bool have_best = false;
    double best_vol = std::numeric_limits<double>::infinity();
    std::vector<int> best_rows, best_sorted_ids;

    std::vector<int> sorted_ids(static_cast<size_t>(s));
    Mat sub(s, points.cols());
    while (true) {
        // Bounding-box prune: the subset hull cannot contain the target if
        // the target leaves the subset's box.
        bool plausible = true;
        for (int dim = 0; dim < points.cols() && plausible; ++dim) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (int i = 0; i < s; ++i) {
                const double v = points(comb[static_cast<size_t>(i)], dim);
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            plausible = target(dim) >= lo - kBoxTol && target(dim) <= hi + kBoxTol;
        }

        if (plausible) {
            for (int i = 0; i < s; ++i) sub.row(i) = points.row(comb[static_cast<size_t>(i)]);
            const SimplexProjection proj = simplex_project(sub, target);
            if (proj.residual <= kContainTol) {
                const double vol = (s == d_b + 1) ? simplex_volume(sub) : 0.0;
                for (int i = 0; i < s; ++i) {
                    sorted_ids[static_cast<size_t>(i)] = ids[static_cast<size_t>(comb[static_cast<size_t>(i)])];
                }
                std::sort(sorted_ids.begin(), sorted_ids.end());
                const double tol = 1e-12 * std::max(1.0, best_vol);
                const bool better =
                    !have_best || vol < best_vol - tol ||
                    (std::abs(vol - best_vol) <= tol && sorted_ids < best_sorted_ids);
                if (better) {
                    have_best = true;
                    best_vol = vol;
                    best_sorted_ids = sorted_ids;
                    best_rows.assign(comb.begin(), comb.end());
                }
            }
        }

        // next combination
        int i = s - 1;
        while (i >= 0 && comb[static_cast<size_t>(i)] == k - s + i) --i;
        if (i < 0) break;
        ++comb[static_cast<size_t>(i)];
        for (int j = i + 1; j < s; ++j) comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
    }

    if (have_best) {
        const Mat best_pts = gather_rows(points, best_rows);
        std::vector<int> best_ids(best_rows.size());
        for (size_t i = 0; i < best_rows.size(); ++i) {
            best_ids[i] = ids[static_cast<size_t>(best_rows[i])];
        }
        const SimplexProjection proj = simplex_project(best_pts, b_t);
        return finalize(best_pts, best_ids, proj, b_t, HullMode::Enumeration, contained);
    }
    // Numerical fallback: no subset certified containment of the target;
    // the full-projection support is still the minimal-residual answer.
    return finalize(points, ids, full, b_t, HullMode::Enumeration, contained);
}

HullDecomposition decompose_or_reject(const BeliefCache& cache, const Vec& b_t, int d_b,
                                      int k_search) {
    HullDecomposition dec = minimal_hull(cache, b_t, d_b, k_search);
    if (dec.residual <= kContainTol) {
        Mat pts(static_cast<int>(dec.support.size()), cache.beliefs().cols());
        for (size_t i = 0; i < dec.support.size(); ++i) {
            pts.row(static_cast<int>(i)) = cache.beliefs().row(dec.support[i]);
        }
        if (!affine_independent(pts)) {
            throw Error(ErrorCategory::internal,
                        "decompose_or_reject: contained support is affinely dependent");
        }
        const Vec bary = barycentric_weights(pts, b_t);
        if ((bary - dec.weights).cwiseAbs().maxCoeff() > 1e-6) {
            throw Error(ErrorCategory::internal,
                        "decompose_or_reject: weights disagree with the barycentric solve");
        }
    }
    return dec;
}

}  // namespace aoc::hull
