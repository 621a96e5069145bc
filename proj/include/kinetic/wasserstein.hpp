#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kinetic/errors.hpp"
#include "kinetic/measure.hpp"

namespace kinetic {

inline constexpr std::size_t kAssignmentCap = 2048;

/// Exact W1 on the line: (1/N) sum |x_(i) - y_(i)| over sorted samples.
inline double w1_1d(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
    if (mu.dim() != 1 || nu.dim() != 1)
        throw DimensionMismatch("w1_1d: both measures must be one-dimensional");
    if (mu.size() != nu.size())
        throw SizeMismatch("w1_1d: point counts differ");
    std::vector<double> a = mu.coords();
    std::vector<double> b = nu.coords();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s / static_cast<double>(a.size());
}

namespace ot_detail {

/// Dense linear assignment by shortest augmenting paths with dual potentials
/// (Jonker-Volgenant style, O(N^3)). Returns the column assigned to each row.
inline std::vector<int> solve_assignment(const std::vector<double>& cost, int n) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> row_to_col(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j]) row_to_col[p[j] - 1] = j - 1;
    return row_to_col;
}

}  // namespace ot_detail

/// Exact W1 between equal-weight, equal-size point clouds via the linear
/// assignment problem with Euclidean ground cost. The optimal cost is
/// recomputed as a row-ordered sum so ties resolve identically to any other
/// exact solver.
inline double w1_assignment(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                            std::size_t cap = kAssignmentCap) {
    if (mu.dim() != nu.dim())
        throw DimensionMismatch("w1_assignment: dimension mismatch");
    if (mu.size() != nu.size())
        throw SizeMismatch("w1_assignment: point counts differ");
    const std::size_t n = mu.size();
    if (n > cap)
        throw CapExceeded("w1_assignment: point count exceeds cap; subsample first");
    std::vector<double> cost(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        auto a = mu.point(i);
        for (std::size_t j = 0; j < n; ++j) cost[i * n + j] = distance(a, nu.point(j));
    }
    const auto match = ot_detail::solve_assignment(cost, static_cast<int>(n));
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) total += cost[i * n + match[i]];
    return total / static_cast<double>(n);
}

/// W1 that routes to the 1-d fast path and subsamples above the cap with a
/// deterministic partial Fisher-Yates draw. Equal-size inputs share one index
/// set, which keeps coupled (common-random-number) comparisons coupled; the
/// shared indices carry no information for independent inputs.
inline double w1_auto(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                      Substream stream, std::size_t cap = kAssignmentCap) {
    if (mu.dim() == 1 && nu.dim() == 1 && mu.size() == nu.size()) return w1_1d(mu, nu);
    if (mu.size() <= cap && nu.size() == mu.size()) return w1_assignment(mu, nu, cap);
    auto draw_indices = [&cap](std::size_t n, Substream s) {
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = 0; i < cap; ++i) {
            const std::size_t j = i + s.uniform_index(n - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(cap);
        return idx;
    };
    auto take = [&cap](const EmpiricalMeasure& m, const std::vector<std::size_t>& idx) {
        std::vector<double> flat;
        flat.reserve(cap * m.dim());
        for (std::size_t i : idx) {
            auto p = m.point(i);
            flat.insert(flat.end(), p.begin(), p.end());
        }
        return EmpiricalMeasure(std::move(flat), m.dim());
    };
    const auto idx_mu = draw_indices(mu.size(), stream.child(1));
    const auto idx_nu =
        mu.size() == nu.size() ? idx_mu : draw_indices(nu.size(), stream.child(2));
    return w1_assignment(take(mu, idx_mu), take(nu, idx_nu), cap);
}

}  // namespace kinetic
