#include "dandelion/assignment.hpp"

#include <algorithm>
#include <cmath>

#include "dandelion/errors.hpp"

namespace dandelion {

std::vector<std::size_t> max_weight_assignment(const ScoreMatrix& scores) {
    const std::size_t n = scores.rows();
    const std::size_t m = scores.cols();
    if (n == 0) return {};
    if (n > m) throw InvalidParameters("assignment needs rows <= cols");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < m; ++c) {
            const double s = scores(r, c);
            if (s == kForbidden) continue;
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    }
    if (!std::isfinite(lo)) lo = hi = 0.0;
    // Any single forbidden pair costs more than the full spread of feasible totals.
    const double penalty = (hi - lo + 1.0) * static_cast<double>(n + 1);
    auto cost = [&](std::size_t r, std::size_t c) {
        const double s = scores(r, c);
        return s == kForbidden ? penalty : hi - s;
    };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0);
    std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
    std::vector<double> minv(m + 1);
    std::vector<char> used(m + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= m; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= m; ++j) {
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
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assignment(n, 0);
    for (std::size_t j = 1; j <= m; ++j)
        if (p[j] != 0) assignment[p[j] - 1] = j - 1;
    return assignment;
}

double assignment_score(const ScoreMatrix& scores, std::span<const std::size_t> assignment) {
    double total = 0.0;
    for (std::size_t r = 0; r < assignment.size(); ++r) {
        const double s = scores(r, assignment[r]);
        if (s == kForbidden) return kForbidden;
        total += s;
    }
    return total;
}

}  // namespace dandelion
