#include "pairclone/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace pairclone {

ColumnAssignment solve_assignment(const CostMatrix& m)
{
    const std::size_t n = m.size;
    ColumnAssignment result;
    if (n == 0) return result;
    constexpr double inf = std::numeric_limits<double>::infinity();
    // 1-based potentials; column 0 is a virtual source.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<bool> used(n + 1, false);
        do {
            used[j0] = true;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = m(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    result.sigma.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) result.sigma[match[j] - 1] = j - 1;
    for (std::size_t i = 0; i < n; ++i) result.cost += m(i, result.sigma[i]);
    return result;
}

ColumnAssignment brute_force_assignment(const CostMatrix& m)
{
    const std::size_t n = m.size;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t {0});
    ColumnAssignment best;
    best.cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < n; ++i) cost += m(i, perm[i]);
        if (cost < best.cost) {
            best.cost = cost;
            best.sigma = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (n == 0) best.cost = 0.0;
    return best;
}

} // namespace pairclone
