#pragma once

#include <cstddef>
#include <vector>

namespace pairclone {

/// Square cost matrix in row-major order.
struct CostMatrix {
    std::size_t size = 0;
    std::vector<double> cost;

    explicit CostMatrix(std::size_t n = 0) : size {n}, cost(n * n, 0.0) {}
    double& operator()(std::size_t i, std::size_t j) { return cost[i * size + j]; }
    double operator()(std::size_t i, std::size_t j) const { return cost[i * size + j]; }
};

struct ColumnAssignment {
    std::vector<std::size_t> sigma; // row i is matched to column sigma[i]
    double cost = 0.0;
};

/// Minimum-cost perfect matching, O(n^3) shortest augmenting paths.
ColumnAssignment solve_assignment(const CostMatrix& m);

/// Exhaustive search over all n! permutations; for tests and tiny n.
ColumnAssignment brute_force_assignment(const CostMatrix& m);

} // namespace pairclone
