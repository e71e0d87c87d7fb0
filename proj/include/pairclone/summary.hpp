#pragma once

// Point estimates under label switching and residual checks.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "pairclone/archive.hpp"
#include "pairclone/assignment.hpp"
#include "pairclone/data.hpp"
#include "pairclone/model.hpp"
#include "pairclone/thread_pool.hpp"

namespace pairclone {

/// K x C genotype codes (code indices 0..9, row-major).
struct SubcloneMatrix {
    std::size_t num_pairs = 0;
    int num_subclones = 0;
    std::vector<std::uint8_t> codes;

    std::uint8_t at(std::size_t k, int c) const { return codes[k * num_subclones + c]; }
    bool operator==(const SubcloneMatrix&) const = default;
};

/// L1 distance between the 4-bit vectors of two codes (0..4).
int code_distance(int code_a, int code_b);

/// D_cc'(Z, Z') = sum_k |z_kc - z'_kc'|_1.
int column_distance(const SubcloneMatrix& a, const SubcloneMatrix& b, int c, int c_other);

/// C x C matrix of column distances.
CostMatrix column_distances(const SubcloneMatrix& a, const SubcloneMatrix& b);

/// min over column permutations of the summed column distances.
int matrix_distance(const SubcloneMatrix& a, const SubcloneMatrix& b);

/// Same minimum by enumerating all permutations.
int matrix_distance_brute_force(const SubcloneMatrix& a, const SubcloneMatrix& b);

struct PointEstimate {
    std::size_t index = 0;        // position in the archive
    std::int64_t iteration = 0;
    SubcloneMatrix z;
    std::vector<double> w;        // [t][c], c = 0..C
    std::vector<double> wstar;    // purity mode only
    std::array<double, kNumCategories> rho {};
    ModelState state;
};

struct MedoidOptions {
    std::size_t exact_limit = 2000;  // larger archives use a subsample
    std::size_t subsample = 500;
};

/// Medoid draw under matrix_distance; ties go to the earliest draw.
PointEstimate point_estimate(const PosteriorArchive& archive, const MedoidOptions& options = {}, ThreadPool* pool = nullptr);

/// Index of the medoid among the given matrices.
std::size_t medoid_index(const std::vector<SubcloneMatrix>& draws, const MedoidOptions& options = {}, ThreadPool* pool = nullptr);

struct Residual {
    std::size_t t = 0;
    std::size_t k = 0;
    int g = 0;
    double value = 0.0; // p_hat - n / N
};

/// Residuals for every cell with reads, using the given missingness rates.
std::vector<Residual> residuals(const ReadCountTensor& data, const MissingnessRates& v, const ModelState& state);

struct ResidualSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double max_abs = 0.0;
    double fraction_within = 0.0;
    double band = 0.04;
};

ResidualSummary summarize_residuals(const std::vector<Residual>& r, double band = 0.04);

} // namespace pairclone
