#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pairclone/genotype.hpp"

namespace pairclone {

/// Raised for malformed inputs and contract violations at module boundaries.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Read counts n[t][k][g] for T samples, K mutation pairs and 8 categories.
class ReadCountTensor {
public:
    ReadCountTensor() = default;
    ReadCountTensor(std::size_t num_samples, std::size_t num_pairs);

    std::size_t num_samples() const noexcept { return num_samples_; }
    std::size_t num_pairs() const noexcept { return num_pairs_; }

    std::int64_t& n(std::size_t t, std::size_t k, int g_index) { return counts_[offset(t, k) + g_index]; }
    std::int64_t n(std::size_t t, std::size_t k, int g_index) const { return counts_[offset(t, k) + g_index]; }

    /// Row total N[t][k].
    std::int64_t total(std::size_t t, std::size_t k) const noexcept;

    /// Sum of N over all cells.
    std::int64_t grand_total() const noexcept;

    const std::vector<std::int64_t>& counts() const noexcept { return counts_; }

    std::vector<std::string> sample_ids;
    std::vector<std::string> pair_ids;

    /// Throws Error on negative counts or inconsistent labels.
    void validate() const;

    bool operator==(const ReadCountTensor&) const = default;

private:
    std::size_t offset(std::size_t t, std::size_t k) const noexcept { return (t * num_pairs_ + k) * kNumCategories; }

    std::size_t num_samples_ = 0;
    std::size_t num_pairs_ = 0;
    std::vector<std::int64_t> counts_;
};

/// Per-cell probabilities of the three read coverage cases
/// (both loci, left locus missing, right locus missing).
class MissingnessRates {
public:
    MissingnessRates() = default;
    MissingnessRates(std::size_t num_samples, std::size_t num_pairs);

    std::array<double, 3>& operator()(std::size_t t, std::size_t k) { return rates_[t * num_pairs_ + k]; }
    const std::array<double, 3>& operator()(std::size_t t, std::size_t k) const { return rates_[t * num_pairs_ + k]; }

    std::size_t num_samples() const noexcept { return num_samples_; }
    std::size_t num_pairs() const noexcept { return num_pairs_; }

    /// Group count over N per cell; cells without reads get (1/3, 1/3, 1/3).
    static MissingnessRates empirical(const ReadCountTensor& data);

    /// Same rates for every cell.
    static MissingnessRates constant(std::size_t num_samples, std::size_t num_pairs, std::array<double, 3> v);

private:
    std::size_t num_samples_ = 0;
    std::size_t num_pairs_ = 0;
    std::vector<std::array<double, 3>> rates_;
};

/// Marginal counts for unpaired SNVs: totals and variant-bearing reads, [t][s].
struct SnvCounts {
    std::size_t num_samples = 0;
    std::size_t num_snvs = 0;
    std::vector<std::int64_t> total;
    std::vector<std::int64_t> variant;
    std::vector<std::string> snv_ids;

    std::int64_t total_at(std::size_t t, std::size_t s) const { return total[t * num_snvs + s]; }
    std::int64_t variant_at(std::size_t t, std::size_t s) const { return variant[t * num_snvs + s]; }
};

/// Real-valued counts, used for fractional (training/test) likelihoods.
struct WeightedCounts {
    std::size_t num_samples = 0;
    std::size_t num_pairs = 0;
    std::vector<double> n; // [t][k][g]

    double operator()(std::size_t t, std::size_t k, int g_index) const { return n[(t * num_pairs + k) * kNumCategories + g_index]; }
    const double* cell(std::size_t t, std::size_t k) const { return n.data() + (t * num_pairs + k) * kNumCategories; }

    static WeightedCounts scaled(const ReadCountTensor& data, double fraction);

    /// Total count mass per sample.
    std::vector<double> sample_totals() const;
    double total() const;
};

} // namespace pairclone
