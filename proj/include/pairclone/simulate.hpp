#pragma once

// Synthetic data with known subclone structure.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pairclone/data.hpp"
#include "pairclone/model.hpp"
#include "pairclone/summary.hpp"

namespace pairclone {

struct TruthSpec {
    std::string name;
    std::size_t num_samples = 1;
    std::size_t num_pairs = 1;
    int num_subclones = 1;
    /// K x C code indices (0..9).
    std::vector<std::uint8_t> z;
    /// Explicit weights [t][c], c = 0..C; used when base_weights is empty.
    std::vector<double> weights;
    /// Otherwise w_t ~ Dir(background_alpha, sigma_t(base_weights)), sigma_t a random permutation per sample.
    std::vector<double> base_weights;
    double background_alpha = 0.01;
    /// Missingness rates per pair.
    std::vector<std::array<double, 3>> v;
    std::int64_t min_reads = 400;
    std::int64_t max_reads = 600;
    double d1 = 1.0;
    /// Column 1 is a normal (all reference) subclone whose weight is w*.
    bool normal_first_column = false;
    /// Pairs with index >= this lose their phasing and become two SNVs each.
    std::optional<std::size_t> unphased_from;

    void validate() const;
};

struct SimulatedData {
    TruthSpec spec;
    std::uint64_t seed = 0;
    /// Complete pair counts as generated, before any phasing is dropped.
    ReadCountTensor full_counts;
    /// Phased pairs used for fitting (all pairs unless unphased_from is set).
    ReadCountTensor counts;
    /// Marginal counts of the unphased SNVs (empty when all pairs are phased).
    SnvCounts snvs;
    /// True parameters of the generating model.
    ModelState truth;
    std::vector<double> w;           // [t][c], c = 0..C
    std::array<double, kNumCategories> rho {};
    MissingnessRates v;

    /// Genotype codes of the subclones seen by a fit (the normal column removed).
    SubcloneMatrix tumor_z() const;
    /// Weights of those subclones, [t][c] with c = 0 background.
    std::vector<double> tumor_weights() const;
    /// Normal weight per sample (purity scenarios only).
    std::vector<double> normal_weights() const;
    int tumor_subclones() const;
    /// SNV dosages implied by the truth, [s][c] over tumor columns.
    std::vector<double> snv_dosage() const;
    std::size_t num_phased_pairs() const;
};

SimulatedData generate(const TruthSpec& spec, std::uint64_t seed);

/// sim1, sim2, sim3, sim3_purity, sim3_snv.
std::vector<TruthSpec> builtin_specs();
TruthSpec builtin_spec(const std::string& name);

struct FitSummary {
    SubcloneMatrix z;                // pair rows (phased pairs)
    std::vector<double> snv_dosage;  // [s][c]
    std::vector<double> w;           // [t][c], c = 0..C
    std::vector<double> wstar;       // purity mode
};

struct Score {
    int c_true = 0;
    int c_hat = 0;
    std::vector<std::size_t> sigma; // fit column matched to each true column (or >= C_hat if none)
    double z_accuracy = 0.0;        // matches / (rows * max(C_hat, C_true))
    double snv_accuracy = 1.0;
    double combined_accuracy = 0.0;
    double w_max_abs_error = 0.0;
    double w_mean_abs_error = 0.0;
};

/// Aligns fit columns to the truth by maximal entry agreement and reports errors.
Score score(const SimulatedData& truth, const FitSummary& fit);

} // namespace pairclone
