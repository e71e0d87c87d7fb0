#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pairclone/genotype.hpp"
#include "pairclone/hyperparameters.hpp"
#include "pairclone/model.hpp"

namespace pairclone {

/// One retained draw of the cold chain.
struct ArchiveSample {
    std::int64_t iteration = 0;
    std::vector<std::uint8_t> z;   // [k][c], code index 0..9
    std::vector<double> w;         // [t][c], c = 0..C
    std::vector<double> wstar;     // [t], empty outside purity mode
    std::array<double, kNumCategories> rho {};
    std::vector<double> pi;        // [c][q]

    bool operator==(const ArchiveSample&) const = default;
};

struct ArchiveManifest {
    std::string version = PAIRCLONE_VERSION;
    std::uint64_t seed = 0;
    int num_subclones = 0;
    std::size_t num_samples = 0;
    std::size_t num_pairs = 0;
    bool purity = false;
    Hyperparameters hyperparameters;
    std::string config_hash;

    bool operator==(const ArchiveManifest& other) const;
};

struct PosteriorArchive {
    ArchiveManifest manifest;
    ArchiveSample initial;
    std::vector<ArchiveSample> samples;

    bool empty() const noexcept { return samples.empty(); }
};

ArchiveSample snapshot(const ModelState& state, std::int64_t iteration);

/// Rebuilds the model state of a sample (pi, w and rho; theta is set to log w).
ModelState restore(const ArchiveSample& sample, const ArchiveManifest& manifest);

/// 64-bit FNV-1a of the text, as 16 hex digits.
std::string fnv1a_hex(std::string_view text);

/// Hash over hyperparameters, seed, C and data dimensions.
std::string config_hash(const Hyperparameters& hp, std::uint64_t seed, int num_subclones, std::size_t num_samples,
                        std::size_t num_pairs, bool purity);

/// Writes manifest.json and samples.tsv (the initial state is row iteration 0 flagged in the manifest).
void write_archive(const PosteriorArchive& archive, const std::filesystem::path& dir);

/// Throws Error("missing archive: ...") when the directory has no manifest.
PosteriorArchive read_archive(const std::filesystem::path& dir);

} // namespace pairclone
