#pragma once

// Read alphabet and genotype codes for phased mutation pairs.
//
// A mutation pair has two loci. A short read reports, for each locus, the
// reference allele (0), the variant allele (1) or nothing (missing). A
// subclone genotype at the pair is a 2x2 binary matrix: two homologous
// strands, each carrying an allele at both loci. Strand order carries no
// information, so the 16 raw matrices collapse to 10 codes.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

namespace pairclone {

inline constexpr int kNumCategories = 8;
inline constexpr int kNumCodes = 10;

enum class LocusAllele : std::uint8_t { Ref = 0, Alt = 1, Missing = 2 };

/// Alleles carried by one strand at the two loci of a pair.
struct Strand {
    std::uint8_t locus1 = 0;
    std::uint8_t locus2 = 0;

    constexpr auto operator<=>(const Strand&) const = default;
};

/// Haplotype category of a read, g = 1..8 in the order
/// 00, 01, 10, 11, -0, -1, 0-, 1-.
class HapCategory {
public:
    constexpr explicit HapCategory(int g) : g_ {static_cast<std::uint8_t>(g)} {}

    constexpr int g() const noexcept { return g_; }
    constexpr int index() const noexcept { return g_ - 1; }

    constexpr LocusAllele locus1() const noexcept { return kPatterns[index()][0]; }
    constexpr LocusAllele locus2() const noexcept { return kPatterns[index()][1]; }

    /// 0 for reads covering both loci, 1 for left-missing, 2 for right-missing.
    constexpr int missingness_case() const noexcept { return g_ <= 4 ? 0 : (g_ <= 6 ? 1 : 2); }

    std::string_view label() const noexcept;

    static HapCategory from_label(std::string_view label);

    constexpr bool operator==(const HapCategory&) const = default;

private:
    static constexpr LocusAllele R = LocusAllele::Ref;
    static constexpr LocusAllele A = LocusAllele::Alt;
    static constexpr LocusAllele M = LocusAllele::Missing;
    static constexpr std::array<std::array<LocusAllele, 2>, 8> kPatterns {{
        {R, R}, {R, A}, {A, R}, {A, A}, {M, R}, {M, A}, {R, M}, {A, M}
    }};

    std::uint8_t g_;
};

/// Missingness case of a 0-based category index.
constexpr int missingness_case_of(int g_index) noexcept
{
    return g_index < 4 ? 0 : (g_index < 6 ? 1 : 2);
}

/// Collapsed genotype code, q = 1..10.
class GenotypeCode {
public:
    constexpr explicit GenotypeCode(int q) : q_ {static_cast<std::uint8_t>(q)} {}

    constexpr int q() const noexcept { return q_; }
    constexpr int index() const noexcept { return q_ - 1; }

    /// Canonical (lexicographically ordered) strand pair.
    constexpr std::array<Strand, 2> strands() const noexcept { return kTable[index()]; }

    /// Canonical strands flattened as (z11, z12, z21, z22), one bit each.
    constexpr std::uint8_t bits() const noexcept
    {
        const auto s = strands();
        return static_cast<std::uint8_t>((s[0].locus1 << 3) | (s[0].locus2 << 2) | (s[1].locus1 << 1) | s[1].locus2);
    }

    constexpr bool operator==(const GenotypeCode&) const = default;

    static constexpr std::array<std::array<Strand, 2>, kNumCodes> kTable {{
        {{{0, 0}, {0, 0}}}, {{{0, 0}, {0, 1}}}, {{{0, 0}, {1, 0}}}, {{{0, 0}, {1, 1}}},
        {{{0, 1}, {0, 1}}}, {{{0, 1}, {1, 0}}}, {{{0, 1}, {1, 1}}},
        {{{1, 0}, {1, 0}}}, {{{1, 0}, {1, 1}}},
        {{{1, 1}, {1, 1}}}
    }};

private:
    std::uint8_t q_;
};

/// Maps a raw strand pair to its mirror-collapsed code. Total on {0,1}^4.
constexpr GenotypeCode canonical_code(Strand a, Strand b) noexcept
{
    if (b < a) std::swap(a, b);
    for (int i = 0; i < kNumCodes; ++i) {
        if (GenotypeCode::kTable[i][0] == a && GenotypeCode::kTable[i][1] == b) return GenotypeCode {i + 1};
    }
    return GenotypeCode {1}; // unreachable for binary inputs
}

/// Probability that a read drawn from a cell with genotype q shows
/// category g, given the read's missingness case.
double allele_match(HapCategory g, GenotypeCode q) noexcept;

/// Precomputed allele_match values; immutable after construction.
class MatchTable {
public:
    MatchTable();

    double operator()(int g_index, int code_index) const noexcept { return by_code_[code_index][g_index]; }

    /// All 8 category probabilities for one code, contiguous.
    const std::array<double, kNumCategories>& column(int code_index) const noexcept { return by_code_[code_index]; }

    /// A(g,q) encoded as 0, 1, 2 for the values 0, 0.5, 1.
    std::uint8_t level(int g_index, int code_index) const noexcept { return level_[g_index][code_index]; }

private:
    std::array<std::array<double, kNumCategories>, kNumCodes> by_code_ {};
    std::array<std::array<std::uint8_t, kNumCodes>, kNumCategories> level_ {};
};

/// Shared instance; construction happens once.
const MatchTable& match_table();

/// Convenience wrapper returning a fresh table.
MatchTable build_match_table();

/// Genotype of the first locus of a code as 0, 0.5 or 1.
double first_locus_dosage(GenotypeCode q) noexcept;

std::string to_string(GenotypeCode q);

} // namespace pairclone
