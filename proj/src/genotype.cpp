#include "pairclone/genotype.hpp"

#include <stdexcept>

namespace pairclone {

namespace {

constexpr std::array<std::string_view, kNumCategories> kLabels {"00", "01", "10", "11", "-0", "-1", "0-", "1-"};

bool locus_matches(LocusAllele read, std::uint8_t strand) noexcept
{
    return read == LocusAllele::Missing || static_cast<std::uint8_t>(read) == strand;
}

} // namespace

std::string_view HapCategory::label() const noexcept
{
    return kLabels[index()];
}

HapCategory HapCategory::from_label(std::string_view label)
{
    for (int i = 0; i < kNumCategories; ++i) {
        if (kLabels[i] == label) return HapCategory {i + 1};
    }
    throw std::invalid_argument {"unknown haplotype category '" + std::string {label} + "'"};
}

double allele_match(HapCategory g, GenotypeCode q) noexcept
{
    double total = 0.0;
    for (const auto& strand : q.strands()) {
        if (locus_matches(g.locus1(), strand.locus1) && locus_matches(g.locus2(), strand.locus2)) total += 0.5;
    }
    return total;
}

MatchTable::MatchTable()
{
    for (int q = 0; q < kNumCodes; ++q) {
        for (int g = 0; g < kNumCategories; ++g) {
            const double a = allele_match(HapCategory {g + 1}, GenotypeCode {q + 1});
            by_code_[q][g] = a;
            level_[g][q] = static_cast<std::uint8_t>(a * 2.0 + 0.5);
        }
    }
}

const MatchTable& match_table()
{
    static const MatchTable table;
    return table;
}

MatchTable build_match_table()
{
    return MatchTable {};
}

double first_locus_dosage(GenotypeCode q) noexcept
{
    const auto s = q.strands();
    return 0.5 * (s[0].locus1 + s[1].locus1);
}

std::string to_string(GenotypeCode q)
{
    const auto s = q.strands();
    std::string out = "(";
    out += static_cast<char>('0' + s[0].locus1);
    out += static_cast<char>('0' + s[0].locus2);
    out += ',';
    out += static_cast<char>('0' + s[1].locus1);
    out += static_cast<char>('0' + s[1].locus2);
    out += ')';
    return out;
}

} // namespace pairclone
