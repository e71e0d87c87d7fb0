#include "doctest.h"

#include <set>

#include "pairclone/genotype.hpp"

using namespace pairclone;

namespace {

// Independent evaluation of the allele match from strand bits.
double naive_match(int g, int q)
{
    static const char* reads[8] = {"00", "01", "10", "11", "-0", "-1", "0-", "1-"};
    static const char* codes[10][2] = {{"00", "00"}, {"00", "01"}, {"00", "10"}, {"00", "11"}, {"01", "01"},
                                       {"01", "10"}, {"01", "11"}, {"10", "10"}, {"10", "11"}, {"11", "11"}};
    const char* h = reads[g - 1];
    double total = 0.0;
    for (int j = 0; j < 2; ++j) {
        const char* s = codes[q - 1][j];
        const bool m1 = h[0] == '-' || h[0] == s[0];
        const bool m2 = h[1] == '-' || h[1] == s[1];
        if (m1 && m2) total += 0.5;
    }
    return total;
}

} // namespace

TEST_CASE("canonical codes")
{
    CHECK(canonical_code({0, 0}, {0, 0}).q() == 1);
    CHECK(canonical_code({1, 0}, {0, 1}).q() == 6);
    CHECK(canonical_code({1, 1}, {0, 1}).q() == 7);

    std::set<int> seen;
    int count = 0;
    for (int bits = 0; bits < 16; ++bits) {
        const Strand a {static_cast<std::uint8_t>(bits >> 3 & 1), static_cast<std::uint8_t>(bits >> 2 & 1)};
        const Strand b {static_cast<std::uint8_t>(bits >> 1 & 1), static_cast<std::uint8_t>(bits & 1)};
        const auto q = canonical_code(a, b);
        CHECK(q == canonical_code(b, a));
        const auto s = q.strands();
        CHECK(((s[0] == a && s[1] == b) || (s[0] == b && s[1] == a)));
        CHECK(s[0] <= s[1]);
        seen.insert(q.q());
        ++count;
    }
    CHECK(count == 16);
    CHECK(seen.size() == 10);
}

TEST_CASE("category alphabet")
{
    const char* labels[8] = {"00", "01", "10", "11", "-0", "-1", "0-", "1-"};
    for (int g = 1; g <= 8; ++g) {
        const HapCategory h {g};
        CHECK(h.missingness_case() == (g <= 4 ? 0 : g <= 6 ? 1 : 2));
        CHECK(HapCategory::from_label(h.label()) == h);
        CHECK(h.label() == labels[g - 1]);
    }
}

TEST_CASE("allele match examples")
{
    CHECK(allele_match(HapCategory {1}, GenotypeCode {1}) == 1.0);
    CHECK(allele_match(HapCategory {4}, GenotypeCode {4}) == 0.5);
    CHECK(allele_match(HapCategory {6}, GenotypeCode {6}) == 0.5);
}

TEST_CASE("match table equals exhaustive enumeration")
{
    const auto table = build_match_table();
    for (int q = 1; q <= 10; ++q) {
        double both = 0.0, left = 0.0, right = 0.0;
        for (int g = 1; g <= 8; ++g) {
            const double a = table(g - 1, q - 1);
            CHECK(a == naive_match(g, q));
            CHECK(a == allele_match(HapCategory {g}, GenotypeCode {q}));
            CHECK(table.level(g - 1, q - 1) == static_cast<int>(2 * a));
            (g <= 4 ? both : g <= 6 ? left : right) += a;
        }
        CHECK(both == 1.0);
        CHECK(left == 1.0);
        CHECK(right == 1.0);
    }
}

TEST_CASE("first locus dosage")
{
    CHECK(first_locus_dosage(GenotypeCode {6}) == 0.5);
    CHECK(first_locus_dosage(GenotypeCode {1}) == 0.0);
    CHECK(first_locus_dosage(GenotypeCode {4}) == 0.5);
    CHECK(first_locus_dosage(GenotypeCode {8}) == 1.0);
    CHECK(first_locus_dosage(GenotypeCode {10}) == 1.0);
}
