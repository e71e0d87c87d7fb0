#include "pairclone/summary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "pairclone/genotype.hpp"

namespace pairclone {

namespace {

constexpr std::array<std::array<std::uint8_t, kNumCodes>, kNumCodes> make_code_distance()
{
    std::array<std::array<std::uint8_t, kNumCodes>, kNumCodes> d {};
    for (int a = 0; a < kNumCodes; ++a) {
        for (int b = 0; b < kNumCodes; ++b) {
            const auto x = GenotypeCode {a + 1}.bits() ^ GenotypeCode {b + 1}.bits();
            d[a][b] = static_cast<std::uint8_t>(std::popcount(static_cast<unsigned>(x)));
        }
    }
    return d;
}

constexpr auto kCodeDistance = make_code_distance();

void check_shapes(const SubcloneMatrix& a, const SubcloneMatrix& b, bool same_columns)
{
    if (a.num_pairs != b.num_pairs) throw Error {"genotype matrices have different numbers of rows"};
    if (same_columns && a.num_subclones != b.num_subclones) throw Error {"genotype matrices have different numbers of columns"};
}

/// Bit-plane layout of a code matrix: for each column, 4 planes of K bits.
struct PackedMatrix {
    int num_subclones = 0;
    std::size_t words = 0;
    std::vector<std::uint64_t> bits; // [c][plane][word]

    explicit PackedMatrix(const SubcloneMatrix& m)
        : num_subclones {m.num_subclones}, words {(m.num_pairs + 63) / 64},
          bits(static_cast<std::size_t>(m.num_subclones) * 4 * words, 0)
    {
        for (std::size_t k = 0; k < m.num_pairs; ++k) {
            for (int c = 0; c < num_subclones; ++c) {
                const unsigned v = GenotypeCode {m.at(k, c) + 1}.bits();
                for (int p = 0; p < 4; ++p) {
                    if ((v >> p) & 1u) bits[(static_cast<std::size_t>(c) * 4 + p) * words + k / 64] |= std::uint64_t {1} << (k % 64);
                }
            }
        }
    }

    int column_distance(const PackedMatrix& other, int c, int c_other) const
    {
        int total = 0;
        const std::uint64_t* x = bits.data() + static_cast<std::size_t>(c) * 4 * words;
        const std::uint64_t* y = other.bits.data() + static_cast<std::size_t>(c_other) * 4 * words;
        for (std::size_t i = 0; i < 4 * words; ++i) total += std::popcount(x[i] ^ y[i]);
        return total;
    }
};

int packed_distance(const PackedMatrix& a, const PackedMatrix& b)
{
    const int C = a.num_subclones;
    if (C == 1) return a.column_distance(b, 0, 0);
    CostMatrix m {static_cast<std::size_t>(C)};
    for (int i = 0; i < C; ++i) {
        for (int j = 0; j < C; ++j) m(i, j) = a.column_distance(b, i, j);
    }
    return static_cast<int>(std::lround(solve_assignment(m).cost));
}

} // namespace

int code_distance(int code_a, int code_b)
{
    return kCodeDistance[code_a][code_b];
}

int column_distance(const SubcloneMatrix& a, const SubcloneMatrix& b, int c, int c_other)
{
    check_shapes(a, b, false);
    if (c < 0 || c >= a.num_subclones || c_other < 0 || c_other >= b.num_subclones) throw Error {"column index out of range"};
    int total = 0;
    for (std::size_t k = 0; k < a.num_pairs; ++k) total += kCodeDistance[a.at(k, c)][b.at(k, c_other)];
    return total;
}

CostMatrix column_distances(const SubcloneMatrix& a, const SubcloneMatrix& b)
{
    check_shapes(a, b, true);
    CostMatrix m {static_cast<std::size_t>(a.num_subclones)};
    for (int i = 0; i < a.num_subclones; ++i) {
        for (int j = 0; j < b.num_subclones; ++j) m(i, j) = column_distance(a, b, i, j);
    }
    return m;
}

int matrix_distance(const SubcloneMatrix& a, const SubcloneMatrix& b)
{
    return static_cast<int>(std::lround(solve_assignment(column_distances(a, b)).cost));
}

int matrix_distance_brute_force(const SubcloneMatrix& a, const SubcloneMatrix& b)
{
    return static_cast<int>(std::lround(brute_force_assignment(column_distances(a, b)).cost));
}

std::size_t medoid_index(const std::vector<SubcloneMatrix>& draws, const MedoidOptions& options, ThreadPool* pool)
{
    const std::size_t L = draws.size();
    if (L == 0) throw Error {"empty archive"};
    std::vector<PackedMatrix> packed;
    packed.reserve(L);
    for (const auto& d : draws) packed.emplace_back(d);

    std::vector<std::size_t> reference;
    if (L > options.exact_limit) {
        const std::size_t m = std::min(options.subsample, L);
        for (std::size_t i = 0; i < m; ++i) reference.push_back(i * L / m);
    } else {
        reference.resize(L);
        for (std::size_t i = 0; i < L; ++i) reference[i] = i;
    }
    std::vector<double> score(L, 0.0);
    auto work = [&](std::size_t l) {
        double s = 0.0;
        for (std::size_t r : reference) {
            if (r != l) s += packed_distance(packed[l], packed[r]);
        }
        score[l] = s;
    };
    if (pool != nullptr) {
        pool->parallel_for(L, work);
    } else {
        for (std::size_t l = 0; l < L; ++l) work(l);
    }
    return static_cast<std::size_t>(std::min_element(score.begin(), score.end()) - score.begin());
}

PointEstimate point_estimate(const PosteriorArchive& archive, const MedoidOptions& options, ThreadPool* pool)
{
    if (archive.samples.empty()) throw Error {"empty archive"};
    const auto& m = archive.manifest;
    std::vector<SubcloneMatrix> draws;
    draws.reserve(archive.samples.size());
    for (const auto& s : archive.samples) draws.push_back({m.num_pairs, m.num_subclones, s.z});
    const std::size_t l = medoid_index(draws, options, pool);
    const auto& s = archive.samples[l];
    PointEstimate est;
    est.index = l;
    est.iteration = s.iteration;
    est.z = draws[l];
    est.w = s.w;
    est.wstar = s.wstar;
    est.rho = s.rho;
    est.state = restore(s, m);
    return est;
}

std::vector<Residual> residuals(const ReadCountTensor& data, const MissingnessRates& v, const ModelState& state)
{
    if (state.num_samples != data.num_samples() || state.num_pairs != data.num_pairs()) {
        throw Error {"point estimate does not match the data dimensions"};
    }
    std::vector<Residual> out;
    out.reserve(data.num_samples() * data.num_pairs() * kNumCategories);
    for (std::size_t t = 0; t < data.num_samples(); ++t) {
        for (std::size_t k = 0; k < data.num_pairs(); ++k) {
            const auto N = data.total(t, k);
            if (N == 0) continue;
            const auto p = full_category_probs(p_tilde(state, t, k), v(t, k));
            for (int g = 0; g < kNumCategories; ++g) {
                out.push_back({t, k, g, p[g] - static_cast<double>(data.n(t, k, g)) / static_cast<double>(N)});
            }
        }
    }
    return out;
}

ResidualSummary summarize_residuals(const std::vector<Residual>& r, double band)
{
    ResidualSummary s;
    s.band = band;
    s.count = r.size();
    if (r.empty()) return s;
    std::size_t within = 0;
    for (const auto& x : r) {
        s.mean += x.value;
        s.max_abs = std::max(s.max_abs, std::fabs(x.value));
        if (std::fabs(x.value) <= band) ++within;
    }
    s.mean /= static_cast<double>(r.size());
    double ss = 0.0;
    for (const auto& x : r) ss += (x.value - s.mean) * (x.value - s.mean);
    s.sd = r.size() > 1 ? std::sqrt(ss / static_cast<double>(r.size() - 1)) : 0.0;
    s.fraction_within = static_cast<double>(within) / static_cast<double>(r.size());
    return s;
}

} // namespace pairclone
