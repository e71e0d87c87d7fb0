#include "pairclone/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "pairclone/assignment.hpp"
#include "pairclone/rng.hpp"

namespace pairclone {

namespace {

/// Fills a K x C matrix from per-column lists of equally sized row blocks (codes 1..10).
std::vector<std::uint8_t> block_matrix(std::size_t K, const std::vector<std::vector<int>>& columns)
{
    const std::size_t C = columns.size();
    std::vector<std::uint8_t> z(K * C, 0);
    for (std::size_t c = 0; c < C; ++c) {
        const std::size_t block = K / columns[c].size();
        for (std::size_t k = 0; k < K; ++k) z[k * C + c] = static_cast<std::uint8_t>(columns[c][k / block] - 1);
    }
    return z;
}

std::vector<std::array<double, 3>> split_missingness(std::size_t K)
{
    std::vector<std::array<double, 3>> v(K);
    for (std::size_t k = 0; k < K; ++k) v[k] = k < K / 2 ? std::array {0.4, 0.3, 0.3} : std::array {0.3, 0.35, 0.35};
    return v;
}

void draw_multinomial(RngStream& rng, std::int64_t n, const CategoryProbs& p, std::int64_t* out)
{
    double remaining = 1.0;
    std::int64_t left = n;
    for (int g = 0; g < kNumCategories; ++g) {
        if (g == kNumCategories - 1) {
            out[g] = left;
            break;
        }
        const double q = remaining > 0.0 ? std::clamp(p[g] / remaining, 0.0, 1.0) : 0.0;
        const std::int64_t draw = left > 0 ? std::binomial_distribution<std::int64_t> {left, q}(rng) : 0;
        out[g] = draw;
        left -= draw;
        remaining -= p[g];
    }
}

double locus_dosage(std::uint8_t code_index, int locus)
{
    const auto s = GenotypeCode {code_index + 1}.strands();
    return locus == 0 ? 0.5 * (s[0].locus1 + s[1].locus1) : 0.5 * (s[0].locus2 + s[1].locus2);
}

} // namespace

void TruthSpec::validate() const
{
    if (num_samples < 1 || num_pairs < 1 || num_subclones < 1) throw Error {"simulation spec needs T, K, C >= 1"};
    if (z.size() != num_pairs * static_cast<std::size_t>(num_subclones)) throw Error {"simulation spec: Z has the wrong size"};
    for (auto q : z) {
        if (q >= kNumCodes) throw Error {"simulation spec: invalid genotype code"};
    }
    const std::size_t stride = static_cast<std::size_t>(num_subclones) + 1;
    if (base_weights.empty()) {
        if (weights.size() != num_samples * stride) throw Error {"simulation spec: weights have the wrong size"};
        for (std::size_t t = 0; t < num_samples; ++t) {
            double s = 0.0;
            for (std::size_t c = 0; c < stride; ++c) {
                if (weights[t * stride + c] < 0.0) throw Error {"simulation spec: negative weight"};
                s += weights[t * stride + c];
            }
            if (std::fabs(s - 1.0) > 1e-9) throw Error {"simulation spec: weights must sum to 1"};
        }
    } else if (base_weights.size() != static_cast<std::size_t>(num_subclones)) {
        throw Error {"simulation spec: need one base weight per subclone"};
    }
    if (v.size() != num_pairs) throw Error {"simulation spec: need missingness rates for every pair"};
    for (const auto& r : v) {
        if (std::fabs(r[0] + r[1] + r[2] - 1.0) > 1e-9 || r[0] < 0 || r[1] < 0 || r[2] < 0) {
            throw Error {"simulation spec: missingness rates must be a probability vector"};
        }
    }
    if (min_reads < 0 || min_reads > max_reads) throw Error {"simulation spec: bad read-depth range"};
    if (normal_first_column && num_subclones < 2) throw Error {"simulation spec: a normal column needs C >= 2"};
    if (unphased_from && *unphased_from >= num_pairs) throw Error {"simulation spec: unphased range is empty"};
}

SimulatedData generate(const TruthSpec& spec, std::uint64_t seed)
{
    spec.validate();
    const std::size_t T = spec.num_samples;
    const std::size_t K = spec.num_pairs;
    const int C = spec.num_subclones;
    const std::size_t stride = static_cast<std::size_t>(C) + 1;
    auto rng = make_stream(seed, StreamRole::Simulation);

    SimulatedData out;
    out.spec = spec;
    out.seed = seed;

    CategoryProbs rho {};
    for (auto [lo, hi] : std::array<std::pair<int, int>, 3> {{{0, 4}, {4, 6}, {6, 8}}}) {
        std::array<double, 4> log_g {};
        for (int g = lo; g < hi; ++g) log_g[g - lo] = log_gamma_variate(rng, g < 4 ? spec.d1 : 2.0 * spec.d1);
        const double total = log_sum_exp(std::span<const double> {log_g.data(), static_cast<std::size_t>(hi - lo)});
        for (int g = lo; g < hi; ++g) rho[g] = std::exp(log_g[g - lo] - total);
    }
    out.rho = rho;

    out.w.assign(T * stride, 0.0);
    if (spec.base_weights.empty()) {
        out.w = spec.weights;
    } else {
        std::vector<double> alpha(stride), log_w(stride);
        for (std::size_t t = 0; t < T; ++t) {
            std::vector<double> perm = spec.base_weights;
            for (std::size_t i = perm.size(); i > 1; --i) {
                const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(i) - 1));
                std::swap(perm[i - 1], perm[j]);
            }
            alpha[0] = spec.background_alpha;
            for (int c = 0; c < C; ++c) alpha[c + 1] = perm[c];
            log_dirichlet_variate(rng, alpha, log_w);
            for (std::size_t c = 0; c < stride; ++c) out.w[t * stride + c] = std::exp(log_w[c]);
        }
    }

    out.truth = ModelState::zeros(T, K, C, false);
    out.truth.z = spec.z;
    for (std::size_t t = 0; t < T; ++t) {
        out.truth.set_weights(t, std::span<const double> {out.w.data() + t * stride, stride});
    }
    out.truth.set_rho(rho);

    out.v = MissingnessRates {T, K};
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t k = 0; k < K; ++k) out.v(t, k) = spec.v[k];
    }

    out.full_counts = ReadCountTensor {T, K};
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t k = 0; k < K; ++k) {
            const auto N = static_cast<std::int64_t>(uniform_int(rng, static_cast<int>(spec.min_reads), static_cast<int>(spec.max_reads)));
            const auto p = full_category_probs(p_tilde(out.truth, t, k), spec.v[k]);
            std::array<std::int64_t, kNumCategories> n {};
            draw_multinomial(rng, N, p, n.data());
            for (int g = 0; g < kNumCategories; ++g) out.full_counts.n(t, k, g) = n[g];
        }
    }

    if (!spec.unphased_from) {
        out.counts = out.full_counts;
        return out;
    }
    const std::size_t K0 = *spec.unphased_from;
    out.counts = ReadCountTensor {T, K0};
    out.counts.sample_ids = out.full_counts.sample_ids;
    for (std::size_t k = 0; k < K0; ++k) out.counts.pair_ids[k] = out.full_counts.pair_ids[k];
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t k = 0; k < K0; ++k) {
            for (int g = 0; g < kNumCategories; ++g) out.counts.n(t, k, g) = out.full_counts.n(t, k, g);
        }
    }
    const std::size_t S = 2 * (K - K0);
    auto& snv = out.snvs;
    snv.num_samples = T;
    snv.num_snvs = S;
    snv.total.assign(T * S, 0);
    snv.variant.assign(T * S, 0);
    for (std::size_t k = K0; k < K; ++k) {
        snv.snv_ids.push_back(out.full_counts.pair_ids[k] + "_a");
        snv.snv_ids.push_back(out.full_counts.pair_ids[k] + "_b");
    }
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t k = K0; k < K; ++k) {
            const auto n = [&](int g) { return out.full_counts.n(t, k, g); };
            const std::size_t s = 2 * (k - K0);
            // categories: 00 01 10 11 -0 -1 0- 1-
            snv.total[t * S + s] = n(0) + n(1) + n(2) + n(3) + n(6) + n(7);
            snv.variant[t * S + s] = n(2) + n(3) + n(7);
            snv.total[t * S + s + 1] = n(0) + n(1) + n(2) + n(3) + n(4) + n(5);
            snv.variant[t * S + s + 1] = n(1) + n(3) + n(5);
        }
    }
    return out;
}

int SimulatedData::tumor_subclones() const
{
    return spec.normal_first_column ? spec.num_subclones - 1 : spec.num_subclones;
}

std::size_t SimulatedData::num_phased_pairs() const
{
    return spec.unphased_from ? *spec.unphased_from : spec.num_pairs;
}

SubcloneMatrix SimulatedData::tumor_z() const
{
    const int C = spec.num_subclones;
    const int first = spec.normal_first_column ? 1 : 0;
    const std::size_t K = num_phased_pairs();
    SubcloneMatrix m {K, C - first, {}};
    for (std::size_t k = 0; k < K; ++k) {
        for (int c = first; c < C; ++c) m.codes.push_back(spec.z[k * C + c]);
    }
    return m;
}

std::vector<double> SimulatedData::tumor_weights() const
{
    const int C = spec.num_subclones;
    const std::size_t stride = static_cast<std::size_t>(C) + 1;
    std::vector<double> out;
    for (std::size_t t = 0; t < spec.num_samples; ++t) {
        out.push_back(w[t * stride]);
        for (int c = spec.normal_first_column ? 2 : 1; c <= C; ++c) out.push_back(w[t * stride + c]);
    }
    return out;
}

std::vector<double> SimulatedData::normal_weights() const
{
    std::vector<double> out;
    if (!spec.normal_first_column) return out;
    const std::size_t stride = static_cast<std::size_t>(spec.num_subclones) + 1;
    for (std::size_t t = 0; t < spec.num_samples; ++t) out.push_back(w[t * stride + 1]);
    return out;
}

std::vector<double> SimulatedData::snv_dosage() const
{
    std::vector<double> out;
    if (!spec.unphased_from) return out;
    const int C = spec.num_subclones;
    const int first = spec.normal_first_column ? 1 : 0;
    for (std::size_t k = *spec.unphased_from; k < spec.num_pairs; ++k) {
        for (int locus = 0; locus < 2; ++locus) {
            for (int c = first; c < C; ++c) out.push_back(locus_dosage(spec.z[k * C + c], locus));
        }
    }
    return out;
}

std::vector<TruthSpec> builtin_specs()
{
    std::vector<TruthSpec> specs;

    TruthSpec sim1;
    sim1.name = "sim1";
    sim1.num_samples = 1;
    sim1.num_pairs = 40;
    sim1.num_subclones = 2;
    sim1.z = block_matrix(40, {{1, 4, 4, 1}, {1, 1, 6, 6}});
    sim1.weights = {1e-7, 0.8, 0.2 - 1e-7};
    sim1.v.assign(40, {0.4, 0.3, 0.3});
    specs.push_back(sim1);

    TruthSpec sim2;
    sim2.name = "sim2";
    sim2.num_samples = 4;
    sim2.num_pairs = 100;
    sim2.num_subclones = 4;
    sim2.z = block_matrix(100, {{2, 2, 4, 6, 1}, {1, 3, 4, 1, 7}, {5, 1, 6, 9, 1}, {10, 5, 8, 1, 9}});
    sim2.base_weights = {20, 10, 5, 2};
    sim2.v = split_missingness(100);
    specs.push_back(sim2);

    TruthSpec sim3;
    sim3.name = "sim3";
    sim3.num_samples = 6;
    sim3.num_pairs = 100;
    sim3.num_subclones = 3;
    sim3.z = block_matrix(100, {{4, 1, 7, 2}, {6, 3, 1, 10}, {1, 5, 9, 4}});
    sim3.base_weights = {14, 6, 3};
    sim3.v = split_missingness(100);
    specs.push_back(sim3);

    TruthSpec purity = sim3;
    purity.name = "sim3_purity";
    purity.z = block_matrix(100, {{1}, {6, 3, 1, 10}, {1, 5, 9, 4}});
    purity.normal_first_column = true;
    specs.push_back(purity);

    TruthSpec snv = sim3;
    snv.name = "sim3_snv";
    snv.unphased_from = 50;
    specs.push_back(snv);

    return specs;
}

TruthSpec builtin_spec(const std::string& name)
{
    for (auto& s : builtin_specs()) {
        if (s.name == name) return s;
    }
    throw Error {"unknown scenario '" + name + "' (expected sim1, sim2, sim3, sim3_purity or sim3_snv)"};
}

Score score(const SimulatedData& truth, const FitSummary& fit)
{
    const auto z_true = truth.tumor_z();
    const auto dosage_true = truth.snv_dosage();
    const int Ct = z_true.num_subclones;
    const int Ch = fit.z.num_subclones;
    const std::size_t K = z_true.num_pairs;
    const std::size_t S = Ct > 0 ? dosage_true.size() / static_cast<std::size_t>(Ct) : 0;
    if (fit.z.num_pairs != K) throw Error {"score: fitted Z has " + std::to_string(fit.z.num_pairs) + " rows, truth has " + std::to_string(K)};
    if (S > 0 && fit.snv_dosage.size() != S * static_cast<std::size_t>(Ch)) throw Error {"score: SNV dosage matrix has the wrong size"};
    const std::size_t T = truth.spec.num_samples;
    if (fit.w.size() != T * (static_cast<std::size_t>(Ch) + 1)) throw Error {"score: weight matrix has the wrong size"};

    const int n = std::max(Ct, Ch);
    CostMatrix cost {static_cast<std::size_t>(n)};
    std::vector<double> pair_matches(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < Ct; ++i) {
        for (int j = 0; j < Ch; ++j) {
            double pm = 0.0, sm = 0.0;
            for (std::size_t k = 0; k < K; ++k) pm += z_true.at(k, i) == fit.z.at(k, j) ? 1.0 : 0.0;
            for (std::size_t s = 0; s < S; ++s) sm += dosage_true[s * Ct + i] == fit.snv_dosage[s * Ch + j] ? 1.0 : 0.0;
            pair_matches[i * n + j] = pm;
            cost(i, j) = -(pm + sm);
        }
    }
    const auto assignment = solve_assignment(cost);

    Score sc;
    sc.c_true = Ct;
    sc.c_hat = Ch;
    sc.sigma.assign(assignment.sigma.begin(), assignment.sigma.begin() + Ct);
    double pm_total = 0.0;
    for (int i = 0; i < Ct; ++i) pm_total += pair_matches[i * n + assignment.sigma[i]];
    const double all_total = -assignment.cost;
    sc.z_accuracy = pm_total / static_cast<double>(K * n);
    sc.snv_accuracy = S > 0 ? (all_total - pm_total) / static_cast<double>(S * n) : 1.0;
    sc.combined_accuracy = all_total / static_cast<double>((K + S) * n);

    const auto w_true = truth.tumor_weights();
    const auto ws_true = truth.normal_weights();
    const std::size_t st = static_cast<std::size_t>(Ct) + 1;
    const std::size_t sh = static_cast<std::size_t>(Ch) + 1;
    std::vector<double> errors;
    for (std::size_t t = 0; t < T; ++t) {
        errors.push_back(std::fabs(w_true[t * st] - fit.w[t * sh]));
        for (int i = 0; i < Ct; ++i) {
            const auto j = assignment.sigma[i];
            const double est = static_cast<int>(j) < Ch ? fit.w[t * sh + j + 1] : 0.0;
            errors.push_back(std::fabs(w_true[t * st + i + 1] - est));
        }
        for (int j = 0; j < Ch; ++j) {
            bool used = false;
            for (int i = 0; i < Ct; ++i) used = used || static_cast<int>(assignment.sigma[i]) == j;
            if (!used) errors.push_back(fit.w[t * sh + j + 1]);
        }
        if (!ws_true.empty()) errors.push_back(std::fabs(ws_true[t] - (fit.wstar.empty() ? 0.0 : fit.wstar[t])));
    }
    for (double e : errors) {
        sc.w_max_abs_error = std::max(sc.w_max_abs_error, e);
        sc.w_mean_abs_error += e;
    }
    sc.w_mean_abs_error /= static_cast<double>(errors.size());
    return sc;
}

} // namespace pairclone
