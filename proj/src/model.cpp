#include "pairclone/model.hpp"

#include <cmath>
#include <limits>

#include "pairclone/special.hpp"

namespace pairclone {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double xlogy(double n, double p)
{
    if (n == 0.0) return 0.0;
    if (p <= 0.0) return kNegInf;
    return n * std::log(p);
}

} // namespace

ModelState ModelState::zeros(std::size_t num_samples, std::size_t num_pairs, int num_subclones, bool purity)
{
    if (num_subclones < 1) throw Error {"number of subclones must be >= 1"};
    ModelState s;
    s.num_subclones = num_subclones;
    s.num_samples = num_samples;
    s.num_pairs = num_pairs;
    s.purity = purity;
    s.z.assign(num_pairs * num_subclones, 0);
    s.log_pi.assign(static_cast<std::size_t>(num_subclones) * kNumCodes, -std::log(static_cast<double>(kNumCodes)));
    s.log_theta.assign(num_samples * s.weight_stride(), 0.0);
    s.log_rho_star.fill(0.0);
    s.logit_wstar.assign(num_samples, purity ? 0.0 : kNegInf);
    s.refresh();
    return s;
}

void ModelState::refresh_sample(std::size_t t)
{
    const std::size_t stride = weight_stride();
    if (w.size() != num_samples * stride) w.assign(num_samples * stride, 0.0);
    if (wstar.size() != num_samples) wstar.assign(num_samples, 0.0);
    const std::span<const double> row {log_theta.data() + t * stride, stride};
    const double total = log_sum_exp(row);
    double tumor = 1.0;
    if (purity) {
        wstar[t] = logistic(logit_wstar[t]);
        tumor = logistic(-logit_wstar[t]);
    } else {
        wstar[t] = 0.0;
    }
    for (std::size_t c = 0; c < stride; ++c) w[t * stride + c] = tumor * std::exp(row[c] - total);
}

void ModelState::refresh_rho()
{
    const std::array<std::pair<int, int>, 3> groups {{{0, 4}, {4, 6}, {6, 8}}};
    for (auto [lo, hi] : groups) {
        const double total = log_sum_exp(std::span<const double> {log_rho_star.data() + lo, static_cast<std::size_t>(hi - lo)});
        for (int g = lo; g < hi; ++g) rho[g] = std::exp(log_rho_star[g] - total);
    }
}

void ModelState::refresh()
{
    for (std::size_t t = 0; t < num_samples; ++t) refresh_sample(t);
    refresh_rho();
}

void ModelState::set_weights(std::size_t t, std::span<const double> weights, double normal_weight)
{
    const std::size_t stride = weight_stride();
    if (weights.size() != stride) throw Error {"weight row has wrong length"};
    for (std::size_t c = 0; c < stride; ++c) log_theta[t * stride + c] = std::log(weights[c]);
    if (purity) logit_wstar[t] = std::log(normal_weight) - std::log1p(-normal_weight);
    refresh_sample(t);
}

void ModelState::set_rho(const CategoryProbs& probs)
{
    for (int g = 0; g < kNumCategories; ++g) log_rho_star[g] = std::log(probs[g]);
    refresh_rho();
}

void ModelState::set_pi(int c, std::span<const double> probs)
{
    for (int q = 0; q < kNumCodes; ++q) log_pi[static_cast<std::size_t>(c) * kNumCodes + q] = std::log(probs[q]);
}

ModelState draw_from_prior(std::size_t num_samples, std::size_t num_pairs, int num_subclones, const Hyperparameters& hp,
                           bool purity, RngStream& rng)
{
    auto s = ModelState::zeros(num_samples, num_pairs, num_subclones, purity);
    const double beta_b = hp.alpha / num_subclones;
    std::array<double, kNumCodes - 1> gam;
    gam.fill(hp.gamma);
    std::array<double, kNumCodes - 1> tail;
    for (int c = 0; c < num_subclones; ++c) {
        const double la = log_gamma_variate(rng, 1.0);
        const double lb = log_gamma_variate(rng, beta_b);
        const double lt = log_sum_exp(std::array {la, lb});
        log_dirichlet_variate(rng, gam, tail);
        double* lp = s.log_pi.data() + static_cast<std::size_t>(c) * kNumCodes;
        lp[0] = la - lt;
        for (int q = 1; q < kNumCodes; ++q) lp[q] = (lb - lt) + tail[q - 1];
    }
    for (std::size_t k = 0; k < num_pairs; ++k) {
        for (int c = 0; c < num_subclones; ++c) {
            const int q = sample_log_categorical(rng, std::span<const double> {s.log_pi.data() + static_cast<std::size_t>(c) * kNumCodes, kNumCodes});
            s.z[k * num_subclones + c] = static_cast<std::uint8_t>(q);
        }
    }
    for (std::size_t t = 0; t < num_samples; ++t) {
        for (std::size_t c = 0; c < s.weight_stride(); ++c) {
            s.log_theta[t * s.weight_stride() + c] = log_gamma_variate(rng, c == 0 ? hp.d0 : hp.d);
        }
    }
    for (int g = 0; g < kNumCategories; ++g) s.log_rho_star[g] = log_gamma_variate(rng, g < 4 ? hp.d1 : 2.0 * hp.d1);
    if (purity) {
        for (std::size_t t = 0; t < num_samples; ++t) {
            const double la = log_gamma_variate(rng, hp.d1_star);
            const double lb = log_gamma_variate(rng, hp.d2_star);
            s.logit_wstar[t] = la - lb;
        }
    }
    s.refresh();
    return s;
}

CategoryProbs p_tilde(const ModelState& state, std::size_t t, std::size_t k)
{
    const auto& table = match_table();
    CategoryProbs p {};
    const double w0 = state.weight(t, 0);
    for (int g = 0; g < kNumCategories; ++g) p[g] = w0 * state.rho[g];
    for (int c = 0; c < state.num_subclones; ++c) {
        const double wc = state.weight(t, c + 1);
        const auto& col = table.column(state.code_index(k, c));
        for (int g = 0; g < kNumCategories; ++g) p[g] += wc * col[g];
    }
    if (state.purity) {
        const auto& normal = table.column(0);
        for (int g = 0; g < kNumCategories; ++g) p[g] += state.wstar[t] * normal[g];
    }
    return p;
}

CategoryProbs full_category_probs(const CategoryProbs& p_cond, const std::array<double, 3>& v)
{
    CategoryProbs p;
    for (int g = 0; g < kNumCategories; ++g) p[g] = v[missingness_case_of(g)] * p_cond[g];
    return p;
}

double log_likelihood(const ReadCountTensor& data, const MissingnessRates& v, const ModelState& state, double fraction,
                      double temper)
{
    double total = 0.0;
    for (std::size_t t = 0; t < data.num_samples(); ++t) {
        for (std::size_t k = 0; k < data.num_pairs(); ++k) {
            const auto p = full_category_probs(p_tilde(state, t, k), v(t, k));
            for (int g = 0; g < kNumCategories; ++g) total += xlogy(static_cast<double>(data.n(t, k, g)), p[g]);
        }
    }
    if (total == kNegInf) return total;
    return fraction / temper * total;
}

double log_likelihood(const WeightedCounts& data, const MissingnessRates& v, const ModelState& state)
{
    double total = 0.0;
    for (std::size_t t = 0; t < data.num_samples; ++t) {
        for (std::size_t k = 0; k < data.num_pairs; ++k) {
            const auto p = full_category_probs(p_tilde(state, t, k), v(t, k));
            const double* n = data.cell(t, k);
            for (int g = 0; g < kNumCategories; ++g) total += xlogy(n[g], p[g]);
        }
    }
    return total;
}

double log_prior_num_subclones(int num_subclones, double r)
{
    if (num_subclones < 1) return kNegInf;
    return num_subclones * std::log1p(-r) + std::log(r);
}

PriorTerms log_prior_terms(const ModelState& state, const Hyperparameters& hp)
{
    PriorTerms terms;
    const int C = state.num_subclones;
    terms.num_subclones = log_prior_num_subclones(C, hp.r);

    const double beta_b = hp.alpha / C;
    const double dir_norm = log_gamma_fn((kNumCodes - 1) * hp.gamma) - (kNumCodes - 1) * log_gamma_fn(hp.gamma);
    for (int c = 0; c < C; ++c) {
        const double* lp = state.log_pi.data() + static_cast<std::size_t>(c) * kNumCodes;
        const double log_rest = log_sum_exp(std::span<const double> {lp + 1, kNumCodes - 1});
        terms.pi += std::log(beta_b) + (beta_b - 1.0) * log_rest;
        terms.pi += dir_norm;
        for (int q = 1; q < kNumCodes; ++q) terms.pi += (hp.gamma - 1.0) * (lp[q] - log_rest);
    }
    for (std::size_t k = 0; k < state.num_pairs; ++k) {
        for (int c = 0; c < C; ++c) terms.z += state.log_pi[static_cast<std::size_t>(c) * kNumCodes + state.code_index(k, c)];
    }
    for (std::size_t t = 0; t < state.num_samples; ++t) {
        for (std::size_t c = 0; c < state.weight_stride(); ++c) {
            const double lt = state.log_theta[t * state.weight_stride() + c];
            terms.theta += log_gamma_density_at_log(lt, c == 0 ? hp.d0 : hp.d);
        }
    }
    for (int g = 0; g < kNumCategories; ++g) {
        terms.rho_star += log_gamma_density_at_log(state.log_rho_star[g], g < 4 ? hp.d1 : 2.0 * hp.d1);
    }
    if (state.purity) {
        const double norm = log_beta_fn(hp.d1_star, hp.d2_star);
        for (std::size_t t = 0; t < state.num_samples; ++t) {
            const double u = state.logit_wstar[t];
            terms.wstar += (hp.d1_star - 1.0) * log_logistic(u) + (hp.d2_star - 1.0) * log_logistic(-u) - norm;
        }
    }
    return terms;
}

double log_prior(const ModelState& state, const Hyperparameters& hp)
{
    return log_prior_terms(state, hp).total();
}

ReadCountTensor augment_snvs(const ReadCountTensor& pairs, const SnvCounts& snvs)
{
    if (snvs.num_samples != pairs.num_samples()) throw Error {"SNV table has a different number of samples"};
    const std::size_t K = pairs.num_pairs();
    ReadCountTensor out {pairs.num_samples(), K + snvs.num_snvs};
    out.sample_ids = pairs.sample_ids;
    for (std::size_t k = 0; k < K; ++k) out.pair_ids[k] = pairs.pair_ids[k];
    for (std::size_t s = 0; s < snvs.num_snvs; ++s) {
        out.pair_ids[K + s] = s < snvs.snv_ids.size() ? snvs.snv_ids[s] : "snv" + std::to_string(s + 1);
    }
    for (std::size_t t = 0; t < pairs.num_samples(); ++t) {
        for (std::size_t k = 0; k < K; ++k) {
            for (int g = 0; g < kNumCategories; ++g) out.n(t, k, g) = pairs.n(t, k, g);
        }
        for (std::size_t s = 0; s < snvs.num_snvs; ++s) {
            const auto total = snvs.total_at(t, s);
            const auto variant = snvs.variant_at(t, s);
            if (variant < 0 || total < 0) throw Error {"negative SNV count"};
            if (variant > total) throw Error {"SNV variant count exceeds total for " + out.pair_ids[K + s]};
            out.n(t, K + s, 6) = total - variant; // "0-"
            out.n(t, K + s, 7) = variant;         // "1-"
        }
    }
    return out;
}

SplitGenotypes split_genotypes(std::span<const std::uint8_t> codes, std::size_t num_pairs, std::size_t num_snvs,
                               int num_subclones)
{
    const std::size_t C = static_cast<std::size_t>(num_subclones);
    if (codes.size() != (num_pairs + num_snvs) * C) throw Error {"genotype matrix does not have K + S rows"};
    SplitGenotypes out;
    out.num_pairs = num_pairs;
    out.num_snvs = num_snvs;
    out.num_subclones = num_subclones;
    out.pair_codes.assign(codes.begin(), codes.begin() + static_cast<std::ptrdiff_t>(num_pairs * C));
    out.snv_dosage.resize(num_snvs * C);
    for (std::size_t s = 0; s < num_snvs; ++s) {
        for (std::size_t c = 0; c < C; ++c) {
            out.snv_dosage[s * C + c] = first_locus_dosage(GenotypeCode {codes[(num_pairs + s) * C + c] + 1});
        }
    }
    return out;
}

} // namespace pairclone
