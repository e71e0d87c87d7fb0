#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pairclone/model.hpp"
#include "pairclone/special.hpp"

using namespace pairclone;

namespace {

ReadCountTensor random_counts(std::size_t T, std::size_t K, RngStream& rng, int max_count = 40)
{
    ReadCountTensor data {T, K};
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t k = 0; k < K; ++k) {
            for (int g = 0; g < kNumCategories; ++g) data.n(t, k, g) = uniform_int(rng, 0, max_count);
        }
    }
    return data;
}

// sum n log(v p~) accumulated in long double from the mixture definition
long double naive_log_likelihood(const ReadCountTensor& data, const MissingnessRates& v, const ModelState& s)
{
    long double total = 0.0L;
    for (std::size_t t = 0; t < data.num_samples(); ++t) {
        for (std::size_t k = 0; k < data.num_pairs(); ++k) {
            for (int g = 0; g < kNumCategories; ++g) {
                long double p = static_cast<long double>(s.weight(t, 0)) * s.rho[g];
                for (int c = 0; c < s.num_subclones; ++c) {
                    p += static_cast<long double>(s.weight(t, c + 1)) * allele_match(HapCategory {g + 1}, s.code(k, c));
                }
                if (s.purity) p += static_cast<long double>(s.wstar[t]) * allele_match(HapCategory {g + 1}, GenotypeCode {1});
                p *= v(t, k)[missingness_case_of(g)];
                total += data.n(t, k, g) * std::log(p);
            }
        }
    }
    return total;
}

ModelState permuted(const ModelState& s, const std::vector<int>& perm)
{
    ModelState out = s;
    const int C = s.num_subclones;
    for (std::size_t k = 0; k < s.num_pairs; ++k) {
        for (int c = 0; c < C; ++c) out.z[k * C + c] = s.z[k * C + perm[c]];
    }
    for (int c = 0; c < C; ++c) {
        std::copy_n(s.log_pi.begin() + perm[c] * kNumCodes, kNumCodes, out.log_pi.begin() + c * kNumCodes);
    }
    for (std::size_t t = 0; t < s.num_samples; ++t) {
        for (int c = 0; c < C; ++c) out.log_theta[t * (C + 1) + c + 1] = s.log_theta[t * (C + 1) + perm[c] + 1];
    }
    out.refresh();
    return out;
}

} // namespace

TEST_CASE("category probabilities sum to one per coverage case")
{
    Hyperparameters hp;
    auto rng = make_stream(5, StreamRole::Reference);
    for (int rep = 0; rep < 50; ++rep) {
        const bool purity = rep % 2 == 1;
        const auto s = draw_from_prior(3, 7, 1 + rep % 4, hp, purity, rng);
        double wsum = std::accumulate(s.w.begin(), s.w.begin() + s.weight_stride(), 0.0) + s.wstar[0];
        CHECK(wsum == doctest::Approx(1.0));
        for (std::size_t t = 0; t < 3; ++t) {
            for (std::size_t k = 0; k < 7; ++k) {
                const auto p = p_tilde(s, t, k);
                CHECK(p[0] + p[1] + p[2] + p[3] == doctest::Approx(1.0));
                CHECK(p[4] + p[5] == doctest::Approx(1.0));
                CHECK(p[6] + p[7] == doctest::Approx(1.0));
                const auto full = full_category_probs(p, {0.4, 0.3, 0.3});
                CHECK(std::accumulate(full.begin(), full.end(), 0.0) == doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("p tilde on a simulation 1 row")
{
    auto s = ModelState::zeros(1, 1, 2);
    const std::vector<double> w {1e-7, 0.8, 0.2 - 1e-7};
    s.set_weights(0, w);
    s.set_code(0, 0, GenotypeCode {4});
    s.set_code(0, 1, GenotypeCode {6});
    const auto p = p_tilde(s, 0, 0);
    CHECK(p[3] == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(p[0] == doctest::Approx(0.4).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("likelihood matches a naive evaluation")
{
    Hyperparameters hp;
    auto rng = make_stream(6, StreamRole::Reference);
    for (int rep = 0; rep < 20; ++rep) {
        const bool purity = rep % 3 == 0;
        const auto data = random_counts(2, 5, rng);
        auto v = MissingnessRates::constant(2, 5, {0.5, 0.2, 0.3});
        v(1, 3) = {0.6, 0.25, 0.15};
        const auto s = draw_from_prior(2, 5, 1 + rep % 3, hp, purity, rng);
        const double ll = log_likelihood(data, v, s);
        const long double oracle = naive_log_likelihood(data, v, s);
        if (!std::isfinite(static_cast<double>(oracle))) {
            CHECK(ll == -INFINITY);
            continue;
        }
        CHECK(ll == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-10));

        // training and test parts add up to the full likelihood
        const double b = 0.93;
        CHECK(log_likelihood(data, v, s, b) + log_likelihood(data, v, s, 1.0 - b) == doctest::Approx(ll).epsilon(1e-10));
        CHECK(log_likelihood(WeightedCounts::scaled(data, b), v, s) == doctest::Approx(log_likelihood(data, v, s, b)));
        CHECK(log_likelihood(data, v, s, 1.0, 2.0) == doctest::Approx(ll / 2.0));
    }
}

TEST_CASE("zero probability with reads is minus infinity")
{
    auto s = ModelState::zeros(1, 1, 1);
    const std::vector<double> w {0.0, 1.0};
    s.set_weights(0, w);
    s.set_code(0, 0, GenotypeCode {1});
    ReadCountTensor data {1, 1};
    data.n(0, 0, 3) = 2; // "11" is impossible for an all-reference subclone
    const auto v = MissingnessRates::constant(1, 1, {0.4, 0.3, 0.3});
    CHECK(log_likelihood(data, v, s) == -INFINITY);
    data.n(0, 0, 3) = 0;
    data.n(0, 0, 0) = 3;
    CHECK(log_likelihood(data, v, s) == doctest::Approx(3.0 * std::log(0.4)));
}

TEST_CASE("likelihood and prior are invariant to subclone relabeling")
{
    Hyperparameters hp;
    auto rng = make_stream(7, StreamRole::Reference);
    const auto data = random_counts(3, 6, rng);
    const auto v = MissingnessRates::empirical(data);
    for (int rep = 0; rep < 10; ++rep) {
        const auto s = draw_from_prior(3, 6, 3, hp, false, rng);
        std::vector<int> perm {0, 1, 2};
        while (std::next_permutation(perm.begin(), perm.end())) {
            const auto p = permuted(s, perm);
            CHECK(log_likelihood(data, v, p) == doctest::Approx(log_likelihood(data, v, s)).epsilon(1e-12));
            CHECK(log_prior(p, hp) == doctest::Approx(log_prior(s, hp)).epsilon(1e-12));
        }
    }
}

TEST_CASE("purity model with no normal weight equals the plain model")
{
    Hyperparameters hp;
    auto rng = make_stream(8, StreamRole::Reference);
    const auto data = random_counts(2, 4, rng);
    const auto v = MissingnessRates::empirical(data);
    const auto plain = draw_from_prior(2, 4, 2, hp, false, rng);
    auto pure = plain;
    pure.purity = true;
    pure.logit_wstar.assign(2, -INFINITY);
    pure.refresh();
    CHECK(pure.wstar[0] == 0.0);
    CHECK(log_likelihood(data, v, pure) == doctest::Approx(log_likelihood(data, v, plain)).epsilon(1e-12));
}

TEST_CASE("prior on the number of subclones")
{
    CHECK(log_prior_num_subclones(1, 0.4) == doctest::Approx(std::log(0.24)));
    CHECK(log_prior_num_subclones(3, 0.4) == doctest::Approx(3 * std::log(0.6) + std::log(0.4)));
}

TEST_CASE("joint prior matches term-by-term densities")
{
    Hyperparameters hp;
    hp.d1_star = 2.0;
    hp.d2_star = 3.0;
    auto rng = make_stream(9, StreamRole::Reference);
    for (int rep = 0; rep < 20; ++rep) {
        const int C = 1 + rep % 4;
        const bool purity = rep % 2 == 0;
        const auto s = draw_from_prior(2, 5, C, hp, purity, rng);
        const auto terms = log_prior_terms(s, hp);

        double pi = 0.0, z = 0.0, theta = 0.0, rho = 0.0, wstar = 0.0;
        const double bb = hp.alpha / C;
        for (int c = 0; c < C; ++c) {
            std::vector<double> p(kNumCodes);
            for (int q = 0; q < kNumCodes; ++q) p[q] = std::exp(s.log_pi[c * kNumCodes + q]);
            // Beta(1, bb) at pi_1
            pi += std::lgamma(1.0 + bb) - std::lgamma(bb) + (bb - 1.0) * std::log(1.0 - p[0]);
            // Dirichlet(gamma) at the renormalized remainder
            pi += std::lgamma(9 * hp.gamma) - 9 * std::lgamma(hp.gamma);
            for (int q = 1; q < kNumCodes; ++q) pi += (hp.gamma - 1.0) * std::log(p[q] / (1.0 - p[0]));
            for (std::size_t k = 0; k < s.num_pairs; ++k) z += std::log(p[s.code_index(k, c)]);
        }
        for (std::size_t t = 0; t < 2; ++t) {
            for (int c = 0; c <= C; ++c) {
                const double x = std::exp(s.log_theta[t * (C + 1) + c]);
                const double a = c == 0 ? hp.d0 : hp.d;
                theta += (a - 1.0) * std::log(x) - x - std::lgamma(a);
            }
            if (purity) {
                const double w = s.wstar[t];
                wstar += (hp.d1_star - 1.0) * std::log(w) + (hp.d2_star - 1.0) * std::log(1.0 - w)
                         - (std::lgamma(hp.d1_star) + std::lgamma(hp.d2_star) - std::lgamma(hp.d1_star + hp.d2_star));
            }
        }
        for (int g = 0; g < kNumCategories; ++g) {
            const double x = std::exp(s.log_rho_star[g]);
            const double a = g < 4 ? hp.d1 : 2.0 * hp.d1;
            rho += (a - 1.0) * std::log(x) - x - std::lgamma(a);
        }
        CHECK(terms.pi == doctest::Approx(pi).epsilon(1e-9));
        CHECK(terms.z == doctest::Approx(z).epsilon(1e-9));
        CHECK(terms.theta == doctest::Approx(theta).epsilon(1e-9));
        CHECK(terms.rho_star == doctest::Approx(rho).epsilon(1e-9));
        CHECK(terms.wstar == doctest::Approx(wstar).epsilon(1e-9));
        CHECK(log_prior(s, hp) == doctest::Approx(pi + z + theta + rho + wstar + log_prior_num_subclones(C, hp.r)));
    }
}

TEST_CASE("prior draws have the prior weight means")
{
    Hyperparameters hp;
    auto rng = make_stream(10, StreamRole::Reference);
    const int C = 3, n = 20000;
    std::vector<double> mean(C + 1, 0.0);
    double q1 = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto s = draw_from_prior(1, 4, C, hp, false, rng);
        for (int c = 0; c <= C; ++c) mean[c] += s.weight(0, c) / n;
        for (std::size_t k = 0; k < 4; ++k) q1 += (s.code_index(k, 0) == 0) / (4.0 * n);
    }
    const double total = hp.d0 + C * hp.d;
    CHECK(mean[0] == doctest::Approx(hp.d0 / total).epsilon(0.1));
    for (int c = 1; c <= C; ++c) CHECK(mean[c] == doctest::Approx(hp.d / total).epsilon(0.03));
    // E[pi_1] under Beta(1, alpha / C)
    CHECK(q1 == doctest::Approx(1.0 / (1.0 + hp.alpha / C)).epsilon(0.03));
}

TEST_CASE("marginal SNV augmentation")
{
    ReadCountTensor pairs {2, 1};
    pairs.sample_ids = {"a", "b"};
    pairs.pair_ids = {"p1"};
    pairs.n(0, 0, 0) = 5;
    SnvCounts snvs;
    snvs.num_samples = 2;
    snvs.num_snvs = 2;
    snvs.total = {10, 20, 30, 40};
    snvs.variant = {3, 0, 30, 7};
    snvs.snv_ids = {"s1", "s2"};
    const auto aug = augment_snvs(pairs, snvs);
    REQUIRE(aug.num_pairs() == 3);
    CHECK(aug.pair_ids[2] == "s2");
    CHECK(aug.n(0, 0, 0) == 5);
    CHECK(aug.n(0, 1, 7) == 3);
    CHECK(aug.n(0, 1, 6) == 7);
    CHECK(aug.n(1, 1, 7) == 30);
    CHECK(aug.n(1, 1, 6) == 0);
    CHECK(aug.n(1, 2, 6) == 33);
    CHECK(aug.total(0, 2) == 20);
    for (int g = 0; g < 6; ++g) CHECK(aug.n(1, 2, g) == 0);

    snvs.variant[0] = 11;
    CHECK_THROWS_AS(augment_snvs(pairs, snvs), Error);
}

TEST_CASE("split genotypes")
{
    // two pairs then two SNV rows, C = 2
    const std::vector<std::uint8_t> codes {0, 3, 5, 9, 5, 0, 7, 9};
    const auto split = split_genotypes(codes, 2, 2, 2);
    CHECK(split.pair_codes == std::vector<std::uint8_t> {0, 3, 5, 9});
    CHECK(split.snv_dosage == std::vector<double> {0.5, 0.0, 1.0, 1.0});
    CHECK_THROWS_AS(split_genotypes(codes, 3, 2, 2), Error);
}
