#include "doctest.h"

#include <cmath>
#include <numeric>

#include "pairclone/sampler.hpp"

using namespace pairclone;

namespace {

ReadCountTensor random_counts(std::size_t T, std::size_t K, RngStream& rng, int max_count)
{
    ReadCountTensor data {T, K};
    for (std::size_t t = 0; t < T; ++t) {
        for (std::size_t k = 0; k < K; ++k) {
            for (int g = 0; g < kNumCategories; ++g) data.n(t, k, g) = uniform_int(rng, 0, max_count);
        }
    }
    return data;
}

std::array<double, kNumCodes> normalized(std::array<double, kNumCodes> lp)
{
    const double total = log_sum_exp(lp);
    for (auto& x : lp) x -= total;
    return lp;
}

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments(const std::vector<double>& xs)
{
    Moments m;
    for (double x : xs) m.mean += x / xs.size();
    for (double x : xs) m.var += (x - m.mean) * (x - m.mean) / xs.size();
    return m;
}

} // namespace

TEST_CASE("z conditional equals direct enumeration")
{
    Hyperparameters hp;
    auto rng = make_stream(20, StreamRole::Reference);
    struct Case {
        std::size_t T, K;
        int C;
        bool purity;
        double temperature;
    };
    for (const Case cs : {Case {1, 1, 1, false, 1.0}, Case {2, 1, 3, false, 1.0}, Case {3, 2, 2, true, 1.0},
                          Case {1, 1, 2, false, 2.5}}) {
        for (int rep = 0; rep < 10; ++rep) {
            const auto data = random_counts(cs.T, cs.K, rng, 30);
            const auto v = MissingnessRates::empirical(data);
            const auto sdata = SamplerData::from(data, v);
            auto state = draw_from_prior(cs.T, cs.K, cs.C, hp, cs.purity, rng);
            ChainState chain {sdata, hp, state, cs.temperature, make_stream(1, StreamRole::Chain)};
            for (std::size_t k = 0; k < cs.K; ++k) {
                for (int c = 0; c < cs.C; ++c) {
                    const auto got = normalized(chain.z_log_conditional(k, c));
                    std::array<double, kNumCodes> direct;
                    for (int q = 0; q < kNumCodes; ++q) {
                        auto s = state;
                        s.set_code(k, c, GenotypeCode {q + 1});
                        direct[q] = (log_likelihood(data, v, s) + s.log_pi[c * kNumCodes + q]) / cs.temperature;
                    }
                    const auto want = normalized(direct);
                    for (int q = 0; q < kNumCodes; ++q) {
                        if (want[q] == -INFINITY) {
                            CHECK(got[q] == -INFINITY);
                        } else {
                            CHECK(got[q] == doctest::Approx(want[q]).epsilon(1e-9));
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("joint pair conditional equals direct enumeration")
{
    Hyperparameters hp;
    auto rng = make_stream(26, StreamRole::Reference);
    for (const bool purity : {false, true}) {
        for (int rep = 0; rep < 5; ++rep) {
            const int C = 2 + rep % 3;
            const auto data = random_counts(2, 2, rng, 30);
            const auto v = MissingnessRates::empirical(data);
            const auto sdata = SamplerData::from(data, v);
            const auto state = draw_from_prior(2, 2, C, hp, purity, rng);
            const double temperature = rep == 0 ? 1.7 : 1.0;
            ChainState chain {sdata, hp, state, temperature, make_stream(1, StreamRole::Chain)};
            const int c = rep % C, d = (rep + 1) % C;
            const auto got = chain.z_pair_log_conditional(1, c, d);
            std::array<double, kNumCodes * kNumCodes> direct;
            for (int qa = 0; qa < kNumCodes; ++qa) {
                for (int qb = 0; qb < kNumCodes; ++qb) {
                    auto s = state;
                    s.set_code(1, c, GenotypeCode {qa + 1});
                    s.set_code(1, d, GenotypeCode {qb + 1});
                    direct[qa * kNumCodes + qb] = (log_likelihood(data, v, s) + s.log_pi[c * kNumCodes + qa] +
                                                   s.log_pi[d * kNumCodes + qb]) / temperature;
                }
            }
            const double g0 = log_sum_exp(got), d0 = log_sum_exp(direct);
            for (std::size_t i = 0; i < got.size(); ++i) {
                if (direct[i] == -INFINITY) {
                    CHECK(got[i] == -INFINITY);
                } else {
                    CHECK(got[i] - g0 == doctest::Approx(direct[i] - d0).epsilon(1e-9));
                }
            }
        }
    }
}

TEST_CASE("cached likelihood tracks the state through sweeps")
{
    Hyperparameters hp;
    auto rng = make_stream(21, StreamRole::Reference);
    const auto data = random_counts(2, 6, rng, 25);
    const auto v = MissingnessRates::empirical(data);
    const auto sdata = SamplerData::from(data, v);
    for (bool purity : {false, true}) {
        ChainState chain {sdata, hp, draw_from_prior(2, 6, 2, hp, purity, rng), 1.0, make_stream(2, StreamRole::Chain)};
        for (int i = 0; i < 200; ++i) {
            chain.sweep();
            const double direct = log_likelihood(data, v, chain.state());
            REQUIRE(chain.log_likelihood() == doctest::Approx(direct).epsilon(1e-9));
        }
        const auto& acc = chain.acceptance();
        CHECK(acc.theta_accepted > 0);
        CHECK(acc.rho_accepted > 0);
        if (purity) CHECK(acc.wstar_accepted > 0);
    }
}

TEST_CASE("pi update is the conjugate beta-dirichlet draw")
{
    Hyperparameters hp;
    const std::size_t K = 40;
    ReadCountTensor data {1, K};
    const auto v = MissingnessRates::empirical(data);
    const auto sdata = SamplerData::from(data, v);
    auto state = ModelState::zeros(1, K, 2);
    for (std::size_t k = 0; k < K; ++k) {
        state.set_code(k, 0, GenotypeCode {k < 20 ? 1 : (k < 30 ? 4 : 6)});
        state.set_code(k, 1, GenotypeCode {1});
    }
    for (double temperature : {1.0, 2.0}) {
        ChainState chain {sdata, hp, state, temperature, make_stream(3, StreamRole::Chain)};
        const int n = 100000;
        std::vector<double> pi1(n), pi4(n);
        for (int i = 0; i < n; ++i) {
            chain.update_pi();
            pi1[i] = std::exp(chain.state().log_pi[0]);
            pi4[i] = std::exp(chain.state().log_pi[3]);
        }
        // untempered: pi_11 ~ Beta(m + 1, K - m + alpha / C) = Beta(21, 22)
        const auto shape = [&](double a) { return (a - 1.0) / temperature + 1.0; };
        const double a = shape(21.0), b = shape(22.0);
        const auto m = moments(pi1);
        const double mean = a / (a + b);
        const double var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
        CHECK(m.mean == doctest::Approx(mean).epsilon(0.005));
        CHECK(m.var == doctest::Approx(var).epsilon(0.03));

        // pi_14 = (1 - pi_11) * Dir component with shapes 2 + counts
        double rest = 0.0;
        for (int q = 1; q < kNumCodes; ++q) rest += shape(hp.gamma + (q == 3 ? 10 : q == 5 ? 10 : 0));
        const double want4 = (b / (a + b)) * shape(hp.gamma + 10.0) / rest;
        CHECK(moments(pi4).mean == doctest::Approx(want4).epsilon(0.01));
    }
}

TEST_CASE("no-data chain recovers the weight and noise priors")
{
    Hyperparameters hp;
    hp.d0 = 1.0;
    hp.d = 2.0;
    hp.d1 = 1.5;
    hp.theta_step = 1.0;
    hp.rho_step = 1.0;
    const std::size_t K = 3;
    ReadCountTensor data {1, K};
    const auto v = MissingnessRates::empirical(data);
    const auto sdata = SamplerData::from(data, v);
    auto rng = make_stream(22, StreamRole::Reference);
    ChainState chain {sdata, hp, draw_from_prior(1, K, 2, hp, false, rng), 1.0, make_stream(4, StreamRole::Chain)};
    const int n = 200000, burn = 1000;
    std::vector<double> w0, w1, w2, rho1, rho5, w1sq;
    for (int i = 0; i < n + burn; ++i) {
        chain.sweep();
        if (i < burn) continue;
        const auto& s = chain.state();
        w0.push_back(s.weight(0, 0));
        w1.push_back(s.weight(0, 1));
        w2.push_back(s.weight(0, 2));
        rho1.push_back(s.rho[0]);
        rho5.push_back(s.rho[4]);
    }
    // Dirichlet(1, 2, 2): means 0.2, 0.4, 0.4; var of w1 = 2 * 3 / (25 * 6)
    CHECK(moments(w0).mean == doctest::Approx(0.2).epsilon(0.05));
    CHECK(moments(w1).mean == doctest::Approx(0.4).epsilon(0.05));
    CHECK(moments(w2).mean == doctest::Approx(0.4).epsilon(0.05));
    CHECK(moments(w1).var == doctest::Approx(0.04).epsilon(0.1));
    // rho: Dir(1.5 x 4) on g = 1..4 and Dir(3, 3) on g = 5, 6
    CHECK(moments(rho1).mean == doctest::Approx(0.25).epsilon(0.05));
    CHECK(moments(rho1).var == doctest::Approx(0.25 * 0.75 / 7.0).epsilon(0.1));
    CHECK(moments(rho5).mean == doctest::Approx(0.5).epsilon(0.05));
    CHECK(moments(rho5).var == doctest::Approx(0.25 / 7.0).epsilon(0.1));
}

TEST_CASE("no-data chain recovers the purity prior")
{
    Hyperparameters hp;
    hp.d1_star = 2.0;
    hp.d2_star = 5.0;
    hp.wstar_step = 1.0;
    ReadCountTensor data {1, 2};
    const auto v = MissingnessRates::empirical(data);
    const auto sdata = SamplerData::from(data, v);
    auto rng = make_stream(23, StreamRole::Reference);
    ChainState chain {sdata, hp, draw_from_prior(1, 2, 1, hp, true, rng), 1.0, make_stream(5, StreamRole::Chain)};
    std::vector<double> ws;
    for (int i = 0; i < 100000; ++i) {
        chain.update_wstar();
        ws.push_back(chain.state().wstar[0]);
    }
    // Beta(2, 5): mean 2/7, var 10 / (49 * 8)
    CHECK(moments(ws).mean == doctest::Approx(2.0 / 7.0).epsilon(0.03));
    CHECK(moments(ws).var == doctest::Approx(10.0 / 392.0).epsilon(0.08));
}

TEST_CASE("swap log ratio")
{
    CHECK(TemperedEnsemble::swap_log_ratio(0.5, 1.0, -10.0, -4.0) == doctest::Approx(-3.0));
    CHECK(TemperedEnsemble::swap_log_ratio(0.5, 1.0, -4.0, -10.0) == doctest::Approx(3.0));
    CHECK(TemperedEnsemble::swap_log_ratio(1.0, 1.0, -INFINITY, -4.0) == 0.0);
    CHECK(TemperedEnsemble::swap_log_ratio(0.5, 1.0, -INFINITY, -INFINITY) == 0.0);
    CHECK(TemperedEnsemble::swap_log_ratio(0.5, 1.0, NAN, -4.0) == -INFINITY);
    // a cold chain in an impossible state always takes the hot state
    CHECK(TemperedEnsemble::swap_log_ratio(0.5, 1.0, -4.0, -INFINITY) == INFINITY);
    CHECK(TemperedEnsemble::swap_log_ratio(0.5, 1.0, -INFINITY, -4.0) == -INFINITY);
}

TEST_CASE("tempering leaves the cold-chain posterior unchanged")
{
    auto rng = make_stream(24, StreamRole::Reference);
    const auto data = random_counts(1, 4, rng, 12);
    const auto v = MissingnessRates::empirical(data);
    const auto sdata = SamplerData::from(data, v);

    auto posterior_mean = [&](std::vector<double> ladder, double u0) {
        Hyperparameters hp;
        hp.ladder = std::move(ladder);
        hp.u0 = u0;
        hp.d0 = 0.5;
        TemperedEnsemble ens {sdata, hp, 1, false, 77};
        std::vector<double> w1;
        for (int i = 0; i < 60000; ++i) {
            ens.step();
            if (i >= 2000 && i % 2 == 0) w1.push_back(ens.cold().state().weight(0, 1));
        }
        if (hp.ladder.size() > 1) {
            const auto& s = ens.swap_stats();
            CHECK(std::accumulate(s.accepted.begin(), s.accepted.end(), std::uint64_t {0}) > 0);
        }
        return moments(w1);
    };
    const auto single = posterior_mean({1.0}, 1.0);
    const auto tempered = posterior_mean({3.0, 1.8, 1.0}, 0.7);
    const double se = std::sqrt(single.var / 3000.0); // conservative effective sample size
    CHECK(std::abs(single.mean - tempered.mean) < 4.0 * se);
}

TEST_CASE("runs are reproducible across thread counts")
{
    auto rng = make_stream(25, StreamRole::Reference);
    const auto data = random_counts(2, 5, rng, 20);
    const auto v = MissingnessRates::empirical(data);
    Hyperparameters hp;
    hp.iterations = 200;
    hp.burn_in = 50;
    hp.thin = 5;
    const auto a = run_chain(data, v, hp, 2, 99, 1);
    const auto b = run_chain(data, v, hp, 2, 99, 3);
    const auto c = run_chain(data, v, hp, 2, 100, 1);
    REQUIRE(a.samples.size() == 30);
    CHECK(a.samples == b.samples);
    CHECK(a.initial == b.initial);
    CHECK(a.samples != c.samples);
    CHECK(a.samples.front().iteration == 55);
    CHECK(a.manifest.config_hash == b.manifest.config_hash);
    CHECK(a.manifest.config_hash != c.manifest.config_hash);
}

TEST_CASE("dimension mismatch is rejected")
{
    Hyperparameters hp;
    ReadCountTensor data {1, 3};
    const auto sdata = SamplerData::from(data, MissingnessRates::empirical(data));
    CHECK_THROWS_AS(ChainState(sdata, hp, ModelState::zeros(1, 4, 1), 1.0, make_stream(1, StreamRole::Chain)), Error);
    CHECK_THROWS_AS(SamplerData::from(data, MissingnessRates::constant(2, 3, {0.4, 0.3, 0.3})), Error);
}
