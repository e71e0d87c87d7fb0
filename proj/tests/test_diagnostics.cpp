#include "doctest.h"

#include <cmath>

#include "pairclone/diagnostics.hpp"

using namespace pairclone;

namespace {

std::vector<double> ar1(double phi, std::size_t n, std::uint64_t seed)
{
    auto rng = make_stream(seed, StreamRole::Reference);
    std::vector<double> x(n);
    double prev = standard_normal(rng) / std::sqrt(1.0 - phi * phi);
    for (auto& xi : x) {
        prev = phi * prev + standard_normal(rng);
        xi = prev;
    }
    return x;
}

} // namespace

TEST_CASE("spectral density of an AR(1) trace")
{
    for (double phi : {0.0, 0.5, 0.8}) {
        const auto x = ar1(phi, 1000000, 50);
        const double want = 1.0 / ((1.0 - phi) * (1.0 - phi));
        CHECK(spectral_density_zero(x) == doctest::Approx(want).epsilon(0.15));
    }
    CHECK_THROWS_AS(spectral_density_zero(std::vector<double>(49, 1.0)), Error);
}

TEST_CASE("autocorrelation of an AR(1) trace")
{
    const auto x = ar1(0.5, 200000, 51);
    const auto acf = autocorrelation(x, 5);
    REQUIRE(acf.size() == 6);
    CHECK(acf[0] == doctest::Approx(1.0));
    for (int k = 1; k <= 5; ++k) CHECK(std::abs(acf[k] - std::pow(0.5, k)) < 0.01);
}

TEST_CASE("convergence score")
{
    const auto x = ar1(0.3, 20000, 52);
    const auto stationary = geweke_convergence(x);
    CHECK(!stationary.degenerate);
    CHECK(std::abs(stationary.z) < 3.5);
    CHECK(stationary.p == doctest::Approx(std::erfc(std::abs(stationary.z) / std::sqrt(2.0))));

    auto shifted = x;
    for (std::size_t i = shifted.size() / 2; i < shifted.size(); ++i) shifted[i] += 1.0;
    const auto moved = geweke_convergence(shifted);
    CHECK(std::abs(moved.z) > 10.0);
    CHECK(moved.p < 1e-6);

    CHECK(geweke_convergence(std::vector<double>(1000, 2.0)).degenerate);
    CHECK_THROWS_AS(geweke_convergence(x, 0.6, 0.5), Error);
}

TEST_CASE("statistic names and values")
{
    const auto w = Statistic::parse("w_1_2");
    CHECK(w.kind == Statistic::Kind::Weight);
    CHECK(w.t == 0);
    CHECK(w.c == 2);
    const auto p = Statistic::parse("p_1_23_3");
    CHECK(p.kind == Statistic::Kind::Probability);
    CHECK(p.k == 22);
    CHECK(p.g == 2);
    for (const char* name : {"w_4_3", "p_3_60_7", "w_2_0"}) CHECK(Statistic::parse(name).name() == name);
    for (const char* name : {"x_1_2", "w_0_1", "p_1_2_9", "p_1_2", "w_a_b", "w"}) CHECK_THROWS_AS(Statistic::parse(name), Error);

    Hyperparameters hp;
    auto rng = make_stream(53, StreamRole::Reference);
    const auto s = draw_from_prior(2, 30, 3, hp, false, rng);
    const std::array<double, 3> v {0.4, 0.3, 0.3};
    CHECK(w.evaluate(s, v) == s.weight(0, 2));
    CHECK(p.evaluate(s, v) == doctest::Approx(0.4 * p_tilde(s, 0, 22)[2]));
    CHECK_THROWS_AS(Statistic::parse("w_3_1").evaluate(s, v), Error);
    CHECK_THROWS_AS(Statistic::parse("w_1_4").evaluate(s, v), Error);
    CHECK_THROWS_AS(Statistic::parse("p_1_31_1").evaluate(s, v), Error);
}

TEST_CASE("prior reference means")
{
    auto config = GirConfig::standard();
    config.reference_draws = 200000;
    const auto ref = prior_reference(config, 54);
    REQUIRE(ref.size() == 5);
    const double total = config.hp.d0 + 3 * config.hp.d;
    CHECK(std::abs(ref[0].first - config.hp.d / total) < 4.0 * ref[0].second);
    CHECK(std::abs(ref[1].first - config.hp.d / total) < 4.0 * ref[1].second);
    CHECK(ref[2].first > 0.0);
    CHECK(ref[2].first < 0.4);
    CHECK(ref[3].first < 0.3);
}

TEST_CASE("successive-conditional check runs on a small problem")
{
    auto config = GirConfig::standard();
    config.iterations = 3000;
    config.burn_in = 100;
    config.reference_draws = 20000;
    const auto rows = getting_it_right(config, 55);
    REQUIRE(rows.size() == 5);
    for (const auto& row : rows) {
        CHECK(!row.score.degenerate);
        CHECK(std::isfinite(row.score.z));
        CHECK(row.spectral_density > 0.0);
    }
    CHECK(rows[0].name == "w_1_2");
}
