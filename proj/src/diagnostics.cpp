#include "pairclone/diagnostics.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "pairclone/special.hpp"

namespace pairclone {

namespace {

double batch_means_variance(std::span<const double> x)
{
    const std::size_t L = x.size();
    const auto batch = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(L))));
    const std::size_t batches = L / batch;
    if (batches < 2) throw Error {"trace too short for a spectral estimate"};
    std::vector<double> means(batches, 0.0);
    for (std::size_t b = 0; b < batches; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < batch; ++i) s += x[b * batch + i];
        means[b] = s / static_cast<double>(batch);
    }
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(batches);
    double ss = 0.0;
    for (double m : means) ss += (m - grand) * (m - grand);
    return static_cast<double>(batch) * ss / static_cast<double>(batches - 1);
}

double mean_of(std::span<const double> x)
{
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

void multinomial(RngStream& rng, std::int64_t n, const CategoryProbs& p, double* out)
{
    double remaining = 1.0;
    std::int64_t left = n;
    for (int g = 0; g < kNumCategories; ++g) {
        if (g == kNumCategories - 1 || left == 0) {
            out[g] = static_cast<double>(g == kNumCategories - 1 ? left : 0);
            continue;
        }
        const double q = remaining > 0.0 ? std::clamp(p[g] / remaining, 0.0, 1.0) : 0.0;
        const std::int64_t draw = std::binomial_distribution<std::int64_t> {left, q}(rng);
        out[g] = static_cast<double>(draw);
        left -= draw;
        remaining -= p[g];
    }
}

} // namespace

double spectral_density_zero(std::span<const double> trace)
{
    if (trace.size() < 50) throw Error {"trace too short: need at least 50 values"};
    return batch_means_variance(trace);
}

ZScore geweke_convergence(std::span<const double> trace, double fraction_a, double fraction_b)
{
    if (!(fraction_a > 0.0 && fraction_b > 0.0)) throw Error {"window fractions must be positive"};
    if (fraction_a + fraction_b > 1.0) throw Error {"windows overlap"};
    const std::size_t L = trace.size();
    const auto la = static_cast<std::size_t>(fraction_a * static_cast<double>(L));
    const auto lb = static_cast<std::size_t>(fraction_b * static_cast<double>(L));
    const auto a = trace.first(la);
    const auto b = trace.last(lb);
    const double var = batch_means_variance(a) / static_cast<double>(la) + batch_means_variance(b) / static_cast<double>(lb);
    ZScore out;
    if (!(var > 0.0)) {
        out.degenerate = true;
        out.z = 0.0;
        out.p = 1.0;
        return out;
    }
    out.z = (mean_of(a) - mean_of(b)) / std::sqrt(var);
    out.p = two_sided_p(out.z);
    return out;
}

std::vector<double> autocorrelation(std::span<const double> trace, std::size_t max_lag)
{
    const std::size_t L = trace.size();
    if (max_lag >= L) throw Error {"max lag must be shorter than the trace"};
    const double m = mean_of(trace);
    double denom = 0.0;
    for (double x : trace) denom += (x - m) * (x - m);
    std::vector<double> r(max_lag + 1, 0.0);
    r[0] = 1.0;
    if (denom == 0.0) return r;
    for (std::size_t lag = 1; lag <= max_lag; ++lag) {
        double s = 0.0;
        for (std::size_t i = 0; i + lag < L; ++i) s += (trace[i] - m) * (trace[i + lag] - m);
        r[lag] = s / denom;
    }
    return r;
}

std::string Statistic::name() const
{
    if (kind == Kind::Weight) return "w_" + std::to_string(t + 1) + "_" + std::to_string(c);
    return "p_" + std::to_string(t + 1) + "_" + std::to_string(k + 1) + "_" + std::to_string(g + 1);
}

Statistic Statistic::parse(const std::string& name)
{
    std::vector<long> parts;
    std::stringstream ss {name.size() > 2 ? name.substr(2) : std::string {}};
    std::string item;
    try {
        while (std::getline(ss, item, '_')) parts.push_back(std::stol(item));
    } catch (const std::exception&) {
        throw Error {"bad statistic name '" + name + "'"};
    }
    Statistic s;
    if (name.rfind("w_", 0) == 0 && parts.size() == 2 && parts[0] >= 1 && parts[1] >= 0) {
        s.kind = Kind::Weight;
        s.t = static_cast<std::size_t>(parts[0] - 1);
        s.c = static_cast<int>(parts[1]);
        return s;
    }
    if (name.rfind("p_", 0) == 0 && parts.size() == 3 && parts[0] >= 1 && parts[1] >= 1 && parts[2] >= 1 && parts[2] <= 8) {
        s.kind = Kind::Probability;
        s.t = static_cast<std::size_t>(parts[0] - 1);
        s.k = static_cast<std::size_t>(parts[1] - 1);
        s.g = static_cast<int>(parts[2] - 1);
        return s;
    }
    throw Error {"bad statistic name '" + name + "' (expected w_t_c or p_t_k_g)"};
}

double Statistic::evaluate(const ModelState& state, const std::array<double, 3>& v) const
{
    if (t >= state.num_samples) throw Error {"statistic " + name() + ": sample index out of range"};
    if (kind == Kind::Weight) {
        if (c > state.num_subclones) throw Error {"statistic " + name() + ": subclone index out of range"};
        return state.weight(t, c);
    }
    if (k >= state.num_pairs) throw Error {"statistic " + name() + ": pair index out of range"};
    return full_category_probs(p_tilde(state, t, k), v)[g];
}

std::vector<double> statistic_trace(const PosteriorArchive& archive, const Statistic& stat, const MissingnessRates* v)
{
    std::vector<double> out;
    out.reserve(archive.samples.size());
    if (stat.kind == Statistic::Kind::Probability && v == nullptr) throw Error {"probability statistics need the count data"};
    for (const auto& s : archive.samples) {
        const auto state = restore(s, archive.manifest);
        const std::array<double, 3> rates = v != nullptr ? (*v)(stat.t, stat.k) : std::array<double, 3> {1.0, 0.0, 0.0};
        out.push_back(stat.evaluate(state, rates));
    }
    return out;
}

GirConfig GirConfig::standard()
{
    GirConfig config;
    for (const char* name : {"w_1_2", "w_4_3", "p_1_23_3", "p_3_60_7", "p_2_13_2"}) config.statistics.push_back(Statistic::parse(name));
    return config;
}

std::vector<std::pair<double, double>> prior_reference(const GirConfig& config, std::uint64_t seed)
{
    const auto& hp = config.hp;
    const int C = config.num_subclones;
    auto rng = make_stream(seed, StreamRole::Reference);
    const std::size_t S = config.statistics.size();
    std::vector<double> sum(S, 0.0), sum_sq(S, 0.0);
    std::vector<double> log_theta(static_cast<std::size_t>(C) + 1);
    std::vector<double> w(static_cast<std::size_t>(C) + 1);
    std::vector<std::array<double, kNumCodes>> log_pi(static_cast<std::size_t>(C));
    std::array<double, kNumCodes - 1> gam;
    gam.fill(hp.gamma);
    std::array<double, kNumCodes - 1> tail;
    const auto& table = match_table();
    for (std::size_t m = 0; m < config.reference_draws; ++m) {
        for (int c = 0; c < C; ++c) {
            const double la = log_gamma_variate(rng, 1.0);
            const double lb = log_gamma_variate(rng, hp.alpha / C);
            const double lt = log_sum_exp(std::array {la, lb});
            log_dirichlet_variate(rng, gam, tail);
            log_pi[c][0] = la - lt;
            for (int q = 1; q < kNumCodes; ++q) log_pi[c][q] = lb - lt + tail[q - 1];
        }
        std::array<double, kNumCategories> log_rho;
        for (int g = 0; g < kNumCategories; ++g) log_rho[g] = log_gamma_variate(rng, g < 4 ? hp.d1 : 2.0 * hp.d1);
        std::array<double, kNumCategories> rho;
        for (auto [lo, hi] : std::array<std::pair<int, int>, 3> {{{0, 4}, {4, 6}, {6, 8}}}) {
            const double tot = log_sum_exp(std::span<const double> {log_rho.data() + lo, static_cast<std::size_t>(hi - lo)});
            for (int g = lo; g < hi; ++g) rho[g] = std::exp(log_rho[g] - tot);
        }
        // Every statistic gets its own sample row and pair row, drawn fresh.
        for (std::size_t s = 0; s < S; ++s) {
            const auto& stat = config.statistics[s];
            for (int c = 0; c <= C; ++c) log_theta[c] = log_gamma_variate(rng, c == 0 ? hp.d0 : hp.d);
            const double tot = log_sum_exp(log_theta);
            for (int c = 0; c <= C; ++c) w[c] = std::exp(log_theta[c] - tot);
            double value = 0.0;
            if (stat.kind == Statistic::Kind::Weight) {
                value = w[stat.c];
            } else {
                double p = w[0] * rho[stat.g];
                for (int c = 0; c < C; ++c) {
                    const int q = sample_log_categorical(rng, log_pi[c]);
                    p += w[c + 1] * table(stat.g, q);
                }
                value = config.v[missingness_case_of(stat.g)] * p;
            }
            sum[s] += value;
            sum_sq[s] += value * value;
        }
    }
    std::vector<std::pair<double, double>> out(S);
    const double M = static_cast<double>(config.reference_draws);
    for (std::size_t s = 0; s < S; ++s) {
        const double mean = sum[s] / M;
        const double var = std::max(0.0, sum_sq[s] / M - mean * mean);
        out[s] = {mean, std::sqrt(var / M)};
    }
    return out;
}

std::vector<GirRow> getting_it_right(const GirConfig& config, std::uint64_t seed)
{
    config.hp.validate();
    const std::size_t T = config.num_samples;
    const std::size_t K = config.num_pairs;
    const std::size_t S = config.statistics.size();
    auto rng = make_stream(seed, StreamRole::Diagnostics, 0);
    auto chain_rng = make_stream(seed, StreamRole::Diagnostics, 1);

    auto state = draw_from_prior(T, K, config.num_subclones, config.hp, false, rng);
    SamplerData data;
    data.num_samples = T;
    data.num_pairs = K;
    data.n.assign(T * K * kNumCategories, 0.0);
    const auto simulate = [&](const ModelState& x) {
        data.log_v_term = 0.0;
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t k = 0; k < K; ++k) {
                const auto p = full_category_probs(p_tilde(x, t, k), config.v);
                double* n = data.n.data() + (t * K + k) * kNumCategories;
                multinomial(rng, config.reads_per_cell, p, n);
                for (int g = 0; g < kNumCategories; ++g) {
                    if (n[g] != 0.0) data.log_v_term += n[g] * std::log(config.v[missingness_case_of(g)]);
                }
            }
        }
    };
    simulate(state);
    ChainState chain {data, config.hp, std::move(state), 1.0, chain_rng, config.kernel};

    std::vector<std::vector<double>> traces(S);
    for (auto& tr : traces) tr.reserve(static_cast<std::size_t>(config.iterations));
    for (int l = 1; l <= config.iterations + config.burn_in; ++l) {
        chain.sweep();
        if (l > config.burn_in) {
            for (std::size_t s = 0; s < S; ++s) {
                const auto& stat = config.statistics[s];
                traces[s].push_back(stat.evaluate(chain.state(), config.v));
            }
        }
        simulate(chain.state());
        chain.set_data(data);
    }

    const auto reference = prior_reference(config, seed);
    std::vector<GirRow> rows(S);
    for (std::size_t s = 0; s < S; ++s) {
        auto& row = rows[s];
        row.name = config.statistics[s].name();
        row.mean = mean_of(traces[s]);
        row.reference = reference[s].first;
        row.reference_se = reference[s].second;
        row.spectral_density = spectral_density_zero(traces[s]);
        const double se = std::sqrt(row.spectral_density / static_cast<double>(traces[s].size()) +
                                    row.reference_se * row.reference_se);
        if (!(se > 0.0)) {
            row.score.degenerate = true;
            continue;
        }
        row.score.z = (row.mean - row.reference) / se;
        row.score.p = two_sided_p(row.score.z);
    }
    return rows;
}

} // namespace pairclone
