#include "pairclone/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pairclone/model.hpp"
#include "pairclone/rng.hpp"
#include "pairclone/thread_pool.hpp"

namespace pairclone {

SplitData split_counts(const ReadCountTensor& data, double b)
{
    if (!(b > 0.0 && b < 1.0)) throw Error {"training fraction b must lie in (0, 1)"};
    SplitData split;
    split.b = b;
    split.train = WeightedCounts::scaled(data, b);
    split.test = split.train;
    for (std::size_t i = 0; i < split.test.n.size(); ++i) {
        split.test.n[i] = static_cast<double>(data.counts()[i]) - split.train.n[i];
    }
    return split;
}

double calibrate_b(std::size_t num_samples, double total_reads)
{
    if (num_samples == 0) throw Error {"calibrate_b: need at least one sample"};
    const double test_mass = 160.0 / static_cast<double>(num_samples);
    if (!(total_reads > test_mass)) {
        throw Error {"calibrate_b: total read count " + std::to_string(total_reads) +
                     " is not larger than the target test mass " + std::to_string(test_mass)};
    }
    return 1.0 - test_mass / total_reads;
}

double transdim_log_ratio(int current_c, double current_test_loglik, int proposed_c, double proposed_test_loglik, double r)
{
    double lik = 0.0;
    if (proposed_test_loglik != current_test_loglik) lik = proposed_test_loglik - current_test_loglik;
    return lik + (proposed_c - current_c) * std::log1p(-r);
}

double transdim_accept(int current_c, double current_test_loglik, int proposed_c, double proposed_test_loglik, double r)
{
    const double lr = transdim_log_ratio(current_c, current_test_loglik, proposed_c, proposed_test_loglik, r);
    if (std::isnan(lr)) return 0.0;
    return lr >= 0.0 ? 1.0 : std::exp(lr);
}

double SelectionResult::probability_of(int c) const
{
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (candidates[i] == c) return probabilities[i];
    }
    return 0.0;
}

int laplace_parameter_count(int num_subclones, std::size_t num_samples)
{
    return num_subclones * (kNumCodes - 1) + static_cast<int>(num_samples) * num_subclones + 5;
}

SelectionResult run_selection(const ReadCountTensor& data, const MissingnessRates& v, const Hyperparameters& hp,
                              std::uint64_t seed, std::size_t threads, bool purity)
{
    hp.validate();
    data.validate();
    SelectionResult result;
    const double total = static_cast<double>(data.grand_total());
    result.b = hp.b > 0.0 ? hp.b : calibrate_b(data.num_samples(), total);
    result.test_mass = (1.0 - result.b) * total;
    const auto split = split_counts(data, result.b);
    const auto train = SamplerData::from(split.train, v);

    for (int c = hp.c_min; c <= hp.c_max; ++c) result.candidates.push_back(c);
    const std::size_t n_cand = result.candidates.size();
    result.traces.resize(n_cand);

    ThreadPool pool {threads};
    pool.parallel_for(n_cand, [&](std::size_t i) {
        const int C = result.candidates[i];
        auto& trace = result.traces[i];
        trace.num_subclones = C;
        try {
            TemperedEnsemble ensemble {train, hp, C, purity, seed, static_cast<std::uint64_t>(C)};
            auto& m = trace.archive.manifest;
            m.seed = seed;
            m.num_subclones = C;
            m.num_samples = data.num_samples();
            m.num_pairs = data.num_pairs();
            m.purity = purity;
            m.hyperparameters = hp;
            m.hyperparameters.b = result.b;
            m.config_hash = config_hash(m.hyperparameters, seed, C, m.num_samples, m.num_pairs, purity);
            trace.archive.initial = snapshot(ensemble.cold().state(), 0);
            for (int it = 1; it <= hp.iterations; ++it) {
                ensemble.step();
                const bool record = it % hp.selection_sweeps == 0;
                const bool keep = it > hp.burn_in && it % hp.thin == 0;
                if (!record && !keep) continue;
                const auto& state = ensemble.cold().state();
                const double test_ll = log_likelihood(split.test, v, state);
                if (record) {
                    trace.test_loglik.push_back(test_ll);
                    trace.full_loglik.push_back(ensemble.cold().log_likelihood() + test_ll);
                }
                if (keep) {
                    trace.archive.samples.push_back(snapshot(state, it));
                    trace.archive_test_loglik.push_back(test_ll);
                }
            }
            trace.swaps = ensemble.swap_stats();
        } catch (const std::exception& e) {
            throw Error {"selection chain for C = " + std::to_string(C) + " failed: " + e.what()};
        }
    });

    // Indicator chain over the recorded cold states.
    const std::size_t records = result.traces.front().test_loglik.size();
    result.visits.assign(n_cand, 0);
    if (records > 0) {
        const std::size_t burn = static_cast<std::size_t>(static_cast<double>(records) * hp.burn_in / hp.iterations);
        auto rng = make_stream(seed, StreamRole::Indicator);
        std::size_t cur = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(n_cand) - 1));
        double cur_ll = result.traces[cur].test_loglik[0];
        for (std::size_t m = 0; m < records; ++m) {
            const auto prop = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(n_cand) - 1));
            const double prop_ll = result.traces[prop].test_loglik[m];
            const double lr = transdim_log_ratio(result.candidates[cur], cur_ll, result.candidates[prop], prop_ll, hp.r);
            ++result.indicator_moves;
            const double log_u = std::log(uniform01(rng));
            if (!std::isnan(lr) && (lr >= 0.0 || log_u < lr)) {
                ++result.indicator_accepted;
                cur = prop;
                cur_ll = prop_ll;
            }
            if (m >= burn) ++result.visits[cur];
        }
    }
    std::uint64_t total_visits = 0;
    for (auto v_c : result.visits) total_visits += v_c;
    result.probabilities.assign(n_cand, 0.0);
    for (std::size_t i = 0; i < n_cand; ++i) {
        result.probabilities[i] = total_visits > 0 ? static_cast<double>(result.visits[i]) / static_cast<double>(total_visits) : 0.0;
    }
    result.mode = result.candidates[static_cast<std::size_t>(
        std::max_element(result.visits.begin(), result.visits.end()) - result.visits.begin())];

    // Laplace-style cross-check at the best recorded state.
    std::vector<double> log_score(n_cand, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n_cand; ++i) {
        const auto& full = result.traces[i].full_loglik;
        if (full.empty()) continue;
        const double best = *std::max_element(full.begin(), full.end());
        const int C = result.candidates[i];
        log_score[i] = log_prior_num_subclones(C, hp.r) + (1.0 - result.b) * best +
                       0.5 * laplace_parameter_count(C, data.num_samples()) * std::log(result.b);
    }
    const double norm = log_sum_exp(log_score);
    result.laplace.resize(n_cand);
    for (std::size_t i = 0; i < n_cand; ++i) {
        result.laplace[i] = std::isfinite(norm) ? std::exp(log_score[i] - norm) : 0.0;
    }
    return result;
}

namespace {

std::vector<double> reweighted_mean(const CandidateTrace& trace, const SubcloneMatrix* reference)
{
    const auto& samples = trace.archive.samples;
    if (samples.empty()) throw Error {"empty archive"};
    const int C = trace.num_subclones;
    const std::size_t stride = static_cast<std::size_t>(C) + 1;
    const std::size_t T = samples.front().w.size() / stride;
    if (reference && reference->num_subclones != C) throw Error {"reference Z has the wrong number of subclones"};
    const double top = *std::max_element(trace.archive_test_loglik.begin(), trace.archive_test_loglik.end());
    std::vector<double> mean(samples.front().w.size(), 0.0);
    std::vector<std::size_t> sigma(static_cast<std::size_t>(C));
    double total = 0.0;
    for (std::size_t l = 0; l < samples.size(); ++l) {
        std::iota(sigma.begin(), sigma.end(), std::size_t {0});
        if (reference) {
            const SubcloneMatrix draw {reference->num_pairs, C, samples[l].z};
            sigma = solve_assignment(column_distances(*reference, draw)).sigma;
        }
        const double weight = std::exp(trace.archive_test_loglik[l] - top);
        total += weight;
        const auto& w = samples[l].w;
        for (std::size_t t = 0; t < T; ++t) {
            mean[t * stride] += weight * w[t * stride];
            for (std::size_t c = 0; c < sigma.size(); ++c) mean[t * stride + c + 1] += weight * w[t * stride + sigma[c] + 1];
        }
    }
    for (double& m : mean) m /= total;
    return mean;
}

} // namespace

std::vector<double> reweighted_mean_weights(const CandidateTrace& trace)
{
    return reweighted_mean(trace, nullptr);
}

std::vector<double> reweighted_mean_weights(const CandidateTrace& trace, const SubcloneMatrix& reference)
{
    return reweighted_mean(trace, &reference);
}

} // namespace pairclone
