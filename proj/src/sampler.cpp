#include "pairclone/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pairclone/special.hpp"

namespace pairclone {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

constexpr std::array<std::pair<int, int>, 3> kRhoGroups {{{0, 4}, {4, 6}, {6, 8}}};

int rho_group_of(int g)
{
    return g < 4 ? 0 : (g < 6 ? 1 : 2);
}

double rho_shape(const Hyperparameters& hp, int g)
{
    return g < 4 ? hp.d1 : 2.0 * hp.d1;
}

} // namespace

SamplerData SamplerData::from(const WeightedCounts& counts, const MissingnessRates& v)
{
    if (v.num_samples() != counts.num_samples || v.num_pairs() != counts.num_pairs) {
        throw Error {"missingness rates do not match the count dimensions"};
    }
    SamplerData d;
    d.num_samples = counts.num_samples;
    d.num_pairs = counts.num_pairs;
    d.n = counts.n;
    for (std::size_t t = 0; t < d.num_samples; ++t) {
        for (std::size_t k = 0; k < d.num_pairs; ++k) {
            const auto& rates = v(t, k);
            const double* n = d.cell(t, k);
            for (int g = 0; g < kNumCategories; ++g) {
                if (n[g] == 0.0) continue;
                const double rate = rates[missingness_case_of(g)];
                d.log_v_term += rate > 0.0 ? n[g] * std::log(rate) : kNegInf;
            }
        }
    }
    return d;
}

SamplerData SamplerData::from(const ReadCountTensor& counts, const MissingnessRates& v, double fraction)
{
    return from(WeightedCounts::scaled(counts, fraction), v);
}

ChainState::ChainState(const SamplerData& data, const Hyperparameters& hp, ModelState state, double temperature,
                       RngStream rng, KernelOptions options)
    : data_ {&data}, hp_ {&hp}, state_ {std::move(state)}, temperature_ {temperature}, inv_temp_ {1.0 / temperature},
      rng_ {rng}, options_ {options}
{
    if (state_.num_samples != data.num_samples || state_.num_pairs != data.num_pairs) {
        throw Error {"model state does not match the data dimensions"};
    }
    recompute_all();
}

void ChainState::set_data(const SamplerData& data)
{
    data_ = &data;
    recompute_all();
}

void ChainState::set_state(ModelState state)
{
    state_ = std::move(state);
    recompute_all();
}

double ChainState::log_target() const
{
    return log_lik_ + log_prior(state_, *hp_);
}

void ChainState::fill_subclone_part(const std::vector<double>& w_row, double wstar, double* out) const
{
    const auto& table = match_table();
    const int C = state_.num_subclones;
    const auto& normal = table.column(0);
    for (std::size_t k = 0; k < state_.num_pairs; ++k) {
        double* o = out + k * kNumCategories;
        for (int g = 0; g < kNumCategories; ++g) o[g] = wstar * normal[g];
        for (int c = 0; c < C; ++c) {
            const double wc = w_row[c + 1];
            const auto& col = table.column(state_.code_index(k, c));
            for (int g = 0; g < kNumCategories; ++g) o[g] += wc * col[g];
        }
    }
}

double ChainState::sample_log_lik(std::size_t t, const double* log_p) const
{
    double total = 0.0;
    const double* n = data_->cell(t, 0);
    const std::size_t cells = state_.num_pairs * kNumCategories;
    for (std::size_t i = 0; i < cells; ++i) {
        if (n[i] != 0.0) total += n[i] * log_p[i];
    }
    return total;
}

void ChainState::recompute_sample(std::size_t t)
{
    const std::size_t K = state_.num_pairs;
    const std::size_t stride = state_.weight_stride();
    scratch_w_.assign(state_.w.begin() + static_cast<std::ptrdiff_t>(t * stride),
                      state_.w.begin() + static_cast<std::ptrdiff_t>((t + 1) * stride));
    double* sub = sub_.data() + t * K * kNumCategories;
    double* log_p = log_p_.data() + t * K * kNumCategories;
    fill_subclone_part(scratch_w_, state_.wstar[t], sub);
    const double w0 = scratch_w_[0];
    const double* n = data_->cell(t, 0);
    for (std::size_t k = 0; k < K; ++k) {
        for (int g = 0; g < kNumCategories; ++g) {
            const std::size_t i = k * kNumCategories + g;
            log_p[i] = n[i] != 0.0 ? std::log(sub[i] + w0 * state_.rho[g]) : 0.0;
        }
    }
    ll_t_[t] = sample_log_lik(t, log_p);
}

void ChainState::recompute_all()
{
    const std::size_t cells = state_.num_samples * state_.num_pairs * kNumCategories;
    sub_.assign(cells, 0.0);
    log_p_.assign(cells, 0.0);
    ll_t_.assign(state_.num_samples, 0.0);
    scratch_sub_.resize(state_.num_pairs * kNumCategories);
    scratch_log_p_.resize(state_.num_pairs * kNumCategories);
    for (std::size_t t = 0; t < state_.num_samples; ++t) recompute_sample(t);
    log_lik_ = data_->log_v_term;
    for (double v : ll_t_) log_lik_ += v;
}

bool ChainState::metropolis(double log_ratio)
{
    if (std::isnan(log_ratio)) return false;
    if (log_ratio >= 0.0) return true;
    return std::log(uniform01(rng_)) < log_ratio;
}

std::array<double, kNumCodes> ChainState::z_log_conditional(std::size_t k, int c) const
{
    const auto& table = match_table();
    const int C = state_.num_subclones;
    const auto& normal = table.column(0);
    std::array<std::array<double, 3>, kNumCategories> level_sum {};
    const int current = state_.code_index(k, c);
    for (std::size_t t = 0; t < state_.num_samples; ++t) {
        const double* n = data_->cell(t, k);
        const double* cached = log_p_.data() + (t * state_.num_pairs + k) * kNumCategories;
        const double wc = state_.weight(t, c + 1);
        const double w0 = state_.weight(t, 0);
        const double ws = state_.wstar[t];
        for (int g = 0; g < kNumCategories; ++g) {
            if (n[g] == 0.0) continue;
            double base = w0 * state_.rho[g] + ws * normal[g];
            for (int other = 0; other < C; ++other) {
                if (other == c) continue;
                base += state_.weight(t, other + 1) * table(g, state_.code_index(k, other));
            }
            // The level of the current code is already cached.
            const int held = table.level(g, current);
            level_sum[g][held] += n[g] * cached[g];
            if (held != 0) level_sum[g][0] += n[g] * std::log(base);
            if (held != 1) level_sum[g][1] += n[g] * std::log(base + 0.5 * wc);
            if (held != 2) level_sum[g][2] += n[g] * std::log(base + wc);
        }
    }
    std::array<double, kNumCodes> lp;
    const double* log_pi = state_.log_pi.data() + static_cast<std::size_t>(c) * kNumCodes;
    for (int q = 0; q < kNumCodes; ++q) {
        double s = log_pi[q];
        for (int g = 0; g < kNumCategories; ++g) s += level_sum[g][table.level(g, q)];
        lp[q] = inv_temp_ * s;
    }
    return lp;
}

void ChainState::refresh_row(std::size_t k, int c, int old_code)
{
    const auto& table = match_table();
    const int C = state_.num_subclones;
    const std::size_t K = state_.num_pairs;
    const auto& old_col = table.column(old_code);
    const auto& new_col = table.column(state_.code_index(k, c));
    for (std::size_t t = 0; t < state_.num_samples; ++t) {
        const double w0 = state_.weight(t, 0);
        const double* n = data_->cell(t, k);
        double* sub = sub_.data() + (t * K + k) * kNumCategories;
        double* log_p = log_p_.data() + (t * K + k) * kNumCategories;
        for (int g = 0; g < kNumCategories; ++g) {
            if (old_col[g] == new_col[g]) continue;
            double s = state_.wstar[t] * table(g, 0);
            for (int other = 0; other < C; ++other) s += state_.weight(t, other + 1) * table(g, state_.code_index(k, other));
            sub[g] = s;
            if (n[g] != 0.0) log_p[g] = std::log(s + w0 * state_.rho[g]);
        }
    }
}

void ChainState::resum_log_lik()
{
    const std::size_t K = state_.num_pairs;
    log_lik_ = data_->log_v_term;
    for (std::size_t t = 0; t < state_.num_samples; ++t) {
        ll_t_[t] = sample_log_lik(t, log_p_.data() + t * K * kNumCategories);
        log_lik_ += ll_t_[t];
    }
}

void ChainState::update_z()
{
    const int C = state_.num_subclones;
    const std::size_t K = state_.num_pairs;
    for (std::size_t k = 0; k < K; ++k) {
        for (int c = 0; c < C; ++c) {
            const auto lp = z_log_conditional(k, c);
            const int q = sample_log_categorical(rng_, lp);
            const int old = state_.code_index(k, c);
            if (q < 0 || q == old) continue;
            state_.z[k * C + c] = static_cast<std::uint8_t>(q);
            refresh_row(k, c, old);
        }
    }
    resum_log_lik();
}

std::array<double, kNumCodes * kNumCodes> ChainState::z_pair_log_conditional(std::size_t k, int c, int d) const
{
    const auto& table = match_table();
    const int C = state_.num_subclones;
    const auto& normal = table.column(0);
    // sums of n log p~ for every combination of the two match levels
    std::array<std::array<double, 9>, kNumCategories> level_sum {};
    for (std::size_t t = 0; t < state_.num_samples; ++t) {
        const double* n = data_->cell(t, k);
        const double wc = 0.5 * state_.weight(t, c + 1);
        const double wd = 0.5 * state_.weight(t, d + 1);
        const double w0 = state_.weight(t, 0);
        const double ws = state_.wstar[t];
        for (int g = 0; g < kNumCategories; ++g) {
            if (n[g] == 0.0) continue;
            double base = w0 * state_.rho[g] + ws * normal[g];
            for (int other = 0; other < C; ++other) {
                if (other == c || other == d) continue;
                base += state_.weight(t, other + 1) * table(g, state_.code_index(k, other));
            }
            auto& sums = level_sum[g];
            for (int a = 0; a < 3; ++a) {
                for (int b = 0; b < 3; ++b) sums[3 * a + b] += n[g] * std::log(base + a * wc + b * wd);
            }
        }
    }
    std::array<double, kNumCodes * kNumCodes> lp;
    const double* pi_c = state_.log_pi.data() + static_cast<std::size_t>(c) * kNumCodes;
    const double* pi_d = state_.log_pi.data() + static_cast<std::size_t>(d) * kNumCodes;
    for (int qa = 0; qa < kNumCodes; ++qa) {
        for (int qb = 0; qb < kNumCodes; ++qb) {
            double s = pi_c[qa] + pi_d[qb];
            for (int g = 0; g < kNumCategories; ++g) s += level_sum[g][3 * table.level(g, qa) + table.level(g, qb)];
            lp[qa * kNumCodes + qb] = inv_temp_ * s;
        }
    }
    return lp;
}

void ChainState::update_z_pairs()
{
    const int C = state_.num_subclones;
    if (C < 2) return;
    const std::size_t K = state_.num_pairs;
    for (std::size_t k = 0; k < K; ++k) {
        const int c = uniform_int(rng_, 0, C - 1);
        int d = uniform_int(rng_, 0, C - 2);
        if (d >= c) ++d;
        const auto lp = z_pair_log_conditional(k, c, d);
        const int pick = sample_log_categorical(rng_, lp);
        if (pick < 0) continue;
        const int old_c = state_.code_index(k, c);
        const int old_d = state_.code_index(k, d);
        const int qa = pick / kNumCodes;
        const int qb = pick % kNumCodes;
        if (qa != old_c) {
            state_.z[k * C + c] = static_cast<std::uint8_t>(qa);
            refresh_row(k, c, old_c);
        }
        if (qb != old_d) {
            state_.z[k * C + d] = static_cast<std::uint8_t>(qb);
            refresh_row(k, d, old_d);
        }
    }
    resum_log_lik();
}

void ChainState::update_pi()
{
    const int C = state_.num_subclones;
    const double K = static_cast<double>(state_.num_pairs);
    const auto tempered = [this](double shape) { return (shape - 1.0) * inv_temp_ + 1.0; };
    std::array<double, kNumCodes> counts;
    std::array<double, kNumCodes - 1> shapes;
    std::array<double, kNumCodes - 1> tail;
    for (int c = 0; c < C; ++c) {
        counts.fill(0.0);
        for (std::size_t k = 0; k < state_.num_pairs; ++k) counts[state_.code_index(k, c)] += 1.0;
        const double la = log_gamma_variate(rng_, tempered(counts[0] + 1.0));
        const double lb = log_gamma_variate(rng_, tempered(K - counts[0] + hp_->alpha / C));
        const double lt = log_sum_exp(std::array {la, lb});
        for (int q = 1; q < kNumCodes; ++q) shapes[q - 1] = tempered(counts[q] + hp_->gamma);
        log_dirichlet_variate(rng_, shapes, tail);
        double* lp = state_.log_pi.data() + static_cast<std::size_t>(c) * kNumCodes;
        lp[0] = la - lt;
        for (int q = 1; q < kNumCodes; ++q) lp[q] = (lb - lt) + tail[q - 1];
    }
}

void ChainState::update_theta()
{
    const std::size_t K = state_.num_pairs;
    const std::size_t stride = state_.weight_stride();
    const std::size_t cells = K * kNumCategories;
    std::vector<double> row(stride);
    for (std::size_t t = 0; t < state_.num_samples; ++t) {
        const double* n = data_->cell(t, 0);
        for (std::size_t c = 0; c < stride; ++c) {
            double* log_theta = state_.log_theta.data() + t * stride;
            const double current = log_theta[c];
            const double proposed = current + hp_->theta_step * standard_normal(rng_);
            std::copy(log_theta, log_theta + stride, row.begin());
            row[c] = proposed;
            const double total = log_sum_exp(row);
            const double tumor = state_.purity ? logistic(-state_.logit_wstar[t]) : 1.0;
            scratch_w_.resize(stride);
            for (std::size_t j = 0; j < stride; ++j) scratch_w_[j] = tumor * std::exp(row[j] - total);
            fill_subclone_part(scratch_w_, state_.wstar[t], scratch_sub_.data());
            const double w0 = scratch_w_[0];
            for (std::size_t i = 0; i < cells; ++i) {
                scratch_log_p_[i] = n[i] != 0.0 ? std::log(scratch_sub_[i] + w0 * state_.rho[i % kNumCategories]) : 0.0;
            }
            const double ll_new = sample_log_lik(t, scratch_log_p_.data());
            const double shape = c == 0 ? hp_->d0 : hp_->d;
            const double prior_diff = log_gamma_density_at_log(proposed, shape) - log_gamma_density_at_log(current, shape);
            double log_ratio = inv_temp_ * (ll_new - ll_t_[t] + prior_diff);
            if (options_.theta_jacobian) log_ratio += proposed - current;
            ++acceptance_.theta_proposed;
            if (!metropolis(log_ratio)) continue;
            ++acceptance_.theta_accepted;
            log_theta[c] = proposed;
            state_.refresh_sample(t);
            std::copy(scratch_sub_.begin(), scratch_sub_.end(), sub_.begin() + static_cast<std::ptrdiff_t>(t * cells));
            std::copy(scratch_log_p_.begin(), scratch_log_p_.end(), log_p_.begin() + static_cast<std::ptrdiff_t>(t * cells));
            log_lik_ += ll_new - ll_t_[t];
            ll_t_[t] = ll_new;
        }
    }
}

void ChainState::update_rho()
{
    const std::size_t K = state_.num_pairs;
    const std::size_t T = state_.num_samples;
    std::vector<double> new_log_p;
    for (int g = 0; g < kNumCategories; ++g) {
        const auto [lo, hi] = kRhoGroups[rho_group_of(g)];
        const double current = state_.log_rho_star[g];
        const double proposed = current + hp_->rho_step * standard_normal(rng_);
        std::array<double, 4> group {};
        const int width = hi - lo;
        for (int j = 0; j < width; ++j) group[j] = lo + j == g ? proposed : state_.log_rho_star[lo + j];
        const double total = log_sum_exp(std::span<const double> {group.data(), static_cast<std::size_t>(width)});
        std::array<double, 4> new_rho {};
        for (int j = 0; j < width; ++j) new_rho[j] = std::exp(group[j] - total);

        new_log_p.assign(T * K * width, 0.0);
        std::vector<double> ll_diff(T, 0.0);
        for (std::size_t t = 0; t < T; ++t) {
            const double w0 = state_.weight(t, 0);
            for (std::size_t k = 0; k < K; ++k) {
                const std::size_t base = (t * K + k) * kNumCategories;
                const double* n = data_->n.data() + base;
                for (int j = 0; j < width; ++j) {
                    const int gg = lo + j;
                    if (n[gg] == 0.0) continue;
                    const double lp = std::log(sub_[base + gg] + w0 * new_rho[j]);
                    new_log_p[(t * K + k) * width + j] = lp;
                    ll_diff[t] += n[gg] * (lp - log_p_[base + gg]);
                }
            }
        }
        double diff = 0.0;
        for (double x : ll_diff) diff += x;
        const double shape = rho_shape(*hp_, g);
        const double prior_diff = log_gamma_density_at_log(proposed, shape) - log_gamma_density_at_log(current, shape);
        const double log_ratio = inv_temp_ * (diff + prior_diff) + (proposed - current);
        ++acceptance_.rho_proposed;
        if (!metropolis(log_ratio)) continue;
        ++acceptance_.rho_accepted;
        state_.log_rho_star[g] = proposed;
        state_.refresh_rho();
        for (std::size_t t = 0; t < T; ++t) {
            for (std::size_t k = 0; k < K; ++k) {
                const std::size_t base = (t * K + k) * kNumCategories;
                const double* n = data_->n.data() + base;
                for (int j = 0; j < width; ++j) {
                    if (n[lo + j] != 0.0) log_p_[base + lo + j] = new_log_p[(t * K + k) * width + j];
                }
            }
            ll_t_[t] = sample_log_lik(t, log_p_.data() + t * K * kNumCategories);
        }
        log_lik_ = data_->log_v_term;
        for (double v : ll_t_) log_lik_ += v;
    }
}

void ChainState::update_wstar()
{
    if (!state_.purity) return;
    const std::size_t K = state_.num_pairs;
    const std::size_t stride = state_.weight_stride();
    const std::size_t cells = K * kNumCategories;
    for (std::size_t t = 0; t < state_.num_samples; ++t) {
        const double* n = data_->cell(t, 0);
        const double current = state_.logit_wstar[t];
        const double proposed = current + hp_->wstar_step * standard_normal(rng_);
        const double* log_theta = state_.log_theta.data() + t * stride;
        const double total = log_sum_exp(std::span<const double> {log_theta, stride});
        const double tumor = logistic(-proposed);
        scratch_w_.resize(stride);
        for (std::size_t j = 0; j < stride; ++j) scratch_w_[j] = tumor * std::exp(log_theta[j] - total);
        fill_subclone_part(scratch_w_, logistic(proposed), scratch_sub_.data());
        const double w0 = scratch_w_[0];
        for (std::size_t i = 0; i < cells; ++i) {
            scratch_log_p_[i] = n[i] != 0.0 ? std::log(scratch_sub_[i] + w0 * state_.rho[i % kNumCategories]) : 0.0;
        }
        const double ll_new = sample_log_lik(t, scratch_log_p_.data());
        const double prior_diff = (hp_->d1_star - 1.0) * (log_logistic(proposed) - log_logistic(current)) +
                                  (hp_->d2_star - 1.0) * (log_logistic(-proposed) - log_logistic(-current));
        const double jacobian = log_logistic(proposed) + log_logistic(-proposed) - log_logistic(current) - log_logistic(-current);
        const double log_ratio = inv_temp_ * (ll_new - ll_t_[t] + prior_diff) + jacobian;
        ++acceptance_.wstar_proposed;
        if (!metropolis(log_ratio)) continue;
        ++acceptance_.wstar_accepted;
        state_.logit_wstar[t] = proposed;
        state_.refresh_sample(t);
        std::copy(scratch_sub_.begin(), scratch_sub_.end(), sub_.begin() + static_cast<std::ptrdiff_t>(t * cells));
        std::copy(scratch_log_p_.begin(), scratch_log_p_.end(), log_p_.begin() + static_cast<std::ptrdiff_t>(t * cells));
        log_lik_ += ll_new - ll_t_[t];
        ll_t_[t] = ll_new;
    }
}

void ChainState::sweep()
{
    update_z();
    update_z_pairs();
    update_pi();
    update_theta();
    update_rho();
    update_wstar();
}

void ChainState::swap_state(ChainState& other) noexcept
{
    std::swap(state_, other.state_);
    std::swap(sub_, other.sub_);
    std::swap(log_p_, other.log_p_);
    std::swap(ll_t_, other.ll_t_);
    std::swap(log_lik_, other.log_lik_);
}

TemperedEnsemble::TemperedEnsemble(const SamplerData& data, const Hyperparameters& hp, int num_subclones, bool purity,
                                   std::uint64_t seed, std::uint64_t ensemble_index, KernelOptions options)
    : scheduler_ {make_stream(seed, StreamRole::Scheduler, ensemble_index)}, u0_ {hp.u0}
{
    const std::size_t I = hp.ladder.size();
    chains_.reserve(I);
    for (std::size_t i = 0; i < I; ++i) {
        auto rng = make_stream(seed, StreamRole::Chain, ensemble_index, i);
        auto state = draw_from_prior(data.num_samples, data.num_pairs, num_subclones, hp, purity, rng);
        chains_.emplace_back(data, hp, std::move(state), hp.ladder[i], rng, options);
    }
    swaps_.proposed.assign(I > 1 ? I - 1 : 0, 0);
    swaps_.accepted.assign(I > 1 ? I - 1 : 0, 0);
}

double TemperedEnsemble::swap_log_ratio(double inv_temp_i, double inv_temp_j, double log_target_i, double log_target_j)
{
    if (inv_temp_i == inv_temp_j || log_target_i == log_target_j) return 0.0;
    const double r = (inv_temp_i - inv_temp_j) * (log_target_j - log_target_i);
    return std::isnan(r) ? kNegInf : r;
}

void TemperedEnsemble::step(ThreadPool* pool)
{
    const double u = uniform01(scheduler_);
    if (u < u0_) {
        if (pool != nullptr && pool->width() > 1) {
            pool->parallel_for(chains_.size(), [this](std::size_t i) { chains_[i].sweep(); });
        } else {
            for (auto& chain : chains_) chain.sweep();
        }
        return;
    }
    if (chains_.size() < 2) return;
    const int i = uniform_int(scheduler_, 0, static_cast<int>(chains_.size()) - 2);
    auto& a = chains_[i];
    auto& b = chains_[i + 1];
    const double log_ratio = swap_log_ratio(1.0 / a.temperature(), 1.0 / b.temperature(), a.log_target(), b.log_target());
    ++swaps_.proposed[i];
    const double log_u = std::log(uniform01(scheduler_));
    if (log_ratio >= 0.0 || log_u < log_ratio) {
        ++swaps_.accepted[i];
        a.swap_state(b);
    }
}

PosteriorArchive run_chain(const ReadCountTensor& data, const MissingnessRates& v, const Hyperparameters& hp,
                           int num_subclones, std::uint64_t seed, std::size_t threads, bool purity,
                           const ProgressFn& progress)
{
    hp.validate();
    data.validate();
    if (num_subclones < 1) throw Error {"number of subclones must be >= 1"};
    const auto sdata = SamplerData::from(data, v, 1.0);
    TemperedEnsemble ensemble {sdata, hp, num_subclones, purity, seed};
    ThreadPool pool {threads};

    PosteriorArchive archive;
    archive.manifest.seed = seed;
    archive.manifest.num_subclones = num_subclones;
    archive.manifest.num_samples = data.num_samples();
    archive.manifest.num_pairs = data.num_pairs();
    archive.manifest.purity = purity;
    archive.manifest.hyperparameters = hp;
    archive.manifest.config_hash = config_hash(hp, seed, num_subclones, data.num_samples(), data.num_pairs(), purity);
    archive.initial = snapshot(ensemble.cold().state(), 0);

    for (int it = 1; it <= hp.iterations; ++it) {
        ensemble.step(&pool);
        if (it > hp.burn_in && it % hp.thin == 0) archive.samples.push_back(snapshot(ensemble.cold().state(), it));
        if (progress && it % 1000 == 0) progress(it, ensemble.cold().log_likelihood());
    }
    return archive;
}

} // namespace pairclone
