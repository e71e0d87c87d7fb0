#pragma once

// Fixed-C posterior sampler: Gibbs updates for Z and pi, random-walk
// Metropolis-Hastings for theta, rho* and w*, and parallel tempering over a
// temperature ladder. Chain i targets (likelihood x prior)^(1 / Delta_i).

#include <cstdint>
#include <functional>
#include <vector>

#include "pairclone/archive.hpp"
#include "pairclone/data.hpp"
#include "pairclone/hyperparameters.hpp"
#include "pairclone/model.hpp"
#include "pairclone/rng.hpp"
#include "pairclone/thread_pool.hpp"

namespace pairclone {

/// Counts and missingness rates in the form the kernels consume.
struct SamplerData {
    std::size_t num_samples = 0;
    std::size_t num_pairs = 0;
    std::vector<double> n;        // [t][k][g]
    /// Sum of n log v over all cells; constant in every kernel.
    double log_v_term = 0.0;

    const double* cell(std::size_t t, std::size_t k) const { return n.data() + (t * num_pairs + k) * kNumCategories; }

    static SamplerData from(const WeightedCounts& counts, const MissingnessRates& v);
    static SamplerData from(const ReadCountTensor& counts, const MissingnessRates& v, double fraction = 1.0);
};

struct KernelOptions {
    /// Include the log-transform Jacobian in the theta update. Only turned
    /// off to build a deliberately wrong sampler for diagnostics tests.
    bool theta_jacobian = true;
};

/// A model state together with cached per-cell probabilities and the
/// random stream and temperature of its ladder slot.
class ChainState {
public:
    ChainState(const SamplerData& data, const Hyperparameters& hp, ModelState state, double temperature, RngStream rng,
               KernelOptions options = {});

    const ModelState& state() const noexcept { return state_; }
    double temperature() const noexcept { return temperature_; }
    RngStream& rng() noexcept { return rng_; }

    /// Untempered sum n log p over the sampler data.
    double log_likelihood() const noexcept { return log_lik_; }
    /// Untempered log posterior kernel (likelihood + prior including p(C)).
    double log_target() const;

    void set_data(const SamplerData& data);
    void set_state(ModelState state);

    void update_z();
    /// Joint Gibbs update of two randomly chosen entries of every row of Z.
    void update_z_pairs();
    void update_pi();
    void update_theta();
    void update_rho();
    void update_wstar();
    /// One full sweep Z (single entries, then pairs), pi, theta, rho* (and w* in purity mode).
    void sweep();

    /// Exchanges model states (and caches) but keeps temperatures and streams.
    void swap_state(ChainState& other) noexcept;

    /// Full 10-term log conditional of z_kc used by update_z, exposed for tests.
    std::array<double, kNumCodes> z_log_conditional(std::size_t k, int c) const;
    /// Joint log conditional of (z_kc, z_kd), indexed q_c * 10 + q_d.
    std::array<double, kNumCodes * kNumCodes> z_pair_log_conditional(std::size_t k, int c, int d) const;

    struct Acceptance {
        std::uint64_t theta_accepted = 0, theta_proposed = 0;
        std::uint64_t rho_accepted = 0, rho_proposed = 0;
        std::uint64_t wstar_accepted = 0, wstar_proposed = 0;
    };
    const Acceptance& acceptance() const noexcept { return acceptance_; }

private:
    void recompute_sample(std::size_t t);
    void recompute_all();
    void refresh_row(std::size_t k, int c, int old_code);
    void resum_log_lik();
    double sample_log_lik(std::size_t t, const double* log_p) const;
    void fill_subclone_part(const std::vector<double>& w_row, double wstar, double* out) const;
    bool metropolis(double log_ratio);

    const SamplerData* data_;
    const Hyperparameters* hp_;
    ModelState state_;
    double temperature_;
    double inv_temp_;
    RngStream rng_;
    KernelOptions options_;

    std::vector<double> sub_;      // [t][k][g] mixture without the background term
    std::vector<double> log_p_;    // [t][k][g] log p~
    std::vector<double> ll_t_;     // [t] sum_k,g n log p~
    double log_lik_ = 0.0;
    Acceptance acceptance_;

    // scratch
    std::vector<double> scratch_sub_;
    std::vector<double> scratch_log_p_;
    std::vector<double> scratch_w_;
};

struct SwapStats {
    std::vector<std::uint64_t> proposed; // per adjacent pair (i, i + 1)
    std::vector<std::uint64_t> accepted;
};

/// Parallel-tempering ensemble for one value of C.
class TemperedEnsemble {
public:
    TemperedEnsemble(const SamplerData& data, const Hyperparameters& hp, int num_subclones, bool purity,
                     std::uint64_t seed, std::uint64_t ensemble_index = 0, KernelOptions options = {});

    /// One iteration: with probability u0 every chain sweeps, otherwise one
    /// adjacent swap is attempted. Chains sweep concurrently when a pool is given.
    void step(ThreadPool* pool = nullptr);

    const ChainState& cold() const noexcept { return chains_.back(); }
    ChainState& cold() noexcept { return chains_.back(); }
    std::vector<ChainState>& chains() noexcept { return chains_; }
    const SwapStats& swap_stats() const noexcept { return swaps_; }

    /// log acceptance probability of swapping the states of chains i and i + 1.
    static double swap_log_ratio(double inv_temp_i, double inv_temp_j, double log_target_i, double log_target_j);

private:
    std::vector<ChainState> chains_;
    RngStream scheduler_;
    double u0_;
    SwapStats swaps_;
};

/// Progress callback: (iteration, cold-chain log likelihood).
using ProgressFn = std::function<void(int, double)>;

/// Fixed-C run on the full data: retains thinned cold-chain draws after burn-in.
PosteriorArchive run_chain(const ReadCountTensor& data, const MissingnessRates& v, const Hyperparameters& hp,
                           int num_subclones, std::uint64_t seed, std::size_t threads = 1, bool purity = false,
                           const ProgressFn& progress = {});

} // namespace pairclone
