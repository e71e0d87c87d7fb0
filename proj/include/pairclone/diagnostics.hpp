#pragma once

// Convergence and sampler-correctness checks.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pairclone/archive.hpp"
#include "pairclone/data.hpp"
#include "pairclone/hyperparameters.hpp"
#include "pairclone/model.hpp"
#include "pairclone/sampler.hpp"

namespace pairclone {

/// Batch-means estimate of the spectral density at frequency zero, batch
/// length floor(sqrt(L)). Requires L >= 50.
double spectral_density_zero(std::span<const double> trace);

struct ZScore {
    double z = 0.0;
    double p = 1.0;
    bool degenerate = false; // zero variance; z and p are meaningless
};

/// Two-window comparison of the first fraction_a and last fraction_b of the trace.
ZScore geweke_convergence(std::span<const double> trace, double fraction_a = 0.1, double fraction_b = 0.5);

/// Sample autocorrelations for lags 0..max_lag.
std::vector<double> autocorrelation(std::span<const double> trace, std::size_t max_lag);

/// Scalar function of a model state: a weight w_tc or a probability p_tkg.
struct Statistic {
    enum class Kind { Weight, Probability } kind = Kind::Weight;
    std::size_t t = 0; // 0-based
    std::size_t k = 0;
    int c = 0;         // 0 = background
    int g = 0;

    /// Names use 1-based t, k, g and 0-based c: "w_1_2", "p_1_23_3".
    std::string name() const;
    static Statistic parse(const std::string& name);
    double evaluate(const ModelState& state, const std::array<double, 3>& v) const;
};

/// Trace of a statistic over the archive's samples.
std::vector<double> statistic_trace(const PosteriorArchive& archive, const Statistic& stat, const MissingnessRates* v);

struct GirConfig {
    std::size_t num_samples = 4;
    std::size_t num_pairs = 80;
    int num_subclones = 3;
    std::int64_t reads_per_cell = 5;
    std::array<double, 3> v {0.4, 0.3, 0.3};
    int iterations = 100000;
    int burn_in = 1000;
    std::size_t reference_draws = 1000000;
    std::vector<Statistic> statistics;
    KernelOptions kernel;
    Hyperparameters hp;

    /// The setup above with statistics w_12, w_43, p_1_23_3, p_3_60_7, p_2_13_2.
    static GirConfig standard();
};

struct GirRow {
    std::string name;
    double mean = 0.0;
    double reference = 0.0;
    double reference_se = 0.0;
    double spectral_density = 0.0;
    ZScore score;
};

/// Successive-conditional simulation: alternately draws data given the
/// parameters and one sampler sweep given the data; compares the running
/// means with an independent prior Monte Carlo reference.
std::vector<GirRow> getting_it_right(const GirConfig& config, std::uint64_t seed);

/// Prior Monte Carlo mean and standard error of each statistic.
std::vector<std::pair<double, double>> prior_reference(const GirConfig& config, std::uint64_t seed);

} // namespace pairclone
