#pragma once

// Choice of the number of subclones C from a fractional training/test split.
//
// Training ensembles for every candidate C sample p_b(x | C) proportional to
// p(x | C) p(n | x, C)^b. The model indicator then moves as an independence
// sampler whose proposals are the current cold states of those ensembles,
// accepted on the test likelihood ratio times the prior ratio on C.

#include <cstdint>
#include <vector>

#include "pairclone/archive.hpp"
#include "pairclone/data.hpp"
#include "pairclone/hyperparameters.hpp"
#include "pairclone/sampler.hpp"
#include "pairclone/summary.hpp"

namespace pairclone {

struct SplitData {
    WeightedCounts train; // b n
    WeightedCounts test;  // (1 - b) n
    double b = 0.0;
};

SplitData split_counts(const ReadCountTensor& data, double b);

/// b such that the test mass is 160 / T reads.
double calibrate_b(std::size_t num_samples, double total_reads);

/// Unclipped log acceptance ratio of moving the indicator from (C, x) to (C~, x~).
double transdim_log_ratio(int current_c, double current_test_loglik, int proposed_c, double proposed_test_loglik, double r);

/// min(1, exp(transdim_log_ratio)).
double transdim_accept(int current_c, double current_test_loglik, int proposed_c, double proposed_test_loglik, double r);

struct CandidateTrace {
    int num_subclones = 0;
    /// Test and full-data log likelihood of the cold training state, one per record.
    std::vector<double> test_loglik;
    std::vector<double> full_loglik;
    /// Thinned post-burn-in cold training states and their test log likelihoods.
    PosteriorArchive archive;
    std::vector<double> archive_test_loglik;
    SwapStats swaps;
};

struct SelectionResult {
    double b = 0.0;
    double test_mass = 0.0;
    std::vector<int> candidates;
    std::vector<double> probabilities;   // p_b(C | n'') from indicator visits
    std::vector<std::uint64_t> visits;
    std::vector<double> laplace;         // heuristic cross-check, normalized
    int mode = 0;
    std::uint64_t indicator_moves = 0;
    std::uint64_t indicator_accepted = 0;
    std::vector<CandidateTrace> traces;

    double probability_of(int c) const;
};

/// Runs all candidate training ensembles and the indicator chain.
SelectionResult run_selection(const ReadCountTensor& data, const MissingnessRates& v, const Hyperparameters& hp,
                              std::uint64_t seed, std::size_t threads = 1, bool purity = false);

/// Posterior mean of w given C and the full data, estimated from the training
/// archive by weighting each draw with its test likelihood.
std::vector<double> reweighted_mean_weights(const CandidateTrace& trace);

/// As above, but each draw's subclone columns are first matched to those of
/// `reference` so that label switching within the archive does not blur the mean.
std::vector<double> reweighted_mean_weights(const CandidateTrace& trace, const SubcloneMatrix& reference);

/// Number of free parameters used by the Laplace-style cross-check.
int laplace_parameter_count(int num_subclones, std::size_t num_samples);

} // namespace pairclone
