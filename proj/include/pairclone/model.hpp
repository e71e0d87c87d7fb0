#pragma once

// Parameters, likelihood and priors of the subclone mixture model.
//
// For sample t and pair k the conditional read-category probabilities are
//
//   p~_tkg = sum_{c=1..C} w_tc A(h_g, z_kc) + w_t0 rho_g     (+ w*_t A(h_g, z^(1)))
//
// and the unconditional ones multiply in the missingness rate of g's case.
// Weights are carried as unscaled log-abundances theta (w = normalized
// exp(theta)), noise weights as unscaled rho*; sampling happens on these.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pairclone/data.hpp"
#include "pairclone/genotype.hpp"
#include "pairclone/hyperparameters.hpp"
#include "pairclone/rng.hpp"

namespace pairclone {

using CategoryProbs = std::array<double, kNumCategories>;

struct ModelState {
    int num_subclones = 0; // C
    std::size_t num_samples = 0;
    std::size_t num_pairs = 0;
    bool purity = false;

    std::vector<std::uint8_t> z;             // [k][c], code index 0..9
    std::vector<double> log_pi;              // [c][q]
    std::vector<double> log_theta;           // [t][c], c = 0..C
    std::array<double, kNumCategories> log_rho_star {};
    std::vector<double> logit_wstar;         // [t], purity mode only

    // Derived by refresh(); always consistent with the fields above.
    std::vector<double> w;                   // [t][c], c = 0..C
    std::array<double, kNumCategories> rho {};
    std::vector<double> wstar;               // [t], zero outside purity mode

    static ModelState zeros(std::size_t num_samples, std::size_t num_pairs, int num_subclones, bool purity = false);

    std::size_t weight_stride() const noexcept { return static_cast<std::size_t>(num_subclones) + 1; }
    int code_index(std::size_t k, int c) const noexcept { return z[k * num_subclones + c]; }
    GenotypeCode code(std::size_t k, int c) const noexcept { return GenotypeCode {z[k * num_subclones + c] + 1}; }
    void set_code(std::size_t k, int c, GenotypeCode q) { z[k * num_subclones + c] = static_cast<std::uint8_t>(q.index()); }
    double weight(std::size_t t, int c) const noexcept { return w[t * weight_stride() + c]; }

    void refresh();
    void refresh_sample(std::size_t t);
    void refresh_rho();

    /// Sets weights directly (row t gets w[0..C], w* from wstar when in purity mode).
    void set_weights(std::size_t t, std::span<const double> weights, double normal_weight = 0.0);
    /// Sets rho from normalized group probabilities.
    void set_rho(const CategoryProbs& probs);
    /// Sets pi_c from probabilities.
    void set_pi(int c, std::span<const double> probs);
};

/// Draws every parameter from its prior; Z from the drawn pi.
ModelState draw_from_prior(std::size_t num_samples, std::size_t num_pairs, int num_subclones, const Hyperparameters& hp,
                           bool purity, RngStream& rng);

/// Conditional category probabilities for cell (t, k).
CategoryProbs p_tilde(const ModelState& state, std::size_t t, std::size_t k);

/// Multiplies in the missingness rate for each category's coverage case.
CategoryProbs full_category_probs(const CategoryProbs& p_cond, const std::array<double, 3>& v);

/// (fraction / temper) * sum n log p, without multinomial coefficients.
double log_likelihood(const ReadCountTensor& data, const MissingnessRates& v, const ModelState& state,
                      double fraction = 1.0, double temper = 1.0);

double log_likelihood(const WeightedCounts& data, const MissingnessRates& v, const ModelState& state);

/// log p(C) under the geometric prior, p(C) = (1 - r)^C r.
double log_prior_num_subclones(int num_subclones, double r);

struct PriorTerms {
    double num_subclones = 0.0;
    double pi = 0.0;        // Beta-Dirichlet on (pi_c1, pi~_c)
    double z = 0.0;         // categorical given pi
    double theta = 0.0;
    double rho_star = 0.0;
    double wstar = 0.0;

    double total() const noexcept { return num_subclones + pi + z + theta + rho_star + wstar; }
    /// Everything except p(C).
    double given_num_subclones() const noexcept { return pi + z + theta + rho_star + wstar; }
};

PriorTerms log_prior_terms(const ModelState& state, const Hyperparameters& hp);

/// Joint log prior density including p(C).
double log_prior(const ModelState& state, const Hyperparameters& hp);

/// Appends one pseudo-pair per SNV: variant reads as "1-", reference reads as "0-".
ReadCountTensor augment_snvs(const ReadCountTensor& pairs, const SnvCounts& snvs);

struct SplitGenotypes {
    std::vector<std::uint8_t> pair_codes;  // [k][c], code index, first K rows
    std::vector<double> snv_dosage;        // [s][c], in {0, 0.5, 1}
    std::size_t num_pairs = 0;
    std::size_t num_snvs = 0;
    int num_subclones = 0;
};

/// Splits an augmented (K + S) x C code matrix into pair codes and SNV dosages.
SplitGenotypes split_genotypes(std::span<const std::uint8_t> codes, std::size_t num_pairs, std::size_t num_snvs,
                               int num_subclones);

} // namespace pairclone
