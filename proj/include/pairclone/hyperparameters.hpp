#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace pairclone {

/// Prior, proposal and schedule settings. Defaults are the values used for
/// the published simulation studies.
struct Hyperparameters {
    // priors
    double alpha = 4.0;   // pi_c1 ~ Be(1, alpha / C)
    double gamma = 2.0;   // (pi~_c2..pi~_cQ) ~ Dir(gamma, ..., gamma)
    double d = 0.5;       // theta_tc ~ Gamma(d, 1), c >= 1
    double d0 = 0.03;     // theta_t0 ~ Gamma(d0, 1)
    double d1 = 1.0;      // rho*_g ~ Gamma(d1, 1) for g <= 4, Gamma(2 d1, 1) otherwise
    double r = 0.4;       // C ~ Geom(r)
    double d1_star = 1.0; // w*_t ~ Be(d1*, d2*) in purity mode
    double d2_star = 1.0;

    int c_min = 1;
    int c_max = 10;
    /// Training fraction for model selection; <= 0 means calibrate from data.
    double b = 0.0;

    // Metropolis-Hastings step sizes (standard deviations on the log/logit scale)
    double theta_step = 0.2;
    double rho_step = 0.1;
    double wstar_step = 0.2;

    // parallel tempering
    std::vector<double> ladder {4.5, 3.2, 2.5, 2.0, 1.7, 1.5, 1.35, 1.2, 1.1, 1.0};
    double u0 = 0.9;

    // schedule
    int iterations = 30000;
    int burn_in = 10000;
    int thin = 10;
    /// Training-chain iterations between model-indicator moves.
    int selection_sweeps = 5;

    /// Throws Error describing the first violated constraint.
    void validate() const;

    /// Applies "key = value" overrides; unknown keys throw.
    void set(const std::string& key, const std::string& value);
};

/// Reads a key-value config file ('#' comments, "key = value" lines).
Hyperparameters load_hyperparameters(const std::filesystem::path& path, Hyperparameters base = {});

void to_json(nlohmann::json& j, const Hyperparameters& hp);
void from_json(const nlohmann::json& j, Hyperparameters& hp);

} // namespace pairclone
