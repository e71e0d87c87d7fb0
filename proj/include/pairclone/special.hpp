#pragma once

#include <cmath>

namespace pairclone {

/// Reentrant log-gamma; std::lgamma writes the global signgam on glibc.
inline double log_gamma_fn(double x)
{
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

inline double log_beta_fn(double a, double b)
{
    return log_gamma_fn(a) + log_gamma_fn(b) - log_gamma_fn(a + b);
}

inline double logistic(double u)
{
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

/// log(logistic(u)) without overflow.
inline double log_logistic(double u)
{
    if (u >= 0.0) return -std::log1p(std::exp(-u));
    return u - std::log1p(std::exp(u));
}

/// log Gamma(shape, 1) density at x = exp(log_x).
inline double log_gamma_density_at_log(double log_x, double shape)
{
    return (shape - 1.0) * log_x - std::exp(log_x) - log_gamma_fn(shape);
}

/// Two-sided standard-normal p-value.
inline double two_sided_p(double z)
{
    return std::erfc(std::fabs(z) / std::sqrt(2.0));
}

} // namespace pairclone
