#pragma once

#include <cstdint>

namespace regenlab::special {

/// ln Gamma(x), x > 0.
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Survival function of a chi-square distribution with df degrees of freedom.
double chi_square_sf(double x, double df);

/// Standard normal CDF.
double normal_cdf(double z);

/// ln C(n, k) for integer 0 <= k <= n.
double log_choose(long long n, long long k);

/// ln P{Poisson(mu) = k}.
double poisson_log_pmf(long long k, double mu);

/// Chernoff bound on ln P{Poisson(mu) >= r} for r > mu > 0.
double poisson_upper_tail_log_bound(double mu, double r);

} // namespace regenlab::special
