#pragma once

#include <functional>

namespace regenlab::quad {

/// Adaptive Simpson on [a, b] with relative tolerance rel_tol.  abs_floor
/// stops refinement of subintervals whose contribution is below it.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double rel_tol = 1e-10, double abs_floor = 0.0);

/// Integral of f over [a, inf) when f decays at least exponentially with
/// rate >= decay_rate; the interval is truncated where exp(-decay_rate (x-a))
/// falls below 1e-20 and integrated adaptively in geometric chunks.
double integrate_exp_tail(const std::function<double(double)>& f, double a,
                          double decay_rate, double rel_tol = 1e-10);

/// Integral over [lo, hi] of exp(log_f) where the integrand is a single peak
/// centered near `center` of scale `width`.  The core window center +/- 30
/// widths is integrated first so the adaptive pass cannot step over the peak.
double integrate_log_peak(const std::function<double(double)>& log_f, double lo,
                          double hi, double center, double width,
                          double rel_tol = 1e-10);

} // namespace regenlab::quad
