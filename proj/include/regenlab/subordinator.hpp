#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "regenlab/regvar.hpp"
#include "regenlab/rng.hpp"

namespace regenlab::sub {

/// Drift-free, killing-free subordinator described by its Levy tail.
/// inverse_tail is the generalized inverse of y -> nu([y, inf)): closed form
/// for a constant slowly varying factor, bisection otherwise.
struct SubordinatorSpec {
  regvar::RegVarTail tail;

  static SubordinatorSpec stable(double alpha);
  static SubordinatorSpec from_tail(const regvar::RegVarTail& tail);

  double tail_value(double y) const;
  double inverse_tail(double level) const;
};

/// Jump record of a truncated subordinator.  running[k] is the compensated
/// partial sum of jumps[0..k]; stop_mass = exp(-running.back()).
struct SubordinatorPath {
  std::vector<double> epochs;
  std::vector<double> jumps;
  std::vector<double> running;
  double epsilon = 0.0;
  double stop_mass = 1.0;
  regvar::RegVarTail tail;

  std::size_t size() const { return jumps.size(); }

  /// Build a path from explicit jumps (validated); used by tests and tools.
  static SubordinatorPath from_jumps(std::vector<double> epochs,
                                     std::vector<double> jumps, double epsilon,
                                     const regvar::RegVarTail& tail);

  /// CSV dump, columns (k, tau_k, j_k, S_k).
  std::string to_csv() const;
};

/// Simulate jumps >= epsilon: epochs are Poisson with rate nu([eps,inf)),
/// jump sizes follow nu conditioned on [eps,inf) by inverse transform.
/// Stops at the first k with exp(-S(tau_k)) < stop_tol.
SubordinatorPath simulate_path(const SubordinatorSpec& spec, double epsilon,
                               double stop_tol, rng::RngStream& rng);

/// Box frequencies p_k = exp(-S(tau_{k-1})) - exp(-S(tau_k)) in path order,
/// with the unsimulated residual mass; plus a descending copy for rho.
struct FrequencyVector {
  std::vector<double> probs;
  double residual_mass = 0.0;
  std::vector<double> sorted_desc;
};

FrequencyVector frequencies(const SubordinatorPath& path);

/// #{k : p_k >= x} by binary search on the sorted view; x <= 0 is a domain
/// error (the count diverges in the untruncated model).
long long rho(const FrequencyVector& freqs, double x);

struct PathSummary {
  double exp_functional = 0.0;      // I_alpha estimate
  double bias_bound = 0.0;          // expected discarded tail beyond the stop
  double truncation_bias_bound = 0; // expected surplus from dropping jumps < eps
  double ignored_mass_rate = 0.0;   // per-unit-time mass of the dropped jumps
  long long n_jumps = 0;
};

/// I_alpha = int_0^inf exp(-alpha S) dtau on the simulated horizon.
/// bias_bound = stop_mass^alpha / Phi_eps(alpha), the conditional expectation
/// of the discarded tail; truncation_bias_bound = alpha m_eps / Phi_eps^2.
PathSummary exp_functional(const SubordinatorPath& path, double alpha);

/// Laplace exponent of the truncated subordinator,
/// Phi_eps(s) = int_eps^inf (1 - e^{-s y}) nu(dy), by quadrature.
double truncated_laplace_exponent(const regvar::RegVarTail& tail, double epsilon,
                                  double s);

/// int_0^eps y nu(dy); infinite when alpha == 1.
double ignored_mass_rate(const regvar::RegVarTail& tail, double epsilon);

} // namespace regenlab::sub
