#include "regenlab/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "regenlab/special.hpp"

namespace regenlab::occ {

namespace {

// sum_{j > J} j^{-beta} by Euler-Maclaurin at a = J + 1:
// int_a^inf + f(a)/2 - f'(a)/12 + f'''(a)/720, error O(a^{-beta-5}).
double zeta_tail(double beta, long long J) {
  double a = static_cast<double>(J + 1);
  double fa = std::pow(a, -beta);
  double t = fa * a / (beta - 1.0); // int_a^inf x^-beta dx = a^{1-beta}/(beta-1)
  t += 0.5 * fa;
  t += beta * fa / a / 12.0;
  t -= beta * (beta + 1.0) * (beta + 2.0) * fa / (a * a * a) / 720.0;
  return t;
}

double zeta_value(double beta) {
  const long long J = 1000;
  double sum = 0.0;
  for (long long j = J; j >= 1; --j) sum += std::pow(static_cast<double>(j), -beta);
  return sum + zeta_tail(beta, J);
}

} // namespace

double PowerLawFrequencies::prob(long long j) const {
  return std::pow(static_cast<double>(j), -beta) / zeta;
}

std::vector<double> PowerLawFrequencies::materialize() const {
  std::vector<double> p(static_cast<std::size_t>(k_boxes));
  for (long long j = 1; j <= k_boxes; ++j) p[static_cast<std::size_t>(j - 1)] = prob(j);
  return p;
}

PowerLawFrequencies power_law_frequencies(double beta, double tail_tol) {
  if (!(beta > 1.0)) throw std::domain_error("power_law_frequencies: beta must exceed 1 "
                                             "(j^-beta is not summable otherwise)");
  if (!(tail_tol > 0.0 && tail_tol < 1.0))
    throw std::domain_error("power_law_frequencies: tail_tol must be in (0,1)");
  PowerLawFrequencies f;
  f.beta = beta;
  f.zeta = zeta_value(beta);
  const double budget = tail_tol * f.zeta;
  // Minimal K with sum_{j>K} j^-beta <= budget.
  if (zeta_tail(beta, 1000) > budget) {
    long long lo = 1000, hi = 2000;
    while (zeta_tail(beta, hi) > budget) hi *= 2;
    while (lo + 1 < hi) {
      long long mid = lo + (hi - lo) / 2;
      (zeta_tail(beta, mid) > budget ? lo : hi) = mid;
    }
    f.k_boxes = hi;
    f.residual_mass = zeta_tail(beta, hi) / f.zeta;
  } else {
    double partial = 0.0;
    long long k = 0;
    while (k < 1000 && f.zeta - partial > budget) {
      ++k;
      partial += std::pow(static_cast<double>(k), -beta);
    }
    f.k_boxes = std::max<long long>(k, 1);
    f.residual_mass = std::max(f.zeta - partial, 0.0) / f.zeta;
  }
  return f;
}

long long rho_star(const PowerLawFrequencies& freqs, double x) {
  if (!(x > 0.0)) throw std::domain_error("rho_star: x must be positive");
  double v = std::pow(freqs.zeta * x, -1.0 / freqs.beta);
  long long j = static_cast<long long>(std::floor(v));
  // Settle ties against the exact probabilities.
  while (j + 1 <= freqs.k_boxes && freqs.prob(j + 1) >= x) ++j;
  while (j >= 1 && freqs.prob(j) < x) --j;
  return std::clamp<long long>(j, 0, freqs.k_boxes);
}

OccupancyCounts allocate_fixed(std::span<const double> probs, double residual_mass,
                               long long n, rng::RngStream& rng,
                               const AllocatePolicy& policy) {
  if (n < 1) throw std::domain_error("allocate_fixed: n must be >= 1");
  if (policy.strict && residual_mass * static_cast<double>(n) > policy.overflow_budget)
    throw std::runtime_error(
        "allocate_fixed: expected overflow " + std::to_string(residual_mass * n) +
        " balls exceeds budget " + std::to_string(policy.overflow_budget) +
        " in strict mode");
  OccupancyCounts out;
  out.mode = AllocationMode::FixedN;
  out.scale = static_cast<double>(n);
  out.counts.assign(probs.size(), 0);
  long long rem = n;
  double cum = 0.0, comp = 0.0; // Kahan for the consumed mass
  for (std::size_t k = 0; k < probs.size() && rem > 0; ++k) {
    double denom = 1.0 - cum;
    double pc = denom > 0.0 ? std::clamp(probs[k] / denom, 0.0, 1.0) : 1.0;
    long long c = rng.binomial(rem, pc);
    out.counts[k] = c;
    rem -= c;
    double y = probs[k] - comp;
    double t = cum + y;
    comp = (t - cum) - y;
    cum = t;
  }
  out.overflow = rem;
  return out;
}

OccupancyCounts allocate_fixed(const sub::FrequencyVector& freqs, long long n,
                               rng::RngStream& rng, const AllocatePolicy& policy) {
  return allocate_fixed(freqs.probs, freqs.residual_mass, n, rng, policy);
}

OccupancyCounts allocate_poissonized(std::span<const double> probs,
                                     double residual_mass, double t,
                                     rng::RngStream& rng) {
  if (!(t > 0.0)) throw std::domain_error("allocate_poissonized: t must be positive");
  OccupancyCounts out;
  out.mode = AllocationMode::Poissonized;
  out.scale = t;
  out.counts.resize(probs.size());
  for (std::size_t k = 0; k < probs.size(); ++k)
    out.counts[k] = rng.poisson(probs[k] * t);
  out.overflow = rng.poisson(residual_mass * t);
  return out;
}

OccupancyCounts allocate_poissonized(const sub::FrequencyVector& freqs, double t,
                                     rng::RngStream& rng) {
  return allocate_poissonized(freqs.probs, freqs.residual_mass, t, rng);
}

long long CountProfile::at(long long r) const {
  auto it = by_count.find(r);
  return it == by_count.end() ? 0 : it->second;
}

long long CountProfile::at_least(long long r) const {
  long long total = 0;
  for (auto it = by_count.lower_bound(r); it != by_count.end(); ++it)
    total += it->second;
  return total;
}

long long CountProfile::balls_in_boxes() const {
  long long total = 0;
  for (const auto& [r, k] : by_count) total += r * k;
  return total;
}

std::string CountProfile::to_csv(std::uint64_t seed) const {
  char head[160];
  std::snprintf(head, sizeof(head), "# mode=%s scale=%.17g overflow=%lld seed=%llu\n",
                mode == AllocationMode::FixedN ? "fixed-n" : "poissonized", scale,
                overflow, static_cast<unsigned long long>(seed));
  std::string out = head;
  out += "r,K_n_r\n";
  char line[64];
  for (const auto& [r, k] : by_count) {
    std::snprintf(line, sizeof(line), "%lld,%lld\n", r, k);
    out += line;
  }
  return out;
}

CountProfile count_profile(const OccupancyCounts& counts) {
  CountProfile p;
  p.mode = counts.mode;
  p.scale = counts.scale;
  p.overflow = counts.overflow;
  for (long long c : counts.counts) {
    if (c > 0) {
      ++p.by_count[c];
      ++p.total_occupied;
    }
  }
  return p;
}

long long TailCounts::at(long long r) const {
  if (r < r_min) throw std::domain_error("TailCounts: r below sampled range");
  auto it = by_count.find(r);
  return it == by_count.end() ? 0 : it->second;
}

long long TailCounts::at_least(long long r) const {
  if (r < r_min) throw std::domain_error("TailCounts: r below sampled range");
  long long total = 0;
  for (auto it = by_count.lower_bound(r); it != by_count.end(); ++it)
    total += it->second;
  return total;
}

TailCounts poissonized_profile_tail(const PowerLawFrequencies& freqs, double t,
                                    long long r_min, rng::RngStream& rng) {
  if (!(t > 0.0)) throw std::domain_error("poissonized_profile_tail: t must be positive");
  if (r_min < 1) throw std::domain_error("poissonized_profile_tail: r_min must be >= 1");
  TailCounts out;
  out.r_min = r_min;
  const double r = static_cast<double>(r_min);
  const double log_cut = std::log(1e-40);
  for (long long j = 1; j <= freqs.k_boxes; ++j) {
    double mu = freqs.prob(j) * t;
    if (mu < r) {
      double remaining = static_cast<double>(freqs.k_boxes - j + 1);
      if (special::poisson_upper_tail_log_bound(mu, r) + std::log(remaining) < log_cut)
        break;
    }
    long long z = rng.poisson(mu);
    ++out.boxes_sampled;
    if (z >= r_min) ++out.by_count[z];
  }
  // Residual boxes each have mass < p_K; their reaching r_min must be
  // impossible at this precision, otherwise the caller needs a full scan.
  if (freqs.k_boxes >= 1 && freqs.residual_mass > 0.0) {
    double mu_k = freqs.prob(freqs.k_boxes) * t;
    double n_eff = freqs.residual_mass / freqs.prob(freqs.k_boxes);
    if (mu_k < r &&
        special::poisson_upper_tail_log_bound(mu_k, r) + std::log(n_eff + 1.0) >= log_cut)
      throw std::runtime_error("poissonized_profile_tail: residual boxes could reach "
                               "r_min; use allocate_poissonized instead");
  }
  return out;
}

} // namespace regenlab::occ
