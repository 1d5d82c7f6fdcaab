#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "regenlab/rng.hpp"
#include "regenlab/subordinator.hpp"

namespace regenlab::occ {

/// Deterministic frequencies p*_j = j^{-beta} / Z, j = 1..K, kept analytic
/// so K in the tens of millions costs no memory.
struct PowerLawFrequencies {
  double beta = 2.0;
  double zeta = 0.0;          // Z = sum_{j>=1} j^{-beta}
  long long k_boxes = 0;      // K, minimal with residual <= tail_tol
  double residual_mass = 0.0; // sum_{j>K} j^{-beta} / Z

  double prob(long long j) const;
  std::vector<double> materialize() const; // probs 1..K
};

/// Z computed by direct summation plus an Euler-Maclaurin tail, accurate to
/// 1e-14 relative; errors: beta <= 1 is non-summable.
PowerLawFrequencies power_law_frequencies(double beta, double tail_tol);

/// #{j <= K : p*_j >= x} via the closed form floor((Z x)^{-1/beta}) clipped
/// to K, with an exactness nudge at ties.
long long rho_star(const PowerLawFrequencies& freqs, double x);

enum class AllocationMode { FixedN, Poissonized };

struct OccupancyCounts {
  std::vector<long long> counts;
  long long overflow = 0;
  AllocationMode mode = AllocationMode::FixedN;
  double scale = 0.0; // n or t
};

struct AllocatePolicy {
  bool strict = true;
  double overflow_budget = 0.1;
};

/// Multinomial allocation of n balls over (probs..., residual) by sequential
/// conditional binomials, one O(K) pass.  In strict mode a configuration
/// whose expected overflow residual*n exceeds the budget is rejected.
OccupancyCounts allocate_fixed(std::span<const double> probs, double residual_mass,
                               long long n, rng::RngStream& rng,
                               const AllocatePolicy& policy = {});
OccupancyCounts allocate_fixed(const sub::FrequencyVector& freqs, long long n,
                               rng::RngStream& rng, const AllocatePolicy& policy = {});

/// Poissonized allocation: counts are independent Poisson(p_k t), overflow is
/// Poisson(residual t), reported but never counted in the statistics.
OccupancyCounts allocate_poissonized(std::span<const double> probs,
                                     double residual_mass, double t,
                                     rng::RngStream& rng);
OccupancyCounts allocate_poissonized(const sub::FrequencyVector& freqs, double t,
                                     rng::RngStream& rng);

/// Occupancy spectrum: r -> K_{n,r} for occupied r, the total K_n, and
/// suffix sums for K_{n,>=r}.  Overflow balls are excluded and reported.
struct CountProfile {
  std::map<long long, long long> by_count;
  long long total_occupied = 0;
  long long overflow = 0;
  AllocationMode mode = AllocationMode::FixedN;
  double scale = 0.0;

  long long at(long long r) const;
  long long at_least(long long r) const;
  long long balls_in_boxes() const; // sum_r r K_{n,r}

  /// CSV dump, columns (r, K_n_r), with a #-metadata header.
  std::string to_csv(std::uint64_t seed) const;
};

CountProfile count_profile(const OccupancyCounts& counts);

/// Poissonized counts of boxes at occupancy >= r_min only.  Boxes whose mean
/// p_j t makes a count >= r_min unreachable in double precision (Chernoff
/// bound below 1e-40 accumulated over all remaining boxes) are skipped, which
/// turns a K ~ 1e7 scan into a few thousand Poisson draws.
struct TailCounts {
  std::map<long long, long long> by_count;
  long long r_min = 0;
  long long boxes_sampled = 0;

  long long at(long long r) const;
  long long at_least(long long r) const;
};

TailCounts poissonized_profile_tail(const PowerLawFrequencies& freqs, double t,
                                    long long r_min, rng::RngStream& rng);

} // namespace regenlab::occ
