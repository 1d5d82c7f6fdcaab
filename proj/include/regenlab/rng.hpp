#pragma once

#include <cstdint>
#include <random>

namespace regenlab::rng {

/// One reproducible random stream.  All samplers consume raw engine output
/// through u01()/bits() only, so a (master_seed, index) pair pins every draw
/// on every platform: the mt19937_64 sequence is fixed by the standard and
/// no library distribution objects are involved.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  /// Stream for replication `index` under `master_seed`.
  static RngStream derive(std::uint64_t master_seed, std::uint64_t index);

  /// Child stream for a tagged sub-purpose (path, allocation, ...).
  RngStream spawn(std::uint64_t tag) const;

  std::uint64_t seed() const { return seed_; }

  std::uint64_t bits() { return engine_(); }

  /// Uniform on (0, 1]; never returns 0 so logs are safe.
  double u01() { return (static_cast<double>(bits() >> 11) + 1.0) * 0x1.0p-53; }

  /// Standard exponential.
  double exponential() { return -std::log(u01()); }

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Gamma(shape, 1), shape > 0 (Marsaglia & Tsang 2000).
  double gamma(double shape);

  /// Beta(a, b), a, b > 0.
  double beta(double a, double b);

  /// Poisson(mu): inversion below mean 10, Hormann's PTRS transformed
  /// rejection above.
  long long poisson(double mu);

  /// Binomial(n, p): inversion for small n*p, otherwise exact recursive
  /// splitting on a Beta order statistic (O(log n) splits).
  long long binomial(long long n, double p);

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// splitmix64 step; used to mix seeds for derived streams.
std::uint64_t splitmix64(std::uint64_t& state);

} // namespace regenlab::rng
