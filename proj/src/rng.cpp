#include "regenlab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace regenlab::rng {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngStream::RngStream(std::uint64_t seed) : engine_(seed), seed_(seed) {}

RngStream RngStream::derive(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t s = master_seed ^ (0x9E3779B97F4A7C15ULL * (index + 1));
  splitmix64(s);
  return RngStream(splitmix64(s));
}

RngStream RngStream::spawn(std::uint64_t tag) const {
  std::uint64_t s = seed_ ^ (0xD1B54A32D192ED03ULL * (tag + 1));
  splitmix64(s);
  return RngStream(splitmix64(s));
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  for (;;) {
    double u = 2.0 * u01() - 1.0;
    double v = 2.0 * u01() - 1.0;
    double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      double m = std::sqrt(-2.0 * std::log(s) / s);
      spare_normal_ = v * m;
      has_spare_ = true;
      return u * m;
    }
  }
}

double RngStream::gamma(double shape) {
  if (!(shape > 0.0)) throw std::domain_error("gamma: shape must be positive");
  if (shape < 1.0) {
    // Boost: Gamma(a) = Gamma(a+1) * U^{1/a}.
    double g = gamma(shape + 1.0);
    return g * std::pow(u01(), 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = normal();
    double v = 1.0 + c * x;
    if (v <= 0.0) continue;
    v = v * v * v;
    double u = u01();
    double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RngStream::beta(double a, double b) {
  double x = gamma(a);
  double y = gamma(b);
  return x / (x + y);
}

long long RngStream::poisson(double mu) {
  if (mu < 0.0) throw std::domain_error("poisson: mu must be >= 0");
  if (mu == 0.0) return 0;
  if (mu < 1e-9) {
    // P{>=2} < 5e-19 is below the resolution of a 53-bit uniform.
    return u01() <= mu ? 1 : 0;
  }
  if (mu < 10.0) {
    // Inversion by uniform products.
    const double limit = std::exp(-mu);
    long long k = 0;
    double prod = u01();
    while (prod > limit) {
      ++k;
      prod *= u01();
    }
    return k;
  }
  // PTRS (Hormann 1993): transformed rejection with squeeze.
  const double log_mu = std::log(mu);
  const double b = 0.931 + 2.53 * std::sqrt(mu);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    double u = u01() - 0.5;
    double v = u01();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (kf < 0.0) continue;
    long long k = static_cast<long long>(kf);
    if (us >= 0.07 && v <= v_r) return k;
    if (us < 0.013 && v > us) continue;
    double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    double rhs = kf * log_mu - mu - std::lgamma(kf + 1.0);
    if (lhs <= rhs) return k;
  }
}

namespace {

// Inversion; cheap while n*p stays small.
long long binomial_inversion(RngStream& rng, long long n, double p) {
  const double q = 1.0 - p;
  const double s = p / q;
  double f = std::exp(static_cast<double>(n) * std::log(q));
  double cum = f;
  double u = rng.u01();
  long long x = 0;
  while (u > cum && x < n) {
    ++x;
    f *= s * static_cast<double>(n - x + 1) / static_cast<double>(x);
    cum += f;
  }
  return x;
}

} // namespace

long long RngStream::binomial(long long n, double p) {
  if (n < 0) throw std::domain_error("binomial: n must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binomial: p must be in [0,1]");
  long long shift = 0;
  long long sign = 1;
  for (;;) {
    if (n == 0 || p <= 0.0) return shift;
    if (p >= 1.0) return shift + sign * n;
    if (p > 0.5) {
      shift += sign * n;
      sign = -sign;
      p = 1.0 - p;
      continue;
    }
    if (static_cast<double>(n) * p <= 30.0) {
      return shift + sign * binomial_inversion(*this, n, p);
    }
    // Split on the a-th order statistic of n uniforms, Beta(a, n+1-a).
    long long a = 1 + n / 2;
    long long b = n + 1 - a;
    double y = beta(static_cast<double>(a), static_cast<double>(b));
    if (y <= p) {
      shift += sign * a;
      p = (p - y) / (1.0 - y);
      if (p < 0.0) p = 0.0;
      n = b - 1;
    } else {
      p = p / y;
      if (p > 1.0) p = 1.0;
      n = a - 1;
    }
  }
}

} // namespace regenlab::rng
