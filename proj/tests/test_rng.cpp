#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <vector>

#include "regenlab/rng.hpp"
#include "regenlab/special.hpp"

using namespace regenlab;

namespace {

// Goodness-of-fit of nonnegative-integer draws against an exact log-pmf;
// cells are merged until every expected count reaches 5, and all expected
// mass beyond the observed maximum is folded into the final bin.
double gof_pvalue(const std::vector<long long>& draws,
                  const std::function<double(long long)>& log_pmf) {
  std::map<long long, long long> hist;
  for (long long d : draws) ++hist[d];
  const long long hi = hist.rbegin()->first;
  const double n = static_cast<double>(draws.size());
  std::vector<double> obs, expct;
  double acc_o = 0.0, acc_e = 0.0;
  for (long long v = 0; v <= hi; ++v) {
    auto it = hist.find(v);
    acc_o += it == hist.end() ? 0.0 : static_cast<double>(it->second);
    acc_e += n * std::exp(log_pmf(v));
    if (acc_e >= 5.0) {
      obs.push_back(acc_o);
      expct.push_back(acc_e);
      acc_o = acc_e = 0.0;
    }
  }
  double seen = acc_e;
  for (double e : expct) seen += e;
  obs.back() += acc_o;
  expct.back() += acc_e + (n - seen); // unflushed cells plus the upper tail
  double stat = 0.0;
  for (std::size_t i = 0; i < obs.size(); ++i)
    stat += (obs[i] - expct[i]) * (obs[i] - expct[i]) / expct[i];
  return special::chi_square_sf(stat, static_cast<double>(obs.size() - 1));
}

} // namespace

TEST_CASE("streams are deterministic and distinct") {
  rng::RngStream a = rng::RngStream::derive(42, 0);
  rng::RngStream b = rng::RngStream::derive(42, 0);
  rng::RngStream c = rng::RngStream::derive(42, 1);
  bool same = true, distinct = false;
  for (int i = 0; i < 100; ++i) {
    auto x = a.bits();
    if (x != b.bits()) same = false;
    if (x != c.bits()) distinct = true;
  }
  CHECK(same);
  CHECK(distinct);
  CHECK(a.spawn(3).bits() != a.spawn(4).bits());
}

TEST_CASE("uniforms live in (0,1] with mean 1/2") {
  rng::RngStream rng(7);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double u = rng.u01();
    REQUIRE(u > 0.0);
    REQUIRE(u <= 1.0);
    sum += u;
  }
  CHECK(sum / 1e5 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("exponential and normal moments") {
  rng::RngStream rng(11);
  double se = 0.0, sn = 0.0, sn2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    se += rng.exponential();
    double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(se / n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(sn / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("poisson matches the exact pmf across regimes") {
  for (double mu : {0.5, 5.0, 50.0}) {
    rng::RngStream rng(static_cast<std::uint64_t>(1000 * mu) + 3);
    std::vector<long long> draws(100000);
    double mean = 0.0, var = 0.0;
    for (auto& d : draws) d = rng.poisson(mu);
    for (auto d : draws) mean += static_cast<double>(d);
    mean /= static_cast<double>(draws.size());
    for (auto d : draws) var += (d - mean) * (d - mean);
    var /= static_cast<double>(draws.size()) - 1.0;
    CAPTURE(mu);
    CHECK(var / mean > 0.97);
    CHECK(var / mean < 1.03);
    double p = gof_pvalue(draws, [&](long long k) { return special::poisson_log_pmf(k, mu); });
    CHECK(p > 1e-4);
  }
}

TEST_CASE("poisson tiny-mean shortcut is unbiased") {
  rng::RngStream rng(5);
  const double mu = 5e-10;
  const long long n = 2000000;
  long long ones = 0;
  for (long long i = 0; i < n; ++i) ones += rng.poisson(mu);
  // Expected n*mu = 0.001; observing > 25 would be astronomically unlikely.
  CHECK(ones <= 25);
}

TEST_CASE("binomial matches the exact pmf in both regimes") {
  auto log_binom_pmf = [](long long k, long long n, double p) {
    return special::log_choose(n, k) + k * std::log(p) + (n - k) * std::log1p(-p);
  };
  {
    rng::RngStream rng(21);
    std::vector<long long> draws(100000);
    for (auto& d : draws) d = rng.binomial(50, 0.3); // inversion path
    double p = gof_pvalue(draws, [&](long long k) { return log_binom_pmf(k, 50, 0.3); });
    CHECK(p > 1e-4);
  }
  {
    rng::RngStream rng(22);
    std::vector<long long> draws(100000);
    for (auto& d : draws) d = rng.binomial(1000, 0.3); // beta-splitting path
    double p = gof_pvalue(draws, [&](long long k) { return log_binom_pmf(k, 1000, 0.3); });
    CHECK(p > 1e-4);
  }
}

TEST_CASE("binomial moments at large n") {
  rng::RngStream rng(23);
  const long long n = 1000000;
  const double p = 0.5;
  const int reps = 2000;
  double mean = 0.0;
  for (int i = 0; i < reps; ++i) mean += static_cast<double>(rng.binomial(n, p));
  mean /= reps;
  double sd_of_mean = std::sqrt(n * p * (1 - p) / reps);
  CHECK(std::fabs(mean - n * p) < 5.0 * sd_of_mean);
  CHECK(rng.binomial(7, 1.0) == 7);
  CHECK(rng.binomial(7, 0.0) == 0);
}

TEST_CASE("gamma and beta moments") {
  rng::RngStream rng(31);
  const int n = 200000;
  double sg = 0.0, sg2 = 0.0, sb = 0.0;
  for (int i = 0; i < n; ++i) {
    double g = rng.gamma(2.5);
    sg += g;
    sg2 += g * g;
    sb += rng.beta(2.0, 3.0);
  }
  double mg = sg / n;
  CHECK(mg == doctest::Approx(2.5).epsilon(0.01));
  CHECK(sg2 / n - mg * mg == doctest::Approx(2.5).epsilon(0.03));
  CHECK(sb / n == doctest::Approx(0.4).epsilon(0.01));
}
