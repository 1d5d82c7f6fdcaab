#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "regenlab/regvar.hpp"

using namespace regenlab;
using regvar::GrowthFunction;
using regvar::SlowlyVarying;

TEST_CASE("slowly varying families evaluate and slowly vary") {
  auto c = SlowlyVarying::constant(0.7);
  CHECK(c(1.0) == 0.7);
  CHECK(c(1e9) == 0.7);

  auto lp = SlowlyVarying::log_power(2.0, 1.0);
  CHECK(lp(1.0) == doctest::Approx(1.0));
  CHECK(lp(std::exp(1.0)) == doctest::Approx(4.0));
  CHECK(lp(0.5) == doctest::Approx(1.0)); // clamped below 1

  // ell(2x)/ell(x) -> 1 on a growing grid.
  for (auto s : {SlowlyVarying::log_power(1.0, 1.0), SlowlyVarying::log_power(-0.5, 2.0)}) {
    double prev = 10.0;
    for (double x : {1e2, 1e4, 1e8, 1e12}) {
      double ratio = std::fabs(s(2.0 * x) / s(x) - 1.0);
      CHECK(ratio < prev + 1e-12);
      prev = ratio;
    }
    CHECK(prev < 0.05);
  }
  CHECK_THROWS_AS(SlowlyVarying::log_power(1.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(SlowlyVarying::constant(0.0), std::domain_error);
}

TEST_CASE("slowly varying parse round trip") {
  auto a = SlowlyVarying::parse("const:0.5641896");
  CHECK(a.c == doctest::Approx(0.5641896));
  auto b = SlowlyVarying::parse("logpow:1.5,2");
  CHECK(b.p == 1.5);
  CHECK(b.offset == 2.0);
  auto c = SlowlyVarying::parse(SlowlyVarying::log_power(-0.5, 3.0).to_string());
  CHECK(c.p == -0.5);
  CHECK(c.offset == 3.0);
  CHECK_THROWS(SlowlyVarying::parse("nope:1"));
}

TEST_CASE("levy tail evaluation") {
  auto stable = regvar::RegVarTail::stable(0.5);
  CHECK(regvar::levy_tail(stable, 1.0) == doctest::Approx(0.5641895835477563).epsilon(1e-12));
  CHECK(regvar::levy_tail(stable, 4.0) == doctest::Approx(0.28209479177387814).epsilon(1e-12));
  regvar::RegVarTail unit{0.3, SlowlyVarying::constant(1.0), regvar::TailRole::LevyTail};
  CHECK(regvar::levy_tail(unit, 1.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(regvar::levy_tail(stable, 0.0), std::domain_error);
  CHECK_THROWS_AS(regvar::levy_tail(stable, -1.0), std::domain_error);
}

TEST_CASE("threshold solver matches closed forms") {
  auto one = SlowlyVarying::constant(1.0);
  // alpha = 1/2, ell == 1, t = 1e6: (1/2)^{2/3} 1e2.
  CHECK(regvar::solve_threshold(0.5, one, 1e6) ==
        doctest::Approx(std::pow(0.5, 2.0 / 3.0) * 100.0).epsilon(1e-10));
  // stable preset: (alpha/Gamma(1-alpha))^{1/(alpha+1)} t^{alpha/(alpha+1)}.
  auto stable_ell = SlowlyVarying::constant(1.0 / std::tgamma(0.5));
  double want = std::pow(0.5 / std::tgamma(0.5), 2.0 / 3.0) * 100.0;
  CHECK(regvar::solve_threshold(0.5, stable_ell, 1e6) == doctest::Approx(want).epsilon(1e-10));
  CHECK(want == doctest::Approx(43.01).epsilon(1e-3));
  // alpha = 1: t / r^2 = 1.
  CHECK(regvar::solve_threshold(1.0, one, 100.0) == doctest::Approx(10.0).epsilon(1e-10));
}

TEST_CASE("threshold residual stays below 1e-12 across the family grid") {
  for (double alpha : {0.3, 0.5, 0.9, 1.0}) {
    for (auto ell : {SlowlyVarying::constant(1.0), SlowlyVarying::constant(0.5641896),
                     SlowlyVarying::log_power(1.0, 1.0), SlowlyVarying::log_power(-0.5, 2.0)}) {
      for (double t : {1e4, 1e6, 1e8}) {
        double r = regvar::solve_threshold(alpha, ell, t);
        double lhs = alpha * std::pow(t, alpha) * ell(t / r) / std::pow(r, alpha + 1.0);
        CAPTURE(alpha);
        CAPTURE(t);
        CHECK(std::fabs(lhs - 1.0) <= 1e-12);
        CHECK(r >= 1.0);
        CHECK(r <= t);
      }
    }
  }
}

TEST_CASE("solved threshold is regularly varying with index alpha/(alpha+1)") {
  const double alpha = 0.5;
  const double want = std::pow(2.0, alpha / (alpha + 1.0));
  // Constant ell: exact at every scale.
  auto one = SlowlyVarying::constant(1.0);
  for (double t : {1e4, 1e6, 1e8}) {
    double ratio = regvar::solve_threshold(alpha, one, 2.0 * t) /
                   regvar::solve_threshold(alpha, one, t);
    CHECK(ratio == doctest::Approx(want).epsilon(1e-9));
  }
  // Slow log drift: deviation shrinks along the grid and ends below 1%.
  auto lp = SlowlyVarying::log_power(0.25, 1.0);
  double prev = 1.0;
  for (double t : {1e4, 1e6, 1e8}) {
    double ratio = regvar::solve_threshold(alpha, lp, 2.0 * t) /
                   regvar::solve_threshold(alpha, lp, t);
    double dev = std::fabs(ratio / want - 1.0);
    CHECK(dev <= prev + 1e-12);
    prev = dev;
  }
  CHECK(prev < 0.01);
}

TEST_CASE("naive threshold candidate shares the index") {
  auto lp = SlowlyVarying::log_power(1.0, 1.0);
  double r_def = regvar::solve_threshold(0.5, lp, 1e8);
  double r_naive = regvar::naive_threshold(0.5, lp, 1e8);
  CHECK(r_naive > 0.0);
  // Same regular-variation index: ratio is slowly varying, so O(1) here.
  CHECK(r_naive / r_def > 0.5);
  CHECK(r_naive / r_def < 2.0);
}

TEST_CASE("threshold infeasible when t is too small") {
  auto tiny = SlowlyVarying::constant(0.01);
  CHECK_THROWS_AS(regvar::solve_threshold(0.01, tiny, 2.0), std::runtime_error);
}

TEST_CASE("small count constants") {
  CHECK(regvar::small_count_constant(0.37, 1) == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(regvar::small_count_constant(0.5, 2) == doctest::Approx(0.125).epsilon(1e-12));
  CHECK_THROWS_AS(regvar::small_count_constant(1.0, 1), std::domain_error);
  CHECK_THROWS_AS(regvar::small_count_constant(0.0, 1), std::domain_error);

  // Partial sums increase to 1 (binomial theorem at (1-1)^alpha).
  double sum = 0.0, prev = 0.0;
  for (long long r = 1; r <= 10000; ++r) {
    sum += regvar::small_count_constant(0.5, r);
    CHECK(sum > prev);
    prev = sum;
  }
  CHECK(std::fabs(sum - 1.0) < 1e-2);

  // c_r ~ alpha r^{-1-alpha} / Gamma(1-alpha) at r = 1e3 within 1%.
  const double alpha = 0.5;
  double c = regvar::small_count_constant(alpha, 1000);
  double asym = alpha * std::pow(1000.0, -1.0 - alpha) / std::tgamma(1.0 - alpha);
  CHECK(c / asym == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("growth functions floor to integers") {
  CHECK(regvar::growth_eval(GrowthFunction::power(1.0 / 3.0), 1e6) == 100);
  CHECK(regvar::growth_eval(GrowthFunction::power_log(0.25, 1.0), 1e4) == 92);
  auto thr = GrowthFunction::threshold_r(0.5, SlowlyVarying::constant(1.0));
  CHECK(regvar::growth_eval(thr, 1e6) == 62);
  CHECK(regvar::growth_eval(GrowthFunction::constant(3.0), 1e9) == 3);
  CHECK(regvar::growth_eval(GrowthFunction::power(1.0 / 3.0, 2.0), 1e6) == 200);
  CHECK_THROWS_AS(regvar::growth_eval(GrowthFunction::power(0.5, 0.1), 4.0),
                  std::domain_error);
  CHECK_THROWS(GrowthFunction::power(1.5));
  auto parsed = GrowthFunction::parse("pow:0.2,3");
  CHECK(parsed.theta == 0.2);
  CHECK(parsed.coef == 3.0);
  CHECK_THROWS(GrowthFunction::parse("weird:1"));
}
