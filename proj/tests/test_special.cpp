#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "regenlab/special.hpp"

using namespace regenlab;

TEST_CASE("regularized gamma against closed forms") {
  // Q(1/2, x) = erfc(sqrt(x)), Q(1, x) = e^-x, Q(2, x) = e^-x (1 + x).
  for (double x : {0.1, 0.5, 1.0, 2.5, 7.0, 20.0}) {
    CHECK(special::gamma_q(0.5, x) == doctest::Approx(std::erfc(std::sqrt(x))).epsilon(1e-12));
    CHECK(special::gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-12));
    CHECK(special::gamma_q(2.0, x) == doctest::Approx(std::exp(-x) * (1.0 + x)).epsilon(1e-12));
    CHECK(special::gamma_p(3.7, x) + special::gamma_q(3.7, x) == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK(special::gamma_q(5.0, 0.0) == 1.0);
  CHECK(special::gamma_p(5.0, 0.0) == 0.0);
  CHECK_THROWS_AS(special::gamma_q(-1.0, 1.0), std::domain_error);
}

TEST_CASE("chi-square tails at textbook quantiles") {
  CHECK(special::chi_square_sf(3.841459, 1.0) == doctest::Approx(0.05).epsilon(1e-5));
  CHECK(special::chi_square_sf(5.991465, 2.0) == doctest::Approx(0.05).epsilon(1e-5));
  CHECK(special::chi_square_sf(18.30704, 10.0) == doctest::Approx(0.05).epsilon(1e-5));
  CHECK(special::chi_square_sf(0.0, 4.0) == 1.0);
}

TEST_CASE("normal cdf") {
  CHECK(special::normal_cdf(0.0) == doctest::Approx(0.5));
  CHECK(special::normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
  CHECK(special::normal_cdf(-1.959964) == doctest::Approx(0.025).epsilon(1e-4));
}

TEST_CASE("log choose and poisson pmf") {
  CHECK(special::log_choose(5, 2) == doctest::Approx(std::log(10.0)).epsilon(1e-12));
  CHECK(special::log_choose(10, 0) == doctest::Approx(0.0));
  double want = -2.0 + 3.0 * std::log(2.0) - std::log(6.0);
  CHECK(special::poisson_log_pmf(3, 2.0) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("poisson chernoff bound dominates the pmf tail") {
  for (double mu : {0.5, 2.0, 10.0}) {
    for (double r : {5.0, 20.0, 60.0}) {
      if (r <= mu) continue;
      double bound = special::poisson_upper_tail_log_bound(mu, r);
      // The bound must exceed the first tail term.
      double first = special::poisson_log_pmf(static_cast<long long>(r), mu);
      CHECK(bound >= first);
    }
  }
}
