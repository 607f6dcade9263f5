#include <array>
#include <cmath>

#include <boost/math/distributions/binomial.hpp>

#include "coalab/attacks.hpp"
#include "coalab/rng.hpp"
#include "doctest.h"

using namespace coalab;
using namespace coalab::attacks;

TEST_CASE("confirmation counts for the worked instances") {
  CHECK(min_safe_confirmations_density(100, 10, 0.7, 20) == 42);
  CHECK(wait_seconds(42, 300) == 12600);
  CHECK(min_safe_confirmations_observed(100, 10, 10.0 / 14, 3) == 17);
  CHECK(min_safe_confirmations_observed(100, 10, 0.7, 20) == 42);
  CHECK(min_safe_confirmations_observed(100, 10, 0.7, 19) == 41);
  CHECK_THROWS(min_safe_confirmations_density(100, 10, 0.5, 20));
  CHECK_THROWS(min_safe_confirmations_observed(100, 0, 0.7, 3));
}

TEST_CASE("property: closed-form S equals a brute-force scan and is minimal") {
  Rng rng(12);
  for (int i = 0; i < 3000; ++i) {
    const double v = rng.uniform(0, 1000);
    const double eps = rng.uniform(0.1, 50);
    const double rho = rng.uniform(0.05, 1.0);
    const double off = std::floor(rng.uniform(0, 40));
    const auto s = min_safe_confirmations_observed(v, eps, rho, off);
    REQUIRE(s == min_safe_confirmations_scan(v, eps, rho, off));
    CHECK(confirmation_inequality(v, eps, rho, off, s));
    if (s > 0) CHECK_FALSE(confirmation_inequality(v, eps, rho, off, s - 1));
  }
}

TEST_CASE("delta is the largest empty-minus-full excess of a suffix") {
  // Slots before B0, oldest first: produced, empty, empty, produced, empty, empty.
  const std::array<bool, 6> slots{true, false, false, true, false, false};
  CHECK(measure_delta(slots) == 3);
  CHECK(delta_segment_length(slots) == 5);
  const std::array<bool, 2> full{true, true};
  CHECK(measure_delta(full) == 0);
  const std::array<bool, 4> after{true, true, false, true};
  CHECK(observed_density(after) == 0.75);
  CHECK_THROWS(observed_density(std::span<const bool>{}));
}

TEST_CASE("takeover exponent and the exact binomial tail") {
  CHECK(takeover_log_bound(459, 0.1, 0.2) == doctest::Approx(371.0).epsilon(0.003));
  CHECK(takeover_q_hat(0.1, 0.2) == doctest::Approx(1 / 0.72 - 1));
  CHECK_THROWS(takeover_log_bound(10, 0.5, 0.2));
  // At the headline point the exact tail is below e^-371 as well.
  {
    const boost::math::binomial_distribution<> bin(std::ceil((2 + takeover_q_hat(0.1, 0.2)) * 459 - 1e-9), 0.1);
    CHECK(std::log(boost::math::cdf(boost::math::complement(bin, 459.0))) < -takeover_log_bound(459, 0.1, 0.2));
  }
  // The general form dominates the exact tail across a grid; the d^2/3 form
  // only where the deviation is moderate, and fails for p = 0.05.
  for (unsigned ell : {10U, 20U, 50U, 100U}) {
    for (double p : {0.05, 0.1, 0.2, 0.3}) {
      for (double q : {0.0, 0.1, 0.2}) {
        const double qh = takeover_q_hat(p, q);
        if ((2 + qh) * p >= 1) continue;
        const auto n = static_cast<unsigned>(std::ceil((2 + qh) * ell - 1e-9));
        const boost::math::binomial_distribution<> bin(n, p);
        const double tail = boost::math::cdf(boost::math::complement(bin, ell));
        CHECK(tail <= std::exp(-takeover_log_bound_any_deviation(ell, p, q)) * (1 + 1e-9));
        const bool narrow_ok = tail <= std::exp(-takeover_log_bound(ell, p, q)) * (1 + 1e-9);
        CHECK(narrow_ok == (p > 0.05));
      }
    }
  }
}

TEST_CASE("takeover Monte Carlo agrees with the exact tail") {
  const auto mc = takeover_monte_carlo(20, 0.3, 0.0, 200000, 2);
  const boost::math::binomial_distribution<> bin(static_cast<double>(mc.n), 0.3);
  const double exact = boost::math::cdf(boost::math::complement(bin, 20.0));
  CHECK(std::abs(mc.empirical - exact) < 4 * std::sqrt(exact * (1 - exact) / 200000));
  CHECK(mc.empirical <= mc.bound);
}

TEST_CASE("bribe acceptance rule") {
  CHECK(bribe_acceptance_threshold(10, 0, 0.5, false) == doctest::Approx(10));
  CHECK(accepts_bribe(10.5, 10, 0, 0.5, false));
  CHECK_FALSE(accepts_bribe(9.5, 10, 0, 0.5, false));
  CHECK(accepts_bribe(6, 10, 5, 0.5, false));  // a free colluder's share counts
  CHECK(accepts_bribe(0.01, 10, 0, 0.01, true));
  CHECK(bribe_acceptance_threshold(10, 0, 0.5, true) == 0);
}

TEST_CASE("bribery: deposits defeat it under CoA, not under nothing-at-stake") {
  BribeScenario s;
  s.bribe = 5;  // below the fee a creator forfeits
  s.seed = 4;
  const auto coa = simulate_bribe_attack(s);
  CHECK_FALSE(coa.success);
  CHECK(coa.bribed == 0);
  s.ppcoin_rules = true;
  const auto ppc = simulate_bribe_attack(s);
  CHECK(ppc.success);
  CHECK(ppc.bribed > 0);
}
