// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include <doctest.h>

#include <cmath>

#include "simisac/rates.hpp"
#include "simisac/rng.hpp"
#include "simisac/scenario.hpp"

using namespace simisac;

namespace {

// Bisection-only inverse of the Gaussian Q-function; independent of the
// Newton-polished implementation under test.
double qinv_bisect(double p) {
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(mid / std::sqrt(2.0)) > p) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("inverse Q-function") {
  CHECK(std::abs(qfunc_inv(0.5)) < 1e-12);
  for (double p : {1e-1, 1e-3, 1e-5}) {
    const double x = qfunc_inv(p);
    CHECK(std::abs(qfunc(x) - p) < 1e-12 * p);
    CHECK(x == doctest::Approx(qinv_bisect(p)).epsilon(1e-12));
  }
  // Independently computed reference.
  CHECK(qfunc_inv(1e-5) == doctest::Approx(4.2648907939228246).epsilon(1e-12));
  CHECK_THROWS_AS(qfunc_inv(0.0), std::invalid_argument);
  CHECK_THROWS_AS(qfunc_inv(1.0), std::invalid_argument);
}

TEST_CASE("Poisson quantile") {
  // Mass below one packet: quantile below e^{-mean} maps to zero.
  CHECK(poisson_icdf(0.5, 0.60) == 0);
  CHECK(poisson_icdf(0.5, 0.61) == 1);

  // Monotone in the quantile.
  Rng rng(2);
  for (int k = 0; k < 50; ++k) {
    const double mean = rng.uniform(0.05, 8.0);
    double g1 = rng.uniform(0.01, 0.99);
    double g2 = rng.uniform(0.01, 0.99);
    if (g1 > g2) std::swap(g1, g2);
    CHECK(poisson_icdf(mean, g1) <= poisson_icdf(mean, g2));
  }

  // Term-by-term summation oracle in long double.
  auto oracle = [](double mean, double q) {
    long double pmf = std::exp((long double)(-mean));
    long double cdf = pmf;
    int k = 0;
    while (cdf < (long double)q) {
      ++k;
      pmf *= mean / k;
      cdf += pmf;
    }
    return k;
  };
  CHECK(poisson_icdf(0.5, 0.99999) == 6);
  CHECK(poisson_icdf(0.5, 0.99999) == oracle(0.5, 0.99999));
  for (int k = 0; k < 20; ++k) {
    const double mean = rng.uniform(0.1, 5.0);
    const double q = rng.uniform(0.5, 0.999999);
    CHECK(poisson_icdf(mean, q) == oracle(mean, q));
  }
}

TEST_CASE("link SNR") {
  cvec h(2), col(2);
  h << cplx(1, 0), cplx(0, 0);
  col << cplx(1, 0), cplx(0, 0);
  CHECK(snr(h, col, 2.0, 2.0, 1) == doctest::Approx(1.0));
  CHECK(snr(h, col, 2.0, 2.0, 0) == 0.0);
  CHECK(snr(h, col, 4.0, 2.0, 1) == doctest::Approx(2.0 * snr(h, col, 2.0, 2.0, 1)));
}

TEST_CASE("short-blocklength rate") {
  CHECK(fbl_rate(0.0, 180e3, 7, 64, 1e-5) == 0.0);

  // Long-blocklength limit approaches the Shannon share.
  const double shannon = 180e3 / 7 * std::log2(11.0);
  CHECK(fbl_rate(10.0, 180e3, 7, 1 << 30, 1e-5) == doctest::Approx(shannon).epsilon(1e-4));

  // Independently computed reference at (snr 10, B 180 kHz, I 7, 64 symbols,
  // error 1e-5), cross-checked against the bisection inverse.
  const double r = fbl_rate(10.0, 180e3, 7, 64, 1e-5);
  CHECK(r == doctest::Approx(69179.516198912973).epsilon(1e-10));
  const double via_bisect =
      180e3 / 7.0 *
      (std::log2(11.0) - std::sqrt(1.0 / 64) * qinv_bisect(1e-5) * 1.4426950408889634);
  CHECK(r == doctest::Approx(via_bisect).epsilon(1e-10));

  SUBCASE("dominance and monotonicity") {
    Rng rng(4);
    for (int k = 0; k < 2000; ++k) {
      const double g = rng.uniform(0.0, 1000.0);
      const int tb = 1 + static_cast<int>(rng.uniform(0.0, 400.0));
      const double v = fbl_rate(g, 180e3, 7, tb, 1e-5);
      CHECK(v <= 180e3 / 7 * std::log2(1.0 + g) + 1e-9);
      CHECK(fbl_rate(g + 1.0, 180e3, 7, tb, 1e-5) >= v);
      CHECK(fbl_rate(g, 180e3, 7, tb + 8, 1e-5) >= v);
      // The unit-dispersion shortcut lower-bounds the exact-dispersion rate.
      const double exact = 180e3 / 7 *
                           std::max(0.0, std::log2(1.0 + g) -
                                             std::sqrt(channel_dispersion(g) / tb) *
                                                 qfunc_inv(1e-5) * 1.4426950408889634);
      CHECK(v <= exact + 1e-9);
    }
  }
}

TEST_CASE("punctured rate and recount") {
  CHECK(punctured_embb_rate(3.0, 180e3, 1.0) == doctest::Approx(180e3 * 2.0));
  CHECK(punctured_embb_rate(3.0, 180e3, 0.0) == 0.0);
  CHECK_THROWS_AS(punctured_embb_rate(3.0, 180e3, 1.5), std::invalid_argument);

  // Closed-form puncturing fraction equals an explicit recount for OFDMA-
  // feasible maps.
  Rng rng(6);
  for (int k = 0; k < 100; ++k) {
    const int uu = 1 + static_cast<int>(rng.uniform(0, 4));
    const int slots = 1 + static_cast<int>(rng.uniform(0, 7));
    imat beta = imat::Zero(uu, slots);
    for (int tau = 0; tau < slots; ++tau) {
      const int pick = static_cast<int>(rng.uniform(0, uu + 1));
      if (pick < uu) beta(pick, tau) = 1;
    }
    const int alpha = rng.uniform() < 0.5 ? 1 : 0;
    const double eta = puncture_fraction(alpha, beta);
    long count = 0;
    for (int j = 0; j < uu; ++j)
      for (int tau = 0; tau < slots; ++tau) count += alpha * beta(j, tau);
    CHECK(eta == doctest::Approx(1.0 - static_cast<double>(count) / slots).epsilon(1e-15));
    CHECK(eta >= 0.0);
    CHECK(eta <= 1.0);
  }
}

TEST_CASE("end-to-end delay") {
  CHECK(e2e_delay(256e3, 256.0, 1e-4) == doctest::Approx(1.1e-3).epsilon(1e-12));
  CHECK(e2e_delay(1e300, 256.0, 1e-4) == doctest::Approx(1e-4).epsilon(1e-9));
  CHECK(std::isinf(e2e_delay(0.0, 256.0, 1e-4)));

  // The delay bound holds exactly when the rate clears the equivalent floor.
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const double bits = rng.uniform(64.0, 2048.0);
    const double tmax = rng.uniform(5e-4, 5e-3);
    const double tcomp = rng.uniform(0.0, 4e-4);
    const double floor = delay_rate_floor(bits, tmax, tcomp);
    const double rate = rng.uniform(0.1, 2.0) * floor;
    const bool meets = e2e_delay(rate, bits, tcomp) <= tmax;
    CHECK(meets == (rate >= floor));
  }
}
