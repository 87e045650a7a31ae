// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include "simisac/rates.hpp"

#include "simisac/scenario.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace simisac {

namespace {
constexpr double kLog2E = 1.4426950408889634074;  // log2(e)
constexpr double kSqrt2 = 1.4142135623730950488;
}  // namespace

double qfunc(double x) { return 0.5 * std::erfc(x / kSqrt2); }

double qfunc_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("qfunc_inv: p must lie in (0,1)");
  // Bracket, bisect to a coarse root, then polish with Newton on Q(x) - p.
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (qfunc(mid) > p) {
      lo = mid;  // Q decreasing: Q(mid) > p means root is to the right
    } else {
      hi = mid;
    }
  }
  double x = 0.5 * (lo + hi);
  for (int i = 0; i < 8; ++i) {
    const double f = qfunc(x) - p;
    if (std::abs(f) <= 1e-13 * p) break;
    const double dens = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    if (dens <= 0.0) break;
    x += f / dens;  // Q'(x) = -density
  }
  return x;
}

int poisson_icdf(double mean, double quantile) {
  if (!(mean > 0.0)) throw std::invalid_argument("poisson_icdf: mean must be positive");
  if (!(quantile > 0.0 && quantile < 1.0))
    throw std::invalid_argument("poisson_icdf: quantile must lie in (0,1)");
  double pmf = std::exp(-mean);
  double cdf = pmf;
  int k = 0;
  while (cdf < quantile) {
    ++k;
    pmf *= mean / k;
    cdf += pmf;
    if (k > 1000000) throw std::runtime_error("poisson_icdf: failed to reach quantile");
  }
  return k;
}

double snr(const cvec& h, const cvec& transfer_col, double power, double noise, int active) {
  if (power < 0.0) throw std::invalid_argument("snr: power must be nonnegative");
  if (noise <= 0.0) throw std::invalid_argument("snr: noise must be positive");
  if (active == 0) return 0.0;
  const cplx e = h.dot(transfer_col);
  return std::norm(e) * power / noise;
}

double fbl_penalty(int blocklength, double decode_err) {
  if (blocklength < 1) throw std::invalid_argument("fbl_penalty: blocklength must be >= 1");
  return std::sqrt(1.0 / blocklength) * qfunc_inv(decode_err) * kLog2E;
}

double channel_dispersion(double snr_value) {
  const double t = 1.0 + snr_value;
  return 1.0 - 1.0 / (t * t);
}

double fbl_rate(double snr_value, double bandwidth, int minislots, int blocklength,
                double decode_err) {
  if (snr_value < 0.0) throw std::invalid_argument("fbl_rate: snr must be nonnegative");
  const double se = std::log2(1.0 + snr_value) - fbl_penalty(blocklength, decode_err);
  return (bandwidth / minislots) * std::max(0.0, se);
}

double punctured_embb_rate(double snr_value, double bandwidth, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0))
    throw std::invalid_argument("punctured_embb_rate: eta must lie in [0,1]");
  return eta * bandwidth * std::log2(1.0 + snr_value);
}

double puncture_fraction(int alpha_ic, const imat& beta_rb) {
  const int minislots = static_cast<int>(beta_rb.cols());
  long punctured = 0;
  for (int tau = 0; tau < minislots; ++tau) {
    for (int j = 0; j < beta_rb.rows(); ++j) punctured += beta_rb(j, tau);
  }
  return 1.0 - static_cast<double>(alpha_ic) * static_cast<double>(punctured) / minislots;
}

double e2e_delay(double rate, double bits, double t_comp) {
  if (rate <= 0.0) return std::numeric_limits<double>::infinity();
  return bits / rate + t_comp;
}

double delay_rate_floor(double bits, double t_max, double t_comp) {
  if (!(t_max > t_comp)) throw std::invalid_argument("delay_rate_floor: t_max must exceed t_comp");
  return bits / (t_max - t_comp);
}

}  // namespace simisac
