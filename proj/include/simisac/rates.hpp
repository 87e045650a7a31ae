// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include "simisac/types.hpp"

namespace simisac {

// Gaussian Q-function and its inverse. qfunc_inv solves Q(x) = p to a
// relative residual below 1e-12.
double qfunc(double x);
double qfunc_inv(double p);

// Smallest k with Poisson CDF(mean, k) >= quantile.
int poisson_icdf(double mean, double quantile);

// active * |h^H col|^2 * power / noise
double snr(const cvec& h, const cvec& transfer_col, double power, double noise, int active);

// Dispersion penalty of the short-blocklength rate in bits/s/Hz:
// sqrt(1/blocklength) * Qinv(decode_err) * log2(e). The exact channel
// dispersion 1 - (1+snr)^-2 is available separately for bound checks.
double fbl_penalty(int blocklength, double decode_err);
double channel_dispersion(double snr_value);

// Short-blocklength achievable rate, clamped at zero:
// (bandwidth/minislots) * max(0, log2(1+snr) - fbl_penalty)
double fbl_rate(double snr_value, double bandwidth, int minislots, int blocklength,
                double decode_err);

// eta * bandwidth * log2(1 + snr)
double punctured_embb_rate(double snr_value, double bandwidth, double eta);

// Fraction of an eMBB RB left after puncturing: 1 - (alpha/I) * sum beta.
// beta_rb is U_u x I (URLLC allocation of this RB across the slot's
// mini-slots); callers must pass OFDMA-feasible maps (column sums <= 1).
double puncture_fraction(int alpha_ic, const imat& beta_rb);

// bits/rate + t_comp; +infinity when rate is zero.
double e2e_delay(double rate, double bits, double t_comp);

// Rate floor equivalent to the delay bound: bits / (t_max - t_comp).
double delay_rate_floor(double bits, double t_max, double t_comp);

}  // namespace simisac
