// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <vector>

#include "simisac/rng.hpp"
#include "simisac/scenario.hpp"
#include "simisac/types.hpp"

namespace simisac {

// Spatial correlation of the output-layer atoms under isotropic scattering:
// entry (m, m~) = sinc(2 r / lambda) with normalized sinc. The sinc kernel is
// numerically rank-deficient, so sampling goes through the eigendecomposition
// with negative eigenvalues clipped at zero (Cholesky would fail).
struct CorrelationMatrix {
  rmat r;               // M x M, symmetric, unit diagonal
  rmat evecs;           // eigenvectors
  rvec evals;           // eigenvalues clipped at 0
  double clipped_mass;  // total negative mass removed by clipping

  rmat sqrt_factor() const;  // E * sqrt(Lambda); h = sqrt(upsilon) * factor * g
};

double normalized_sinc(double x);

CorrelationMatrix build_correlation(const Eigen::Matrix3Xd& output_layer_atoms, double lambda);

// upsilon = (lambda / (4 pi * 1m))^2 * (d / 1m)^{-alpha}
double path_loss(double distance, double lambda, double alpha);

// One slot's channels: user-by-RB complex vectors from the SIM output layer,
// h ~ CN(0, upsilon * R). Immutable once drawn.
struct ChannelSet {
  std::vector<std::vector<cvec>> h_embb;   // [user][rb], length-M vectors
  std::vector<std::vector<cvec>> h_urllc;  // [user][rb]
  rvec pathloss_embb;
  rvec pathloss_urllc;
};

ChannelSet sample_channels(Rng& rng, const CorrelationMatrix& corr, const rvec& pathloss_embb,
                           const rvec& pathloss_urllc, int num_rbs);

// Direct N-antenna channels for the configuration without a metasurface:
// i.i.d. CN(0, upsilon I_N) per (user, rb).
ChannelSet sample_direct_channels(Rng& rng, int num_antennas, const rvec& pathloss_embb,
                                  const rvec& pathloss_urllc, int num_rbs);

}  // namespace simisac
