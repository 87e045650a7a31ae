// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include "simisac/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace simisac {

double normalized_sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

rmat CorrelationMatrix::sqrt_factor() const {
  return evecs * evals.cwiseSqrt().asDiagonal();
}

CorrelationMatrix build_correlation(const Eigen::Matrix3Xd& atoms, double lambda) {
  const int m = static_cast<int>(atoms.cols());
  CorrelationMatrix out;
  out.r.resize(m, m);
  for (int a = 0; a < m; ++a) {
    out.r(a, a) = 1.0;
    for (int b = a + 1; b < m; ++b) {
      const double dist = (atoms.col(a) - atoms.col(b)).norm();
      const double v = normalized_sinc(2.0 * dist / lambda);
      out.r(a, b) = v;
      out.r(b, a) = v;
    }
  }
  Eigen::SelfAdjointEigenSolver<rmat> es(out.r);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("build_correlation: eigendecomposition failed");
  out.evecs = es.eigenvectors();
  out.evals = es.eigenvalues();
  out.clipped_mass = 0.0;
  for (int i = 0; i < out.evals.size(); ++i) {
    if (out.evals[i] < 0.0) {
      out.clipped_mass -= out.evals[i];
      out.evals[i] = 0.0;
    }
  }
  return out;
}

double path_loss(double distance, double lambda, double alpha) {
  if (distance <= 0.0) throw std::invalid_argument("path_loss: distance must be positive");
  const double c0 = lambda / (4.0 * kPi);
  return c0 * c0 * std::pow(distance, -alpha);
}

namespace {

std::vector<std::vector<cvec>> draw_group(Rng& rng, const rmat& factor, const rvec& pathloss,
                                          int num_rbs) {
  const int m = static_cast<int>(factor.rows());
  std::vector<std::vector<cvec>> h(static_cast<size_t>(pathloss.size()));
  for (int u = 0; u < pathloss.size(); ++u) {
    h[static_cast<size_t>(u)].reserve(static_cast<size_t>(num_rbs));
    const double amp = std::sqrt(pathloss[u]);
    for (int c = 0; c < num_rbs; ++c) {
      cvec g(m);
      for (int k = 0; k < m; ++k) g[k] = rng.cgaussian();
      cvec chan = amp * (factor * g);
      h[static_cast<size_t>(u)].push_back(std::move(chan));
    }
  }
  return h;
}

}  // namespace

ChannelSet sample_channels(Rng& rng, const CorrelationMatrix& corr, const rvec& pathloss_embb,
                           const rvec& pathloss_urllc, int num_rbs) {
  ChannelSet set;
  const rmat factor = corr.sqrt_factor();
  set.h_embb = draw_group(rng, factor, pathloss_embb, num_rbs);
  set.h_urllc = draw_group(rng, factor, pathloss_urllc, num_rbs);
  set.pathloss_embb = pathloss_embb;
  set.pathloss_urllc = pathloss_urllc;
  return set;
}

ChannelSet sample_direct_channels(Rng& rng, int num_antennas, const rvec& pathloss_embb,
                                  const rvec& pathloss_urllc, int num_rbs) {
  const rmat eye = rmat::Identity(num_antennas, num_antennas);
  ChannelSet set;
  set.h_embb = draw_group(rng, eye, pathloss_embb, num_rbs);
  set.h_urllc = draw_group(rng, eye, pathloss_urllc, num_rbs);
  set.pathloss_embb = pathloss_embb;
  set.pathloss_urllc = pathloss_urllc;
  return set;
}

}  // namespace simisac
