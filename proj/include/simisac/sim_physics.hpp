// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <vector>

#include "simisac/rng.hpp"
#include "simisac/scenario.hpp"
#include "simisac/types.hpp"

namespace simisac {

// Fixed diffraction couplings between consecutive layers. psi[0] maps the
// antenna array to the first layer (M x N); psi[l] for l >= 1 maps layer l to
// layer l+1 (M x M). These depend only on geometry and are reused everywhere.
struct PropagationMatrices {
  std::vector<cmat> psi;
  int num_layers() const { return static_cast<int>(psi.size()); }
};

// Per-atom phase shifts theta in [0, 2pi), one row per layer. The transmission
// coefficients e^{j theta} are unit-modulus by construction.
struct SimPhases {
  rmat theta;  // L x M

  int num_layers() const { return static_cast<int>(theta.rows()); }
  int atoms() const { return static_cast<int>(theta.cols()); }
  cvec coeffs(int layer) const;           // e^{j theta} for one layer, length M
  void wrap();                            // map all angles into [0, 2pi)
};

SimPhases zero_phases(int layers, int atoms);
SimPhases random_phases(int layers, int atoms, Rng& rng);

// Scalar transmission coefficient between two elements at distance r with
// incidence angle chi from the source-layer normal:
//   (A cos(chi) / r) * (1/(2 pi r) - j/lambda) * e^{j 2 pi r / lambda}
cplx rs_coefficient(double r, double chi, double lambda, double area);

PropagationMatrices build_propagation(const Geometry& geom, const ScenarioConfig& cfg);

// Cascaded wave-domain beamforming matrix (M x N). Accumulated right-to-left
// so the working matrix stays M x N.
cmat assemble_transfer(const SimPhases& phases, const PropagationMatrices& prop);

// Planar-array steering vector, unit norm, x-major Kronecker layout:
// a[ix*mz+iz] = e^{-j pi ix sin(theta) sin(phi)} * e^{-j pi iz cos(theta)} / sqrt(mx*mz)
cvec steering_vector(double theta, double phi, int mx, int mz);

// Effective transmit covariance of RB `rb`: sum over URLLC users of
// p * theta_col * theta_col^H. Powers must be zero on inactive entries.
// Hermitian-symmetrized to keep downstream gains real.
cmat effective_covariance(const rmat& p_urllc, const std::vector<int>& user_columns,
                          const cmat& transfer, int rb);

// a^H Sigma a; throws if the imaginary residual exceeds 1e-9 * ||Sigma||.
double beampattern_gain(const cmat& sigma, const cvec& steer);

// Debug dump: "rows cols" header, then row-major "re imag" pairs per line.
void dump_matrix_csv(const cmat& m, const std::string& path);

}  // namespace simisac
