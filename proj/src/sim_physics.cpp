// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include "simisac/sim_physics.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace simisac {

cvec SimPhases::coeffs(int layer) const {
  cvec out(theta.cols());
  for (int m = 0; m < theta.cols(); ++m) {
    out[m] = std::polar(1.0, theta(layer, m));
  }
  return out;
}

void SimPhases::wrap() {
  constexpr double two_pi = 2.0 * kPi;
  for (int l = 0; l < theta.rows(); ++l) {
    for (int m = 0; m < theta.cols(); ++m) {
      double a = std::fmod(theta(l, m), two_pi);
      if (a < 0) a += two_pi;
      theta(l, m) = a;
    }
  }
}

SimPhases zero_phases(int layers, int atoms) {
  SimPhases p;
  p.theta = rmat::Zero(layers, atoms);
  return p;
}

SimPhases random_phases(int layers, int atoms, Rng& rng) {
  SimPhases p;
  p.theta.resize(layers, atoms);
  for (int l = 0; l < layers; ++l)
    for (int m = 0; m < atoms; ++m) p.theta(l, m) = rng.uniform(0.0, 2.0 * kPi);
  return p;
}

cplx rs_coefficient(double r, double chi, double lambda, double area) {
  if (r <= 0.0) throw std::invalid_argument("rs_coefficient: distance must be positive");
  const double amp = area * std::cos(chi) / r;
  const cplx kernel(1.0 / (2.0 * kPi * r), -1.0 / lambda);
  return amp * kernel * std::polar(1.0, 2.0 * kPi * r / lambda);
}

PropagationMatrices build_propagation(const Geometry& geom, const ScenarioConfig& cfg) {
  PropagationMatrices prop;
  const double lam = cfg.wavelength();
  const double area = cfg.area();

  // Source layer normal is +y for the antenna plane and every metasurface.
  auto fill = [&](const Eigen::Matrix3Xd& src, const Eigen::Matrix3Xd& dst) {
    cmat psi(dst.cols(), src.cols());
    for (int col = 0; col < src.cols(); ++col) {
      for (int row = 0; row < dst.cols(); ++row) {
        const Eigen::Vector3d delta = dst.col(row) - src.col(col);
        const double r = delta.norm();
        const double chi = std::acos(delta.y() / r);
        psi(row, col) = rs_coefficient(r, chi, lam, area);
      }
    }
    return psi;
  };

  prop.psi.reserve(static_cast<size_t>(cfg.num_layers));
  prop.psi.push_back(fill(geom.antenna_positions, geom.atom_positions[0]));
  for (int l = 1; l < cfg.num_layers; ++l) {
    prop.psi.push_back(fill(geom.atom_positions[static_cast<size_t>(l - 1)],
                            geom.atom_positions[static_cast<size_t>(l)]));
  }
  return prop;
}

cmat assemble_transfer(const SimPhases& phases, const PropagationMatrices& prop) {
  const int layers = prop.num_layers();
  if (phases.num_layers() != layers)
    throw std::invalid_argument("assemble_transfer: layer count mismatch");
  if (phases.atoms() != prop.psi[0].rows())
    throw std::invalid_argument("assemble_transfer: atom count mismatch");

  cmat acc = prop.psi[0];
  acc = phases.coeffs(0).asDiagonal() * acc;
  for (int l = 1; l < layers; ++l) {
    acc = prop.psi[static_cast<size_t>(l)] * acc;
    acc = phases.coeffs(l).asDiagonal() * acc;
  }
  return acc;
}

cvec steering_vector(double theta, double phi, int mx, int mz) {
  if (!(theta > 0.0 && theta < kPi))
    throw std::invalid_argument("steering_vector: elevation out of (0, pi)");
  if (!(phi > -kPi / 2.0 && phi < kPi / 2.0))
    throw std::invalid_argument("steering_vector: azimuth out of (-pi/2, pi/2)");
  const double kx = kPi * std::sin(theta) * std::sin(phi);
  const double kz = kPi * std::cos(theta);
  cvec a(mx * mz);
  const double scale = 1.0 / std::sqrt(static_cast<double>(mx) * mz);
  for (int ix = 0; ix < mx; ++ix) {
    const cplx ax = std::polar(1.0, -kx * ix);
    for (int iz = 0; iz < mz; ++iz) {
      a[ix * mz + iz] = scale * ax * std::polar(1.0, -kz * iz);
    }
  }
  return a;
}

cmat effective_covariance(const rmat& p_urllc, const std::vector<int>& user_columns,
                          const cmat& transfer, int rb) {
  const int m = static_cast<int>(transfer.rows());
  cmat sigma = cmat::Zero(m, m);
  for (int j = 0; j < p_urllc.rows(); ++j) {
    const double p = p_urllc(j, rb);
    if (p < 0) throw std::invalid_argument("effective_covariance: negative power");
    if (p == 0.0) continue;
    const cvec col = transfer.col(user_columns[static_cast<size_t>(j)]);
    sigma.noalias() += p * (col * col.adjoint());
  }
  sigma = 0.5 * (sigma + sigma.adjoint().eval());  // suppress Hermitian drift
  return sigma;
}

double beampattern_gain(const cmat& sigma, const cvec& steer) {
  const cplx g = steer.dot(sigma * steer);
  const double scale = sigma.norm();
  if (std::abs(g.imag()) > 1e-9 * std::max(scale, 1e-300))
    throw std::runtime_error("beampattern_gain: non-Hermitian covariance");
  return g.real();
}

void dump_matrix_csv(const cmat& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write matrix dump: " + path);
  out << m.rows() << " " << m.cols() << "\n";
  out.precision(17);
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      if (c) out << ",";
      out << m(r, c).real() << " " << m(r, c).imag();
    }
    out << "\n";
  }
}

}  // namespace simisac
