// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include <doctest.h>

#include <fstream>

#include "simisac/sim_physics.hpp"

using namespace simisac;

namespace {
ScenarioConfig small_cfg() {
  ScenarioConfig cfg = default_config();
  cfg.num_antennas = 2;
  cfg.num_layers = 3;
  cfg.mx = 3;
  cfg.mz = 3;
  cfg.apply_user_defaults();
  return cfg;
}
}  // namespace

TEST_CASE("transmission coefficient matches the scalar formula") {
  const double lam = 0.06;
  const double area = (lam / 2) * (lam / 2);

  // Normal incidence at the layer spacing used by a 3-layer stack of
  // thickness 5 lambda; reference value evaluated independently in
  // arbitrary-precision arithmetic.
  cplx v = rs_coefficient(5.0 * lam / 3.0, 0.0, lam, area);
  CHECK(v.real() == doctest::Approx(-0.13706578300680109).epsilon(1e-12));
  CHECK(v.imag() == doctest::Approx(0.062595099853009679).epsilon(1e-12));

  // Grazing incidence extinguishes the coefficient.
  cplx g = rs_coefficient(0.1, kPi / 2.0, lam, area);
  CHECK(std::abs(g) < 1e-12 * std::abs(v));

  // Modulus identity for random arguments.
  Rng rng(11);
  for (int k = 0; k < 50; ++k) {
    const double r = rng.uniform(0.01, 2.0);
    const double chi = rng.uniform(0.0, kPi / 2.0 * 0.99);
    const cplx c = rs_coefficient(r, chi, lam, area);
    const double expect = area * std::cos(chi) / r *
                          std::sqrt(1.0 / (4.0 * kPi * kPi * r * r) + 1.0 / (lam * lam));
    CHECK(std::abs(c) == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK_THROWS_AS(rs_coefficient(0.0, 0.0, lam, area), std::invalid_argument);
}

TEST_CASE("propagation matrices are deterministic and translation symmetric") {
  ScenarioConfig cfg = small_cfg();
  Rng r1(5), r2(5);
  Geometry g1 = build_geometry(cfg, r1);
  Geometry g2 = build_geometry(cfg, r2);
  PropagationMatrices p1 = build_propagation(g1, cfg);
  PropagationMatrices p2 = build_propagation(g2, cfg);
  REQUIRE(p1.num_layers() == 3);
  for (int l = 0; l < 3; ++l) CHECK(p1.psi[static_cast<size_t>(l)] == p2.psi[static_cast<size_t>(l)]);

  // Layer-to-layer couplings repeat when the grids are congruent and the
  // spacing uniform.
  CHECK(p1.psi[1].rows() == p1.psi[2].rows());
  const double diff = (p1.psi[1] - p1.psi[2]).norm() / p1.psi[1].norm();
  CHECK(diff < 1e-12);

  // Spot-check entries against the scalar formula.
  const double lam = cfg.wavelength();
  for (auto [m, n] : {std::pair{0, 0}, std::pair{4, 1}, std::pair{8, 0}}) {
    const Eigen::Vector3d delta = g1.atom_positions[0].col(m) - g1.antenna_positions.col(n);
    const double r = delta.norm();
    const double chi = std::acos(delta.y() / r);
    const cplx expect = rs_coefficient(r, chi, lam, cfg.area());
    CHECK(std::abs(p1.psi[0](m, n) - expect) < 1e-15);
  }
}

TEST_CASE("transfer matrix assembly") {
  ScenarioConfig cfg = small_cfg();
  Rng rng(9);
  Geometry geom = build_geometry(cfg, rng);
  PropagationMatrices prop = build_propagation(geom, cfg);

  SUBCASE("identity phases on a single layer reproduce the coupling matrix") {
    PropagationMatrices one;
    one.psi.push_back(prop.psi[0]);
    SimPhases zero = zero_phases(1, cfg.atoms_per_layer());
    cmat theta = assemble_transfer(zero, one);
    CHECK((theta - prop.psi[0]).norm() == 0.0);
  }

  SUBCASE("common phase offset rotates the matrix without changing magnitudes") {
    SimPhases ph = random_phases(cfg.num_layers, cfg.atoms_per_layer(), rng);
    cmat base = assemble_transfer(ph, prop);
    SimPhases shifted = ph;
    const double c = 0.77;
    shifted.theta.row(0).array() += c;
    cmat rot = assemble_transfer(shifted, prop);
    CHECK((rot - std::polar(1.0, c) * base).norm() < 1e-12 * base.norm());
    CHECK((rot.cwiseAbs() - base.cwiseAbs()).norm() < 1e-12 * base.norm());
  }

  SUBCASE("two-layer product matches explicit scalar arithmetic") {
    PropagationMatrices tiny;
    tiny.psi.resize(2);
    tiny.psi[0].resize(2, 1);
    tiny.psi[0] << cplx(0.3, -0.1), cplx(-0.2, 0.4);
    tiny.psi[1].resize(2, 2);
    tiny.psi[1] << cplx(0.5, 0.0), cplx(0.1, 0.2), cplx(-0.3, 0.1), cplx(0.0, -0.6);
    SimPhases ph;
    ph.theta.resize(2, 2);
    ph.theta << 0.4, 1.3, 2.1, 5.0;

    const cplx f10 = std::polar(1.0, 0.4), f11 = std::polar(1.0, 1.3);
    const cplx f20 = std::polar(1.0, 2.1), f21 = std::polar(1.0, 5.0);
    const cplx a0 = f10 * tiny.psi[0](0, 0);
    const cplx a1 = f11 * tiny.psi[0](1, 0);
    const cplx out0 = f20 * (tiny.psi[1](0, 0) * a0 + tiny.psi[1](0, 1) * a1);
    const cplx out1 = f21 * (tiny.psi[1](1, 0) * a0 + tiny.psi[1](1, 1) * a1);

    cmat theta = assemble_transfer(ph, tiny);
    CHECK(std::abs(theta(0, 0) - out0) < 1e-15);
    CHECK(std::abs(theta(1, 0) - out1) < 1e-15);
  }

  SUBCASE("shape mismatches are rejected") {
    SimPhases wrong = zero_phases(cfg.num_layers - 1, cfg.atoms_per_layer());
    CHECK_THROWS_AS(assemble_transfer(wrong, prop), std::invalid_argument);
  }
}

TEST_CASE("steering vectors") {
  Rng rng(17);
  for (int k = 0; k < 20; ++k) {
    const double th = rng.uniform(0.05, kPi - 0.05);
    const double ph = rng.uniform(-kPi / 2 * 0.99, kPi / 2 * 0.99);
    cvec a = steering_vector(th, ph, 4, 3);
    CHECK(std::abs(a.squaredNorm() - 1.0) < 1e-12);
  }

  // Boresight: all entries equal.
  cvec b = steering_vector(kPi / 2, 0.0, 3, 3);
  for (int i = 0; i < b.size(); ++i) CHECK(std::abs(b[i] - b[0]) < 1e-12);

  // Direct evaluation of the two Kronecker factors (independently computed).
  cvec s = steering_vector(kPi / 3, kPi / 6, 2, 2);
  CHECK(s[0].real() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s[0].imag() == doctest::Approx(0.0));
  CHECK(s[1].real() == doctest::Approx(0.0));
  CHECK(s[1].imag() == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(s[2].real() == doctest::Approx(0.10444843338809704).epsilon(1e-12));
  CHECK(s[2].imag() == doctest::Approx(-0.48896883823283898).epsilon(1e-12));
  CHECK(s[3].real() == doctest::Approx(-0.48896883823283898).epsilon(1e-12));
  CHECK(s[3].imag() == doctest::Approx(-0.10444843338809704).epsilon(1e-12));

  CHECK_THROWS_AS(steering_vector(0.0, 0.0, 2, 2), std::invalid_argument);
  CHECK_THROWS_AS(steering_vector(kPi / 2, kPi, 2, 2), std::invalid_argument);
}

TEST_CASE("effective covariance and beampattern gain") {
  ScenarioConfig cfg = small_cfg();
  Rng rng(23);
  Geometry geom = build_geometry(cfg, rng);
  PropagationMatrices prop = build_propagation(geom, cfg);
  SimPhases ph = random_phases(cfg.num_layers, cfg.atoms_per_layer(), rng);
  cmat theta = assemble_transfer(ph, prop);
  const int m = cfg.atoms_per_layer();
  std::vector<int> cols{0, 1};

  SUBCASE("zero powers give the zero matrix") {
    rmat p = rmat::Zero(2, 3);
    CHECK(effective_covariance(p, cols, theta, 1).norm() == 0.0);
  }

  SUBCASE("single user yields a rank-one outer product") {
    rmat p = rmat::Zero(2, 3);
    p(1, 2) = 1.0;
    cmat sigma = effective_covariance(p, cols, theta, 2);
    CHECK(std::abs(sigma.trace().real() - theta.col(1).squaredNorm()) <
          1e-12 * theta.col(1).squaredNorm());
    Eigen::JacobiSVD<cmat> svd(sigma);
    CHECK(svd.singularValues()[1] < 1e-12 * svd.singularValues()[0]);
  }

  SUBCASE("two users match a brute-force summation") {
    rmat p(2, 3);
    p << 0.4, 0.0, 1.2, 0.0, 0.7, 0.3;
    cmat sigma = effective_covariance(p, cols, theta, 2);
    cmat expect = cmat::Zero(m, m);
    for (int j = 0; j < 2; ++j) {
      const cvec col = theta.col(cols[static_cast<size_t>(j)]);
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) expect(a, b) += p(j, 2) * col[a] * std::conj(col[b]);
    }
    CHECK((sigma - expect).norm() < 1e-12 * expect.norm());
  }

  SUBCASE("gain identities") {
    cvec a = steering_vector(2.0, 0.3, cfg.mx, cfg.mz);
    CHECK(beampattern_gain(cmat::Zero(m, m), a) == 0.0);
    CHECK(beampattern_gain(cmat::Identity(m, m), a) == doctest::Approx(1.0).epsilon(1e-12));
    cvec v = cvec::Zero(m);
    for (int i = 0; i < m; ++i) v[i] = rng.cgaussian();
    cmat rank1 = v * v.adjoint();
    const cplx dot = a.dot(v);
    CHECK(beampattern_gain(rank1, a) == doctest::Approx(std::norm(dot)).epsilon(1e-10));
  }

  SUBCASE("gain is nonnegative for randomized covariances") {
    for (int k = 0; k < 20; ++k) {
      cmat b(m, m);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) b(i, j) = rng.cgaussian();
      cmat psd = b * b.adjoint();
      psd = 0.5 * (psd + psd.adjoint().eval());
      cvec a = steering_vector(rng.uniform(0.1, kPi - 0.1), rng.uniform(-1.5, 1.5), cfg.mx,
                               cfg.mz);
      CHECK(beampattern_gain(psd, a) >= -1e-9 * psd.norm());
    }
  }
}

TEST_CASE("matrix dump carries shape and full precision") {
  cmat m(2, 2);
  m << cplx(1.25, -0.5), cplx(0, 3), cplx(-2, 0), cplx(0.1234567890123456, 7);
  const std::string path = "/tmp/simisac_dump_test.csv";
  dump_matrix_csv(m, path);
  std::ifstream in(path);
  int rows = 0, cols = 0;
  in >> rows >> cols;
  CHECK(rows == 2);
  CHECK(cols == 2);
  double re = 0, im = 0;
  char comma;
  in >> re >> im;
  CHECK(re == 1.25);
  CHECK(im == -0.5);
  in >> comma >> re >> im;
  CHECK(re == 0.0);
  CHECK(im == 3.0);
}

TEST_CASE("phase coefficients stay on the unit circle") {
  Rng rng(31);
  SimPhases ph = random_phases(3, 16, rng);
  ph.theta.array() += 12.7;  // push angles outside [0, 2pi)
  ph.wrap();
  for (int l = 0; l < ph.num_layers(); ++l) {
    cvec c = ph.coeffs(l);
    for (int m = 0; m < c.size(); ++m) {
      CHECK(std::abs(std::abs(c[m]) - 1.0) < 1e-12);
      CHECK(ph.theta(l, m) >= 0.0);
      CHECK(ph.theta(l, m) < 2.0 * kPi);
    }
  }
}
