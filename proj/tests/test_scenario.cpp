// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include <doctest.h>

#include <sstream>

#include "simisac/scenario.hpp"

using namespace simisac;

TEST_CASE("default configuration is valid") {
  ScenarioConfig cfg = default_config();
  CHECK(cfg.num_layers == 3);
  CHECK(cfg.atoms_per_layer() == 36);
  CHECK(cfg.num_rbs == 25);
  CHECK(cfg.num_embb == 4);
  CHECK(cfg.num_urllc == 4);
  CHECK(cfg.decode_err == doctest::Approx(1e-5));
  CHECK(cfg.reliability == doctest::Approx(0.99999));
  CHECK(cfg.noise_power == doctest::Approx(dbm_to_watt(-95.0)));
  CHECK(cfg.p_max == doctest::Approx(5.0));
  CHECK(cfg.aoi_max[0] == 1);
  CHECK(cfg.aoi_max[3] == 4);
  CHECK(validate_config(cfg).empty());
}

TEST_CASE("validation lists violated invariants") {
  ScenarioConfig cfg = default_config();
  cfg.mx = 1;
  cfg.mz = 2;  // M = 2 < N = 4
  auto v = validate_config(cfg);
  bool found = false;
  for (const auto& msg : v) found = found || msg.find("M >= N") != std::string::npos;
  CHECK(found);

  ScenarioConfig cfg2 = default_config();
  cfg2.decode_err = 0.0;
  auto v2 = validate_config(cfg2);
  found = false;
  for (const auto& msg : v2) found = found || msg.find("decode_err") != std::string::npos;
  CHECK(found);
}

TEST_CASE("blocklength derives from the transmission duration") {
  ScenarioConfig cfg = default_config();
  // floor(180e3 * 5e-4 / (2*7)) = floor(6.43)
  CHECK(cfg.blocklength_symbols() == 6);
  cfg.blocklength = 64;
  CHECK(cfg.blocklength_symbols() == 64);
}

TEST_CASE("geometry is a pure function of config and seed") {
  ScenarioConfig cfg = default_config();
  Rng a(42), b(42);
  Geometry g1 = build_geometry(cfg, a);
  Geometry g2 = build_geometry(cfg, b);
  CHECK(g1.antenna_positions == g2.antenna_positions);
  REQUIRE(g1.users.size() == g2.users.size());
  for (size_t i = 0; i < g1.users.size(); ++i) {
    CHECK(g1.users[i].distance == g2.users[i].distance);
    CHECK(g1.users[i].azimuth == g2.users[i].azimuth);
    CHECK(g1.users[i].elevation == g2.users[i].elevation);
  }
  for (int l = 0; l < cfg.num_layers; ++l)
    CHECK(g1.atom_positions[static_cast<size_t>(l)] == g2.atom_positions[static_cast<size_t>(l)]);
}

TEST_CASE("atom grid spans and layer spacing") {
  ScenarioConfig cfg = default_config();  // mx = mz = 6, thickness 5 lambda, 3 layers
  Rng rng(1);
  Geometry g = build_geometry(cfg, rng);
  const double lam = cfg.wavelength();

  double maxdist = 0.0;
  const auto& layer = g.atom_positions[0];
  for (int a = 0; a < layer.cols(); ++a)
    for (int b = a + 1; b < layer.cols(); ++b)
      maxdist = std::max(maxdist, (layer.col(a) - layer.col(b)).norm());
  CHECK(maxdist == doctest::Approx(lam / 2.0 * std::sqrt(50.0)).epsilon(1e-12));

  const double spacing = g.atom_positions[1].col(0).y() - g.atom_positions[0].col(0).y();
  CHECK(spacing == doctest::Approx(5.0 * lam / 3.0).epsilon(1e-12));
}

TEST_CASE("users are drawn in the documented ranges") {
  ScenarioConfig cfg = default_config();
  Rng rng(7);
  Geometry g = build_geometry(cfg, rng);
  for (const auto& u : g.users) {
    CHECK(u.distance >= 5.0);
    CHECK(u.distance <= 50.0);
    CHECK(u.azimuth > -kPi / 2);
    CHECK(u.azimuth < kPi / 2);
    CHECK(u.elevation == doctest::Approx(kPi / 2 + std::atan(cfg.bs_height / u.distance)));
    CHECK(u.elevation < kPi);
  }
}

TEST_CASE("no coincident elements between adjacent planes") {
  ScenarioConfig cfg = default_config();
  Rng rng(3);
  Geometry g = build_geometry(cfg, rng);
  double dmin = 1e300;
  for (int n = 0; n < g.antenna_positions.cols(); ++n)
    for (int m = 0; m < g.atom_positions[0].cols(); ++m)
      dmin = std::min(dmin, (g.antenna_positions.col(n) - g.atom_positions[0].col(m)).norm());
  CHECK(dmin > 0.0);
}

TEST_CASE("config files parse with comments, units, and broadcasts") {
  std::istringstream in(
      "# comment\n"
      "num_embb = 2\n"
      "num_urllc = 3\n"
      "noise_power = -95   # dBm\n"
      "p_max = 36.989700043360187\n"
      "r_min = 2e6\n"
      "t_max = 1e-3,2e-3,3e-3\n"
      "aoi_max = 2\n");
  ScenarioConfig cfg = load_config(in);
  CHECK(cfg.num_embb == 2);
  CHECK(cfg.noise_power == doctest::Approx(3.1622776601683794e-13).epsilon(1e-12));
  CHECK(cfg.p_max == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(cfg.r_min.size() == 2);
  CHECK(cfg.r_min[1] == doctest::Approx(2e6));
  CHECK(cfg.t_max.size() == 3);
  CHECK(cfg.t_max[2] == doctest::Approx(3e-3));
  CHECK(cfg.aoi_max.size() == 3);
  CHECK(cfg.aoi_max[1] == 2);
}

TEST_CASE("config rejects unknown keys and malformed lines") {
  std::istringstream bad1("frobnicate = 3\n");
  CHECK_THROWS_AS(load_config(bad1), std::invalid_argument);
  std::istringstream bad2("num_rbs\n");
  CHECK_THROWS_AS(load_config(bad2), std::invalid_argument);
}

TEST_CASE("serialize and reload preserves the configuration hash") {
  ScenarioConfig cfg = default_config();
  cfg.num_rbs = 9;
  cfg.lyapunov_v = 0.25;
  std::istringstream round(serialize_config(cfg));
  ScenarioConfig back = load_config(round);
  CHECK(config_hash(back) == config_hash(cfg));
}
