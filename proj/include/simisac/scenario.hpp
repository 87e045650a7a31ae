// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "simisac/rng.hpp"
#include "simisac/types.hpp"

namespace simisac {

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double watt) { return 10.0 * std::log10(watt) + 30.0; }
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSpeedOfLight = 299792458.0;

// All physical, traffic, QoS, and solver parameters. Internal units are
// linear SI (watts, Hz, meters, radians, bits/s); dBm and degrees appear only
// in the config-file layer.
struct ScenarioConfig {
  // Array and metasurface geometry
  int num_antennas = 4;   // N
  int num_layers = 3;     // L
  int mx = 6;             // meta-atoms along x per layer
  int mz = 6;             // meta-atoms along z per layer
  double sim_thickness = -1.0;  // m; < 0 means "5 wavelengths"
  double atom_area = -1.0;      // m^2; < 0 means "(wavelength/2)^2"
  double carrier_freq = 5e9;    // Hz
  double bs_height = 10.0;      // m

  // Spectrum and framing
  int num_rbs = 25;                        // C
  double rb_bandwidth = 180e3;             // B, Hz
  int num_slots = 6;                       // T
  int minislots_per_slot = 7;              // I
  double transmission_duration = 5e-4;     // s; sets blocklength unless given
  int blocklength = 0;                     // symbols; 0 means "derive"

  // Users and traffic
  int num_embb = 4;
  int num_urllc = 4;
  rvec r_min;         // bits/s, one per eMBB user
  rvec packet_bits;   // bits, one per URLLC user
  rvec arrival_rate;  // packets per mini-slot, one per URLLC user
  rvec t_max;         // s, E2E delay bound per URLLC user
  double t_comp_max = 1e-4;   // s
  double decode_err = 1e-5;   // URLLC decoding error target
  double reliability = 0.99999;

  // Radio
  double noise_power = dbm_to_watt(-95.0);  // W
  double pathloss_exponent = 3.5;
  double p_max = 5.0;  // W

  // Sensing
  ivec aoi_max;                                         // mini-slots per target
  double beampattern_threshold = dbm_to_watt(-25.0);    // linear

  // Solver knobs (values not fixed by the physical model; see README)
  double lyapunov_v = 1.0;
  double penalty = 10.0;     // rate-floor / beampattern penalty weight
  double pga_step = 0.1;     // initial max per-coordinate phase move, rad
  int pga_iters = 60;
  double probe_power = 2.0;  // W; reference power for pricing inactive RBs
  int j_max = 15;            // Dinkelbach iterations
  int n_max = 6;             // alternating-optimization cycles
  double eps1 = 1.0;         // inner loop tolerance, bits/s
  double eps2 = 1.0;         // Dinkelbach tolerance, bits/s/W
  double power_reserve = 0.3;  // fraction of p_max withheld from the slot solve

  std::uint64_t rng_seed = 1;

  int atoms_per_layer() const { return mx * mz; }
  double wavelength() const { return kSpeedOfLight / carrier_freq; }
  double thickness() const { return sim_thickness > 0 ? sim_thickness : 5.0 * wavelength(); }
  double layer_spacing() const { return thickness() / num_layers; }
  double area() const {
    const double half = wavelength() / 2.0;
    return atom_area > 0 ? atom_area : half * half;
  }
  int blocklength_symbols() const {
    if (blocklength > 0) return blocklength;
    return static_cast<int>(std::floor(rb_bandwidth * transmission_duration /
                                       (2.0 * minislots_per_slot)));
  }

  // Fills the per-user vectors with defaults where they were left empty.
  void apply_user_defaults();
};

ScenarioConfig default_config();

// Returns every violated invariant with a reason; empty list iff usable.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

enum class ServiceClass { embb, urllc };

struct UserRecord {
  double distance;   // m, drawn uniform on [5, 50]
  double azimuth;    // rad, in (-pi/2, pi/2)
  double elevation;  // rad, in (0, pi); below the array plane
  ServiceClass svc;
};

struct Geometry {
  Eigen::Matrix3Xd antenna_positions;              // 3 x N, ULA on the x axis
  std::vector<Eigen::Matrix3Xd> atom_positions;    // per layer, 3 x M
  std::vector<UserRecord> users;                   // eMBB users first, then URLLC

  const UserRecord& embb_user(int i) const { return users[static_cast<size_t>(i)]; }
  const UserRecord& urllc_user(int i) const { return users[num_embb + static_cast<size_t>(i)]; }
  size_t num_embb = 0;
};

// Pure function of (config, rng state): same seed, same geometry.
Geometry build_geometry(const ScenarioConfig& cfg, Rng& rng);

// Flat key=value config file; '#' starts a comment. Angles are degrees and
// powers are dBm in the file, converted here. Per-user keys accept a single
// value (broadcast) or a comma-separated list.
ScenarioConfig load_config(std::istream& in);
ScenarioConfig load_config_file(const std::string& path);
std::string serialize_config(const ScenarioConfig& cfg);

// FNV-1a hash of the canonical serialization; used by run manifests.
std::uint64_t config_hash(const ScenarioConfig& cfg);

// Applies "key=value" (file-format units) to an existing config; used by
// sweeps. Throws std::invalid_argument for unknown keys.
void set_config_key(ScenarioConfig& cfg, const std::string& key, const std::string& value);

}  // namespace simisac
