// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include "simisac/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace simisac {

namespace {

rvec broadcast(double v, int n) { return rvec::Constant(n, v); }

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  size_t b = s.find_last_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    size_t pos = 0;
    double v = std::stod(item, &pos);
    if (pos != item.size()) throw std::invalid_argument("bad numeric value: " + item);
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty value list");
  return out;
}

rvec to_vec(const std::vector<double>& v, int n, const std::string& key) {
  if (static_cast<int>(v.size()) == 1) return broadcast(v[0], n);
  if (static_cast<int>(v.size()) != n)
    throw std::invalid_argument(key + ": expected 1 or " + std::to_string(n) + " values");
  rvec out(n);
  for (int i = 0; i < n; ++i) out[i] = v[static_cast<size_t>(i)];
  return out;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void ScenarioConfig::apply_user_defaults() {
  if (r_min.size() != num_embb) r_min = broadcast(r_min.size() == 1 ? r_min[0] : 1e6, num_embb);
  if (packet_bits.size() != num_urllc)
    packet_bits = broadcast(packet_bits.size() == 1 ? packet_bits[0] : 256.0, num_urllc);
  if (arrival_rate.size() != num_urllc)
    arrival_rate = broadcast(arrival_rate.size() == 1 ? arrival_rate[0] : 0.5, num_urllc);
  if (t_max.size() != num_urllc)
    t_max = broadcast(t_max.size() == 1 ? t_max[0] : 1.5e-3, num_urllc);
  if (aoi_max.size() != num_urllc) {
    int start = aoi_max.size() == 1 ? aoi_max[0] : 1;
    aoi_max.resize(num_urllc);
    for (int i = 0; i < num_urllc; ++i) aoi_max[i] = start + i;
  }
}

ScenarioConfig default_config() {
  ScenarioConfig cfg;
  cfg.apply_user_defaults();
  return cfg;
}

std::vector<std::string> validate_config(const ScenarioConfig& cfg) {
  std::vector<std::string> v;
  auto req = [&v](bool ok, const std::string& msg) {
    if (!ok) v.push_back(msg);
  };
  req(cfg.num_antennas > 0, "num_antennas must be positive");
  req(cfg.num_layers > 0, "num_layers must be positive");
  req(cfg.mx > 0 && cfg.mz > 0, "mx and mz must be positive");
  req(cfg.atoms_per_layer() >= cfg.num_antennas, "M >= N required (atoms per layer vs antennas)");
  req(cfg.carrier_freq > 0, "carrier_freq must be positive");
  req(cfg.thickness() > 0, "sim_thickness must be positive");
  req(cfg.area() > 0, "atom_area must be positive");
  req(cfg.bs_height > 0, "bs_height must be positive");
  req(cfg.num_rbs > 0, "num_rbs must be positive");
  req(cfg.rb_bandwidth > 0, "rb_bandwidth must be positive");
  req(cfg.num_slots > 0, "num_slots must be positive");
  req(cfg.minislots_per_slot > 0, "minislots_per_slot must be positive");
  req(cfg.num_embb > 0, "num_embb must be positive");
  req(cfg.num_urllc > 0, "num_urllc must be positive");
  req(cfg.noise_power > 0, "noise_power must be positive");
  req(cfg.pathloss_exponent > 0, "pathloss_exponent must be positive");
  req(cfg.p_max > 0, "p_max must be positive");
  req(cfg.decode_err > 0 && cfg.decode_err < 1, "decode_err must lie in (0,1)");
  req(cfg.reliability > 0 && cfg.reliability < 1, "reliability must lie in (0,1)");
  req(cfg.t_comp_max >= 0, "t_comp_max must be nonnegative");
  req(cfg.blocklength_symbols() >= 1, "blocklength must be at least 1 symbol");
  req(cfg.beampattern_threshold > 0, "beampattern_threshold must be positive");
  req(cfg.lyapunov_v >= 0, "lyapunov_v must be nonnegative");
  req(cfg.penalty >= 0, "penalty must be nonnegative");
  req(cfg.pga_step > 0 && cfg.pga_iters >= 0, "pga_step must be positive, pga_iters nonnegative");
  req(cfg.probe_power > 0, "probe_power must be positive");
  req(cfg.j_max >= 1 && cfg.n_max >= 1, "j_max and n_max must be at least 1");
  req(cfg.eps1 > 0 && cfg.eps2 > 0, "eps1 and eps2 must be positive");
  req(cfg.power_reserve >= 0 && cfg.power_reserve < 1, "power_reserve must lie in [0,1)");

  if (cfg.r_min.size() == cfg.num_embb) {
    for (int i = 0; i < cfg.num_embb; ++i)
      req(cfg.r_min[i] >= 0, "r_min must be nonnegative (user " + std::to_string(i) + ")");
  } else {
    v.push_back("r_min must have one entry per eMBB user");
  }
  auto per_urllc = [&](const rvec& x, const std::string& name, bool strict) {
    if (x.size() != cfg.num_urllc) {
      v.push_back(name + " must have one entry per URLLC user");
      return;
    }
    for (int i = 0; i < cfg.num_urllc; ++i)
      req(strict ? x[i] > 0 : x[i] >= 0,
          name + " must be " + (strict ? "positive" : "nonnegative") + " (user " +
              std::to_string(i) + ")");
  };
  per_urllc(cfg.packet_bits, "packet_size", true);
  per_urllc(cfg.arrival_rate, "arrival_rate", false);
  per_urllc(cfg.t_max, "t_max", true);
  if (cfg.t_max.size() == cfg.num_urllc) {
    for (int i = 0; i < cfg.num_urllc; ++i)
      req(cfg.t_max[i] > cfg.t_comp_max,
          "t_max must exceed t_comp_max (user " + std::to_string(i) + ")");
  }
  if (cfg.aoi_max.size() == cfg.num_urllc) {
    for (int i = 0; i < cfg.num_urllc; ++i)
      req(cfg.aoi_max[i] >= 1, "aoi_max must be at least 1 (target " + std::to_string(i) + ")");
  } else {
    v.push_back("aoi_max must have one entry per target");
  }
  return v;
}

Geometry build_geometry(const ScenarioConfig& cfg, Rng& rng) {
  Geometry g;
  const double lam = cfg.wavelength();
  const double half = lam / 2.0;
  const int n = cfg.num_antennas;
  const int m = cfg.atoms_per_layer();

  // ULA on the x axis, centered at the origin; metasurface boresight is +y.
  g.antenna_positions.resize(3, n);
  for (int i = 0; i < n; ++i) {
    g.antenna_positions.col(i) << (i - (n - 1) / 2.0) * half, 0.0, 0.0;
  }

  const double d = cfg.layer_spacing();
  g.atom_positions.reserve(static_cast<size_t>(cfg.num_layers));
  for (int layer = 1; layer <= cfg.num_layers; ++layer) {
    Eigen::Matrix3Xd atoms(3, m);
    for (int ix = 0; ix < cfg.mx; ++ix) {
      for (int iz = 0; iz < cfg.mz; ++iz) {
        const int idx = ix * cfg.mz + iz;  // x-major, matching the steering Kronecker order
        atoms.col(idx) << (ix - (cfg.mx - 1) / 2.0) * half, layer * d,
            (iz - (cfg.mz - 1) / 2.0) * half;
      }
    }
    g.atom_positions.push_back(std::move(atoms));
  }

  g.num_embb = static_cast<size_t>(cfg.num_embb);
  auto draw_user = [&](ServiceClass svc) {
    UserRecord u;
    u.distance = rng.uniform(5.0, 50.0);
    u.azimuth = rng.uniform(-kPi / 2.0, kPi / 2.0);
    u.elevation = kPi / 2.0 + std::atan(cfg.bs_height / u.distance);
    u.svc = svc;
    return u;
  };
  for (int i = 0; i < cfg.num_embb; ++i) g.users.push_back(draw_user(ServiceClass::embb));
  for (int i = 0; i < cfg.num_urllc; ++i) g.users.push_back(draw_user(ServiceClass::urllc));
  return g;
}

namespace {

// Single point of truth for the file-format keys.
void apply_key(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  auto list = [&] { return parse_list(value); };
  auto scalar = [&] {
    auto v = parse_list(value);
    if (v.size() != 1) throw std::invalid_argument(key + ": expected a single value");
    return v[0];
  };
  auto integer = [&] { return static_cast<int>(std::llround(scalar())); };

  if (key == "num_antennas") cfg.num_antennas = integer();
  else if (key == "num_layers") cfg.num_layers = integer();
  else if (key == "mx") cfg.mx = integer();
  else if (key == "mz") cfg.mz = integer();
  else if (key == "sim_thickness") cfg.sim_thickness = scalar();
  else if (key == "atom_area") cfg.atom_area = scalar();
  else if (key == "carrier_freq") cfg.carrier_freq = scalar();
  else if (key == "bs_height") cfg.bs_height = scalar();
  else if (key == "num_rbs") cfg.num_rbs = integer();
  else if (key == "rb_bandwidth") cfg.rb_bandwidth = scalar();
  else if (key == "num_slots") cfg.num_slots = integer();
  else if (key == "minislots_per_slot") cfg.minislots_per_slot = integer();
  else if (key == "transmission_duration") cfg.transmission_duration = scalar();
  else if (key == "blocklength") cfg.blocklength = integer();
  else if (key == "num_embb") cfg.num_embb = integer();
  else if (key == "num_urllc") cfg.num_urllc = integer();
  else if (key == "r_min") cfg.r_min = to_vec(list(), cfg.num_embb, key);
  else if (key == "packet_size") cfg.packet_bits = to_vec(list(), cfg.num_urllc, key);
  else if (key == "arrival_rate") cfg.arrival_rate = to_vec(list(), cfg.num_urllc, key);
  else if (key == "t_max") cfg.t_max = to_vec(list(), cfg.num_urllc, key);
  else if (key == "t_comp_max") cfg.t_comp_max = scalar();
  else if (key == "decode_err") cfg.decode_err = scalar();
  else if (key == "reliability") cfg.reliability = scalar();
  else if (key == "noise_power") cfg.noise_power = dbm_to_watt(scalar());
  else if (key == "pathloss_exponent") cfg.pathloss_exponent = scalar();
  else if (key == "p_max") cfg.p_max = dbm_to_watt(scalar());
  else if (key == "aoi_max") {
    auto v = list();
    if (v.size() == 1) {
      cfg.aoi_max = ivec::Constant(cfg.num_urllc, static_cast<int>(std::llround(v[0])));
    } else {
      if (static_cast<int>(v.size()) != cfg.num_urllc)
        throw std::invalid_argument("aoi_max: expected 1 or num_urllc values");
      cfg.aoi_max.resize(cfg.num_urllc);
      for (int i = 0; i < cfg.num_urllc; ++i)
        cfg.aoi_max[i] = static_cast<int>(std::llround(v[static_cast<size_t>(i)]));
    }
  } else if (key == "beampattern_threshold") cfg.beampattern_threshold = dbm_to_watt(scalar());
  else if (key == "lyapunov_v") cfg.lyapunov_v = scalar();
  else if (key == "penalty") cfg.penalty = scalar();
  else if (key == "pga_step") cfg.pga_step = scalar();
  else if (key == "pga_iters") cfg.pga_iters = integer();
  else if (key == "probe_power") cfg.probe_power = scalar();
  else if (key == "j_max") cfg.j_max = integer();
  else if (key == "n_max") cfg.n_max = integer();
  else if (key == "eps1") cfg.eps1 = scalar();
  else if (key == "eps2") cfg.eps2 = scalar();
  else if (key == "power_reserve") cfg.power_reserve = scalar();
  else if (key == "rng_seed") cfg.rng_seed = static_cast<std::uint64_t>(std::llround(scalar()));
  else throw std::invalid_argument("unknown config key: " + key);
}

}  // namespace

void set_config_key(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  apply_key(cfg, key, value);
  cfg.apply_user_defaults();
}

ScenarioConfig load_config(std::istream& in) {
  ScenarioConfig cfg;
  std::string line;
  int lineno = 0;
  // User-count keys must be applied before per-user lists; collect then apply
  // in two passes.
  std::vector<std::pair<std::string, std::string>> kv;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    kv.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  auto is_count = [](const std::string& k) { return k == "num_embb" || k == "num_urllc"; };
  for (const auto& [k, val] : kv)
    if (is_count(k)) apply_key(cfg, k, val);
  for (const auto& [k, val] : kv)
    if (!is_count(k)) apply_key(cfg, k, val);
  cfg.apply_user_defaults();
  return cfg;
}

ScenarioConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  return load_config(in);
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::ostringstream os;
  auto put = [&os](const std::string& k, const std::string& v) { os << k << " = " << v << "\n"; };
  auto put_vec = [&](const std::string& k, const rvec& v) {
    std::string s;
    for (int i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
    put(k, s);
  };
  put("num_antennas", std::to_string(cfg.num_antennas));
  put("num_layers", std::to_string(cfg.num_layers));
  put("mx", std::to_string(cfg.mx));
  put("mz", std::to_string(cfg.mz));
  put("sim_thickness", fmt(cfg.thickness()));
  put("atom_area", fmt(cfg.area()));
  put("carrier_freq", fmt(cfg.carrier_freq));
  put("bs_height", fmt(cfg.bs_height));
  put("num_rbs", std::to_string(cfg.num_rbs));
  put("rb_bandwidth", fmt(cfg.rb_bandwidth));
  put("num_slots", std::to_string(cfg.num_slots));
  put("minislots_per_slot", std::to_string(cfg.minislots_per_slot));
  put("transmission_duration", fmt(cfg.transmission_duration));
  put("blocklength", std::to_string(cfg.blocklength_symbols()));
  put("num_embb", std::to_string(cfg.num_embb));
  put("num_urllc", std::to_string(cfg.num_urllc));
  put_vec("r_min", cfg.r_min);
  put_vec("packet_size", cfg.packet_bits);
  put_vec("arrival_rate", cfg.arrival_rate);
  put_vec("t_max", cfg.t_max);
  put("t_comp_max", fmt(cfg.t_comp_max));
  put("decode_err", fmt(cfg.decode_err));
  put("reliability", fmt(cfg.reliability));
  put("noise_power", fmt(watt_to_dbm(cfg.noise_power)));
  put("pathloss_exponent", fmt(cfg.pathloss_exponent));
  put("p_max", fmt(watt_to_dbm(cfg.p_max)));
  {
    std::string s;
    for (int i = 0; i < cfg.aoi_max.size(); ++i)
      s += (i ? "," : "") + std::to_string(cfg.aoi_max[i]);
    put("aoi_max", s);
  }
  put("beampattern_threshold", fmt(watt_to_dbm(cfg.beampattern_threshold)));
  put("lyapunov_v", fmt(cfg.lyapunov_v));
  put("penalty", fmt(cfg.penalty));
  put("pga_step", fmt(cfg.pga_step));
  put("pga_iters", std::to_string(cfg.pga_iters));
  put("probe_power", fmt(cfg.probe_power));
  put("j_max", std::to_string(cfg.j_max));
  put("n_max", std::to_string(cfg.n_max));
  put("eps1", fmt(cfg.eps1));
  put("eps2", fmt(cfg.eps2));
  put("power_reserve", fmt(cfg.power_reserve));
  put("rng_seed", std::to_string(cfg.rng_seed));
  return os.str();
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  const std::string s = serialize_config(cfg);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace simisac
