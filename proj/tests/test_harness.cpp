// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "simisac/harness.hpp"

using namespace simisac;

namespace {

ScenarioConfig desk_cfg() {
  ScenarioConfig cfg = default_config();
  cfg.num_antennas = 2;
  cfg.num_layers = 2;
  cfg.mx = 4;
  cfg.mz = 4;
  cfg.num_rbs = 6;
  cfg.num_slots = 2;
  cfg.minislots_per_slot = 3;
  cfg.num_embb = 2;
  cfg.num_urllc = 2;
  cfg.r_min = rvec();
  cfg.packet_bits = rvec();
  cfg.arrival_rate = rvec();
  cfg.t_max = rvec();
  cfg.aoi_max = ivec();
  cfg.apply_user_defaults();
  cfg.r_min.setConstant(1e5);
  cfg.pga_iters = 25;
  cfg.n_max = 3;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("sweep shorthand axes") {
  ScenarioConfig cfg = default_config();
  apply_sweep_value(cfg, "m", "64");
  CHECK(cfg.mx == 8);
  CHECK(cfg.mz == 8);
  apply_sweep_value(cfg, "l", "5");
  CHECK(cfg.num_layers == 5);
  apply_sweep_value(cfg, "u", "3");
  CHECK(cfg.num_embb == 3);
  CHECK(cfg.num_urllc == 3);
  CHECK(cfg.r_min.size() == 3);
  CHECK(cfg.aoi_max.size() == 3);
  apply_sweep_value(cfg, "v", "0.125");
  CHECK(cfg.lyapunov_v == doctest::Approx(0.125));
  apply_sweep_value(cfg, "p_max", "30");
  CHECK(cfg.p_max == doctest::Approx(1.0));
  apply_sweep_value(cfg, "c", "11");
  CHECK(cfg.num_rbs == 11);
  CHECK_THROWS_AS(apply_sweep_value(cfg, "m", "17"), std::invalid_argument);
}

TEST_CASE("experiment counting and determinism") {
  ExperimentSpec spec;
  spec.base = desk_cfg();
  spec.baselines = {Baseline::proposed};
  spec.num_seeds = 2;
  spec.seed0 = 10;
  ExperimentResult r1 = run_experiment(spec);
  CHECK(r1.episodes.size() == 2);
  CHECK(r1.summary.size() == 1);
  CHECK(r1.summary[0].episodes == 2);
  CHECK(r1.summary[0].failures == 0);

  ExperimentResult r2 = run_experiment(spec);
  CHECK(episodes_csv(r1.episodes) == episodes_csv(r2.episodes));
  CHECK(summary_csv(r1.summary) == summary_csv(r2.summary));
}

TEST_CASE("dropping the sensing constraints can only help the URLLC ratio") {
  // Exact solvers would make the sensing-free pipeline a true upper bound on
  // the URLLC ratio; with alternating ascent the comparison carries
  // local-optimum noise, so wins allow a 10 percent margin.
  ExperimentSpec spec;
  spec.base = desk_cfg();
  spec.base.minislots_per_slot = 6;
  spec.base.beampattern_threshold = dbm_to_watt(186.0);  // sensing draws real power
  spec.base.lyapunov_v = 1e-6;  // backlog-driven detection actually fires
  spec.base.aoi_max.setConstant(1);
  spec.baselines = {Baseline::proposed, Baseline::comm_only};
  spec.num_seeds = 15;
  spec.seed0 = 40;
  ExperimentResult res = run_experiment(spec);
  int wins = 0, total = 0;
  for (int s = 0; s < spec.num_seeds; ++s) {
    const EpisodeSummary* prop = nullptr;
    const EpisodeSummary* comm = nullptr;
    for (const auto& ep : res.episodes) {
      if (ep.seed != spec.seed0 + static_cast<std::uint64_t>(s)) continue;
      if (ep.baseline == Baseline::proposed) prop = &ep;
      if (ep.baseline == Baseline::comm_only) comm = &ep;
    }
    REQUIRE(prop);
    REQUIRE(comm);
    if (prop->failed || comm->failed) continue;
    ++total;
    if (comm->ee_urllc >= prop->ee_urllc * 0.9) ++wins;
  }
  REQUIRE(total >= 12);
  CHECK(wins >= static_cast<int>(0.8 * total));
}

TEST_CASE("no-metasurface pipeline uses direct channels") {
  ScenarioConfig cfg = desk_cfg();
  cfg.num_antennas = 1;  // scalar maximum-ratio chain
  EpisodeTrace tr = run_baseline_no_sim(cfg, 5);
  CHECK(tr.baseline == Baseline::no_sim);
  CHECK(tr.slots.size() == 2);
  for (const auto& ms : tr.minislots) CHECK(ms.rho.sum() == 0);
  // Deterministic per seed.
  EpisodeTrace tr2 = run_baseline_no_sim(cfg, 5);
  CHECK(serialize_trace(tr) == serialize_trace(tr2));
}

TEST_CASE("table export") {
  ExperimentSpec spec;
  spec.base = desk_cfg();
  spec.base.num_slots = 1;
  spec.baselines = {Baseline::proposed};
  spec.num_seeds = 2;
  spec.seed0 = 77;
  ExperimentResult res = run_experiment(spec);

  const std::string dir = "/tmp/simisac_test_export";
  std::filesystem::remove_all(dir);
  export_tables(res, spec, dir);
  const std::string episodes1 = slurp(dir + "/episodes.csv");
  const std::string summary1 = slurp(dir + "/summary.csv");
  CHECK(episodes1.rfind("sweep_key,sweep_value,baseline,seed,failed,objective,ee_embb,ee_urllc,"
                        "avg_aoi,mean_backlog,fallback_rate,error\n",
                        0) == 0);
  CHECK(summary1.rfind("sweep_key,sweep_value,baseline,episodes,failures,mean_ee,std_ee,"
                       "mean_ee_embb,mean_ee_urllc,mean_aoi,aoi_per_target,violation_rate,"
                       "mean_backlog\n",
                       0) == 0);

  // Re-export is byte-identical apart from the manifest timestamp.
  export_tables(res, spec, dir);
  CHECK(slurp(dir + "/episodes.csv") == episodes1);
  CHECK(slurp(dir + "/summary.csv") == summary1);

  // Round trip through the per-episode records.
  auto parsed = parse_episodes_csv(episodes1);
  REQUIRE(parsed.size() == res.episodes.size());
  auto rebuilt = aggregate_episodes(parsed);
  CHECK(summary_csv(rebuilt) == summary1);

  ExperimentResult empty;
  CHECK_THROWS_WITH(export_tables(empty, spec, dir), "nothing to export");
}

TEST_CASE("episode failures are recorded per cell and the run continues") {
  ExperimentSpec spec;
  spec.base = desk_cfg();
  spec.base.mx = 1;
  spec.base.mz = 1;  // M < N: invalid cell
  spec.baselines = {Baseline::proposed};
  spec.num_seeds = 2;
  ExperimentResult res = run_experiment(spec);
  CHECK(res.episodes.size() == 2);
  for (const auto& ep : res.episodes) {
    CHECK(ep.failed);
    CHECK(!ep.error.empty());
  }
  CHECK(res.summary[0].failures == 2);
}
