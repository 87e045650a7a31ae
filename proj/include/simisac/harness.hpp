// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simisac/scheduler.hpp"

namespace simisac {

// A sweep axis, the baselines to run on it, and the seed list.
struct ExperimentSpec {
  ScenarioConfig base;
  std::string sweep_key;                  // empty: single point
  std::vector<std::string> sweep_values;  // file-format units
  std::vector<Baseline> baselines{Baseline::proposed};
  int num_seeds = 1;
  std::uint64_t seed0 = 1;
  int workers = 0;  // 0: hardware concurrency
};

struct EpisodeSummary {
  std::string sweep_key;
  std::string sweep_value;
  Baseline baseline = Baseline::proposed;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  double objective = 0.0;
  double ee_embb = 0.0;
  double ee_urllc = 0.0;
  rvec avg_aoi;
  double mean_backlog = 0.0;
  double fallback_rate = 0.0;
};

struct SummaryRow {
  std::string sweep_key;
  std::string sweep_value;
  Baseline baseline = Baseline::proposed;
  int episodes = 0;
  int failures = 0;
  double mean_ee = 0.0;
  double std_ee = 0.0;
  double mean_ee_embb = 0.0;
  double mean_ee_urllc = 0.0;
  double mean_aoi = 0.0;  // across targets
  rvec aoi_per_target;
  double violation_rate = 0.0;
  double mean_backlog = 0.0;
};

struct ExperimentResult {
  std::vector<EpisodeSummary> episodes;
  std::vector<SummaryRow> summary;
};

// Applies one sweep value. Accepts the shorthand axes m (atoms per layer,
// square), l (layers), u (users per service), gamma_th (dBm), lambda_u,
// p_max (dBm), c (RBs), v (Lyapunov weight), or any raw config key.
void apply_sweep_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);

ScenarioConfig config_for_cell(const ExperimentSpec& spec, const std::string& sweep_value);

// Runs every (sweep value, baseline, seed) cell; partial failures are
// recorded per cell and the run continues. Deterministic given the spec.
ExperimentResult run_experiment(const ExperimentSpec& spec);

EpisodeTrace run_baseline_no_sim(const ScenarioConfig& cfg, std::uint64_t seed);

// Writes summary.csv, episodes.csv, and manifest.txt into dir. Re-export of
// the same result is byte-identical except for the manifest timestamp line.
void export_tables(const ExperimentResult& result, const ExperimentSpec& spec,
                   const std::string& dir);

// Rebuilds the aggregated summary from per-episode records.
std::vector<SummaryRow> aggregate_episodes(const std::vector<EpisodeSummary>& episodes);

std::string episodes_csv(const std::vector<EpisodeSummary>& episodes);
std::vector<EpisodeSummary> parse_episodes_csv(const std::string& text);
std::string summary_csv(const std::vector<SummaryRow>& rows);

}  // namespace simisac
