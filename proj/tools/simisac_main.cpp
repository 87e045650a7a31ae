// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "simisac/harness.hpp"

namespace {

simisac::ScenarioConfig load_or_default(const std::string& path) {
  if (path.empty()) return simisac::default_config();
  return simisac::load_config_file(path);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<simisac::Baseline> parse_baselines(const std::string& arg) {
  std::vector<simisac::Baseline> out;
  for (const auto& name : split_csv(arg)) out.push_back(simisac::baseline_from_name(name));
  if (out.empty()) out.push_back(simisac::Baseline::proposed);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simisac: energy-efficient scheduling for metasurface-aided ISAC downlinks"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", baseline_arg = "proposed", sweep_arg;
  std::uint64_t seed = 0;
  int num_seeds = 1;
  std::uint64_t seed0 = 1;
  int workers = 0;

  auto* validate = app.add_subcommand("validate", "check a config file and report violations");
  validate->add_option("--config", config_path, "config file (key = value lines)");

  auto* run = app.add_subcommand("run", "run one episode and write its trace");
  run->add_option("--config", config_path, "config file");
  run->add_option("--seed", seed, "episode seed (default: rng_seed from the config)");
  run->add_option("--baseline", baseline_arg, "proposed|random-sim|no-sim|comm-only");
  run->add_option("--out", out_dir, "output directory");

  auto* sweep = app.add_subcommand("sweep", "run a sweep x baselines x seeds experiment");
  sweep->add_option("--config", config_path, "config file");
  sweep->add_option("--sweep", sweep_arg, "axis, e.g. v=0.1,1,10 or p_max=30,33,36,39");
  sweep->add_option("--baseline", baseline_arg, "comma-separated baseline list");
  sweep->add_option("--seeds", num_seeds, "number of seeds per cell");
  sweep->add_option("--seed0", seed0, "first seed");
  sweep->add_option("--workers", workers, "worker threads (0 = hardware)");
  sweep->add_option("--out", out_dir, "output directory");

  std::string records_path;
  auto* exp = app.add_subcommand("export", "re-aggregate tables from an episodes.csv");
  exp->add_option("--records", records_path, "episodes.csv from a previous sweep")->required();
  exp->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) {
      const auto cfg = load_or_default(config_path);
      const auto violations = simisac::validate_config(cfg);
      if (violations.empty()) {
        std::cout << "config ok\n";
        return 0;
      }
      for (const auto& v : violations) std::cout << "violation: " << v << "\n";
      return 1;
    }

    if (run->parsed()) {
      auto cfg = load_or_default(config_path);
      const std::uint64_t s = run->count("--seed") ? seed : cfg.rng_seed;
      const auto b = simisac::baseline_from_name(baseline_arg);
      const auto trace = simisac::run_episode(cfg, s, b);
      std::filesystem::create_directories(out_dir);
      const std::string path = out_dir + "/trace_" + simisac::baseline_name(b) + "_seed" +
                               std::to_string(s) + ".txt";
      simisac::write_trace(trace, path);
      std::cout << "objective " << trace.objective() << "\n";
      std::cout << "ee_embb " << trace.mean_ee_embb() << "\n";
      std::cout << "ee_urllc " << trace.mean_ee_urllc() << "\n";
      for (int i = 0; i < trace.num_urllc; ++i)
        std::cout << "avg_aoi[" << i << "] " << trace.avg_aoi(i) << "\n";
      std::cout << "trace " << path << "\n";
      return 0;
    }

    if (sweep->parsed()) {
      simisac::ExperimentSpec spec;
      spec.base = load_or_default(config_path);
      if (!sweep_arg.empty()) {
        const auto eq = sweep_arg.find('=');
        if (eq == std::string::npos)
          throw std::invalid_argument("--sweep expects key=v1,v2,...");
        spec.sweep_key = sweep_arg.substr(0, eq);
        spec.sweep_values = split_csv(sweep_arg.substr(eq + 1));
      }
      spec.baselines = parse_baselines(baseline_arg);
      spec.num_seeds = num_seeds;
      spec.seed0 = seed0;
      spec.workers = workers;
      const auto result = simisac::run_experiment(spec);
      simisac::export_tables(result, spec, out_dir);
      std::cout << simisac::summary_csv(result.summary);
      std::cout << "wrote " << out_dir << "/summary.csv, episodes.csv, manifest.txt\n";
      return 0;
    }

    if (exp->parsed()) {
      std::ifstream in(records_path, std::ios::binary);
      if (!in) throw std::runtime_error("cannot open " + records_path);
      std::stringstream ss;
      ss << in.rdbuf();
      simisac::ExperimentResult result;
      result.episodes = simisac::parse_episodes_csv(ss.str());
      if (result.episodes.empty()) throw std::runtime_error("nothing to export");
      result.summary = simisac::aggregate_episodes(result.episodes);
      std::filesystem::create_directories(out_dir);
      std::ofstream out(out_dir + "/summary.csv", std::ios::binary);
      out << simisac::summary_csv(result.summary);
      std::cout << "wrote " << out_dir << "/summary.csv\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
