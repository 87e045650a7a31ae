// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include "simisac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace simisac {

namespace {

std::string fmtd(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int isqrt_exact(int v) {
  const int r = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v))));
  if (r * r != v) throw std::invalid_argument("m sweep values must be perfect squares");
  return r;
}

}  // namespace

void apply_sweep_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "m") {
    const int side = isqrt_exact(std::stoi(value));
    cfg.mx = side;
    cfg.mz = side;
  } else if (key == "l") {
    cfg.num_layers = std::stoi(value);
  } else if (key == "u") {
    set_config_key(cfg, "num_embb", value);
    set_config_key(cfg, "num_urllc", value);
    cfg.r_min = rvec();  // re-broadcast defaults to the new counts
    cfg.packet_bits = rvec();
    cfg.arrival_rate = rvec();
    cfg.t_max = rvec();
    cfg.aoi_max = ivec();
  } else if (key == "gamma_th") {
    set_config_key(cfg, "beampattern_threshold", value);
  } else if (key == "lambda_u") {
    set_config_key(cfg, "arrival_rate", value);
  } else if (key == "p_max") {
    set_config_key(cfg, "p_max", value);
  } else if (key == "c") {
    set_config_key(cfg, "num_rbs", value);
  } else if (key == "v") {
    set_config_key(cfg, "lyapunov_v", value);
  } else {
    set_config_key(cfg, key, value);
  }
  cfg.apply_user_defaults();
}

ScenarioConfig config_for_cell(const ExperimentSpec& spec, const std::string& sweep_value) {
  ScenarioConfig cfg = spec.base;
  if (!spec.sweep_key.empty()) apply_sweep_value(cfg, spec.sweep_key, sweep_value);
  return cfg;
}

EpisodeTrace run_baseline_no_sim(const ScenarioConfig& cfg, std::uint64_t seed) {
  return run_episode(cfg, seed, Baseline::no_sim);
}

std::vector<SummaryRow> aggregate_episodes(const std::vector<EpisodeSummary>& episodes) {
  std::vector<SummaryRow> rows;
  for (const auto& ep : episodes) {
    SummaryRow* row = nullptr;
    for (auto& r : rows) {
      if (r.sweep_value == ep.sweep_value && r.baseline == ep.baseline) {
        row = &r;
        break;
      }
    }
    if (!row) {
      rows.emplace_back();
      row = &rows.back();
      row->sweep_key = ep.sweep_key;
      row->sweep_value = ep.sweep_value;
      row->baseline = ep.baseline;
    }
    ++row->episodes;
    if (ep.failed) {
      ++row->failures;
      continue;
    }
    row->mean_ee += ep.objective;
    row->std_ee += ep.objective * ep.objective;
    row->mean_ee_embb += ep.ee_embb;
    row->mean_ee_urllc += ep.ee_urllc;
    if (row->aoi_per_target.size() != ep.avg_aoi.size())
      row->aoi_per_target = rvec::Zero(ep.avg_aoi.size());
    row->aoi_per_target += ep.avg_aoi;
    row->violation_rate += ep.fallback_rate;
    row->mean_backlog += ep.mean_backlog;
  }
  for (auto& r : rows) {
    const int n = r.episodes - r.failures;
    if (n <= 0) continue;
    r.mean_ee /= n;
    r.std_ee = std::sqrt(std::max(0.0, r.std_ee / n - r.mean_ee * r.mean_ee));
    r.mean_ee_embb /= n;
    r.mean_ee_urllc /= n;
    r.aoi_per_target /= static_cast<double>(n);
    r.mean_aoi = r.aoi_per_target.size() ? r.aoi_per_target.mean() : 0.0;
    r.violation_rate /= n;
    r.mean_backlog /= n;
  }
  return rows;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  std::vector<std::string> values = spec.sweep_values;
  if (values.empty()) values.push_back("");

  struct Job {
    std::string sweep_value;
    Baseline baseline;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& v : values)
    for (Baseline b : spec.baselines)
      for (int s = 0; s < spec.num_seeds; ++s)
        jobs.push_back({v, b, spec.seed0 + static_cast<std::uint64_t>(s)});

  std::vector<EpisodeSummary> out(jobs.size());
  auto run_job = [&](size_t idx) {
    const Job& job = jobs[idx];
    EpisodeSummary& ep = out[idx];
    ep.sweep_key = spec.sweep_key;
    ep.sweep_value = job.sweep_value;
    ep.baseline = job.baseline;
    ep.seed = job.seed;
    try {
      ScenarioConfig cfg = config_for_cell(spec, job.sweep_value);
      const EpisodeTrace tr = run_episode(cfg, job.seed, job.baseline);
      ep.objective = tr.objective();
      ep.ee_embb = tr.mean_ee_embb();
      ep.ee_urllc = tr.mean_ee_urllc();
      ep.avg_aoi = rvec(tr.num_urllc);
      for (int i = 0; i < tr.num_urllc; ++i) ep.avg_aoi[i] = tr.avg_aoi(i);
      ep.mean_backlog = tr.mean_backlog();
      ep.fallback_rate = tr.fallback_rate();
    } catch (const std::exception& e) {
      ep.failed = true;
      ep.error = e.what();
    }
  };

  int workers = spec.workers > 0 ? spec.workers
                                 : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(jobs.size())));
  if (workers == 1) {
    for (size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) run_job(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  ExperimentResult res;
  res.episodes = std::move(out);
  res.summary = aggregate_episodes(res.episodes);
  return res;
}

std::string episodes_csv(const std::vector<EpisodeSummary>& episodes) {
  std::ostringstream os;
  os << "sweep_key,sweep_value,baseline,seed,failed,objective,ee_embb,ee_urllc,avg_aoi,"
        "mean_backlog,fallback_rate,error\n";
  for (const auto& ep : episodes) {
    std::string aoi;
    for (int i = 0; i < ep.avg_aoi.size(); ++i) aoi += (i ? ";" : "") + fmtd(ep.avg_aoi[i]);
    os << ep.sweep_key << ',' << ep.sweep_value << ',' << baseline_name(ep.baseline) << ','
       << ep.seed << ',' << (ep.failed ? 1 : 0) << ',' << fmtd(ep.objective) << ','
       << fmtd(ep.ee_embb) << ',' << fmtd(ep.ee_urllc) << ',' << aoi << ','
       << fmtd(ep.mean_backlog) << ',' << fmtd(ep.fallback_rate) << ',' << ep.error << '\n';
  }
  return os.str();
}

std::vector<EpisodeSummary> parse_episodes_csv(const std::string& text) {
  std::vector<EpisodeSummary> out;
  std::istringstream is(text);
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string item;
    while (std::getline(ls, item, ',')) f.push_back(item);
    if (f.size() < 11) throw std::runtime_error("bad episodes record: " + line);
    EpisodeSummary ep;
    ep.sweep_key = f[0];
    ep.sweep_value = f[1];
    ep.baseline = baseline_from_name(f[2]);
    ep.seed = std::stoull(f[3]);
    ep.failed = f[4] == "1";
    ep.objective = std::stod(f[5]);
    ep.ee_embb = std::stod(f[6]);
    ep.ee_urllc = std::stod(f[7]);
    std::vector<double> aoi;
    if (!f[8].empty()) {
      std::stringstream as(f[8]);
      std::string a;
      while (std::getline(as, a, ';')) aoi.push_back(std::stod(a));
    }
    ep.avg_aoi = rvec(static_cast<Eigen::Index>(aoi.size()));
    for (size_t i = 0; i < aoi.size(); ++i) ep.avg_aoi[static_cast<Eigen::Index>(i)] = aoi[i];
    ep.mean_backlog = std::stod(f[9]);
    ep.fallback_rate = std::stod(f[10]);
    if (f.size() > 11) ep.error = f[11];
    out.push_back(std::move(ep));
  }
  return out;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream os;
  os << "sweep_key,sweep_value,baseline,episodes,failures,mean_ee,std_ee,mean_ee_embb,"
        "mean_ee_urllc,mean_aoi,aoi_per_target,violation_rate,mean_backlog\n";
  for (const auto& r : rows) {
    std::string aoi;
    for (int i = 0; i < r.aoi_per_target.size(); ++i)
      aoi += (i ? ";" : "") + fmtd(r.aoi_per_target[i]);
    os << r.sweep_key << ',' << r.sweep_value << ',' << baseline_name(r.baseline) << ','
       << r.episodes << ',' << r.failures << ',' << fmtd(r.mean_ee) << ',' << fmtd(r.std_ee)
       << ',' << fmtd(r.mean_ee_embb) << ',' << fmtd(r.mean_ee_urllc) << ',' << fmtd(r.mean_aoi)
       << ',' << aoi << ',' << fmtd(r.violation_rate) << ',' << fmtd(r.mean_backlog) << '\n';
  }
  return os.str();
}

void export_tables(const ExperimentResult& result, const ExperimentSpec& spec,
                   const std::string& dir) {
  if (result.episodes.empty()) throw std::runtime_error("nothing to export");
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());

  auto write = [&](const std::string& name, const std::string& content) {
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
  };
  write("episodes.csv", episodes_csv(result.episodes));
  write("summary.csv", summary_csv(result.summary));

  std::ostringstream mf;
  mf << "tool = simisac 0.1.0\n";
  mf << "config_hash = " << std::hex << config_hash(spec.base) << std::dec << "\n";
  mf << "sweep_key = " << spec.sweep_key << "\n";
  mf << "sweep_values =";
  for (const auto& v : spec.sweep_values) mf << " " << v;
  mf << "\n";
  mf << "baselines =";
  for (Baseline b : spec.baselines) mf << " " << baseline_name(b);
  mf << "\n";
  mf << "num_seeds = " << spec.num_seeds << "\n";
  mf << "seeds =";
  for (int s = 0; s < spec.num_seeds; ++s) mf << " " << (spec.seed0 + static_cast<std::uint64_t>(s));
  mf << "\n";
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  mf << "created_unix = "
     << std::chrono::duration_cast<std::chrono::seconds>(now).count() << "\n";
  write("manifest.txt", mf.str());
}

}  // namespace simisac
