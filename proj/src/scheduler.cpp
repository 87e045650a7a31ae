// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include "simisac/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "simisac/power_solver.hpp"
#include "simisac/rates.hpp"

namespace simisac {

std::string baseline_name(Baseline b) {
  switch (b) {
    case Baseline::proposed: return "proposed";
    case Baseline::random_sim: return "random-sim";
    case Baseline::no_sim: return "no-sim";
    case Baseline::comm_only: return "comm-only";
  }
  return "?";
}

Baseline baseline_from_name(const std::string& name) {
  if (name == "proposed") return Baseline::proposed;
  if (name == "random-sim") return Baseline::random_sim;
  if (name == "no-sim") return Baseline::no_sim;
  if (name == "comm-only") return Baseline::comm_only;
  throw std::invalid_argument("unknown baseline: " + name);
}

namespace {

constexpr double kStageSlack = 1e-9;

// Effective channel gain per unit power (|h^H col|^2 / noise), or the
// maximum-ratio gain ||h||^2 / noise when no transfer matrix is in the loop.
rmat effective_gains(const std::vector<std::vector<cvec>>& h, const std::vector<int>& cols,
                     const cmat* transfer, double noise) {
  const int users = static_cast<int>(h.size());
  const int rbs = users > 0 ? static_cast<int>(h[0].size()) : 0;
  rmat g(users, rbs);
  for (int u = 0; u < users; ++u) {
    for (int c = 0; c < rbs; ++c) {
      const cvec& hv = h[static_cast<size_t>(u)][static_cast<size_t>(c)];
      if (transfer) {
        const cplx e = hv.dot(transfer->col(cols[static_cast<size_t>(u)]));
        g(u, c) = std::norm(e) / noise;
      } else {
        g(u, c) = hv.squaredNorm() / noise;
      }
    }
  }
  return g;
}

// Total shortfall below the rate floors; zero means feasible.
double floor_deficit(const rvec& rate, const rvec& floor) {
  double d = 0.0;
  for (int i = 0; i < rate.size(); ++i) {
    const double tol = 1e-9 * std::max(1.0, floor[i]);
    d += std::max(0.0, floor[i] - rate[i] - tol);
  }
  return d;
}

// Feasibility-first comparison: a feasible state beats an infeasible one;
// among feasible states the objective decides; among infeasible ones the
// smaller floor deficit wins.
bool stage_accept(bool trial_feasible, double trial_obj, double trial_deficit, bool cur_feasible,
                  double cur_obj, double cur_deficit) {
  if (trial_feasible != cur_feasible) return trial_feasible;
  if (trial_feasible) return trial_obj >= cur_obj - kStageSlack * (1.0 + std::abs(cur_obj));
  return trial_deficit <= cur_deficit * (1.0 + kStageSlack) + kStageSlack;
}

// ---------------------------------------------------------------------------
// Slot-level eMBB solve
// ---------------------------------------------------------------------------

struct SlotState {
  imat alpha;
  rmat p;
  SimPhases phases;
  rvec user_rate;
  double sum_rate = 0.0;
  double power = 0.0;
};

rvec embb_user_rates(const rmat& gains, const imat& alpha, const rmat& p, double bandwidth) {
  rvec rate = rvec::Zero(alpha.rows());
  for (int i = 0; i < alpha.rows(); ++i)
    for (int c = 0; c < alpha.cols(); ++c)
      if (alpha(i, c)) rate[i] += bandwidth * std::log2(1.0 + gains(i, c) * p(i, c));
  return rate;
}

struct SlotSolveResult {
  SlotState state;
  long bb_nodes = 0;
  bool bb_exact = true;
  double kkt_residual = 0.0;
  int pga_accepted = 0;
  std::vector<std::vector<double>> ao_cycles;
};

// One subtractive solve at a fixed factor: alternate RB assignment, power
// allocation, and phase ascent. Cycles that cannot yet satisfy the rate
// floors run floor-free and are scored by their remaining deficit, so the
// penalized phase updates can pull the beams toward feasibility; the solve
// reports infeasibility only if its final state still misses a floor.
SlotSolveResult solve_slot_subtractive(const EmbbSlotInput& in, double eta, SlotState cur,
                                       SlotSolveResult diag_in) {
  const ScenarioConfig& cfg = *in.cfg;
  const double bw = cfg.rb_bandwidth;
  const int users = static_cast<int>(in.h.size());
  const int rbs = cfg.num_rbs;
  const double default_p = std::min(in.budget, cfg.probe_power) / rbs;
  SlotSolveResult out = diag_in;

  const cmat* transfer_ptr = nullptr;
  cmat transfer;
  if (in.prop) {
    transfer = assemble_transfer(cur.phases, *in.prop);
    transfer_ptr = &transfer;
  }
  rmat gains = effective_gains(in.h, in.cols, transfer_ptr, cfg.noise_power);

  auto sub_value = [&](const SlotState& s) { return s.sum_rate - eta * s.power; };
  auto deficit = [&](const SlotState& s) { return floor_deficit(s.user_rate, in.rate_floor); };
  auto feasible = [&](const SlotState& s) { return deficit(s) <= 0.0; };

  auto build_power = [&](const imat& alpha, const rvec& floors, double budget,
                         SlotState& trial) {
    PowerProblem pp;
    pp.floor = floors;
    pp.budget = budget;
    pp.eta = eta;
    std::vector<std::pair<int, int>> entry_pos;
    for (int i = 0; i < users; ++i) {
      for (int c = 0; c < rbs; ++c) {
        if (!alpha(i, c)) continue;
        PowerEntry e;
        e.group = i;
        e.gain = gains(i, c);
        e.weight = bw;
        pp.entries.push_back(e);
        entry_pos.emplace_back(i, c);
      }
    }
    PowerSolution ps = solve_power(pp);
    out.kkt_residual = std::max(out.kkt_residual, ps.kkt_residual);
    trial.alpha = alpha;
    trial.p = rmat::Zero(users, rbs);
    for (size_t k = 0; k < entry_pos.size(); ++k)
      trial.p(entry_pos[k].first, entry_pos[k].second) = ps.p[static_cast<Eigen::Index>(k)];
  };

  double prev = -std::numeric_limits<double>::infinity();
  out.ao_cycles.emplace_back();
  for (int n = 0; n < cfg.n_max; ++n) {
    // RB stage at candidate powers, then exact power reallocation. When the
    // floors are unreachable at the current phases, both run floor-free.
    EmbbRbInstance inst;
    inst.utility.resize(users, rbs);
    inst.rate.resize(users, rbs);
    inst.rate_cap.resize(users, rbs);
    inst.power.resize(users, rbs);
    for (int i = 0; i < users; ++i) {
      for (int c = 0; c < rbs; ++c) {
        const double pc = cur.alpha(i, c) ? cur.p(i, c) : default_p;
        const double r = bw * std::log2(1.0 + gains(i, c) * pc);
        inst.rate(i, c) = r;
        inst.rate_cap(i, c) = bw * std::log2(1.0 + gains(i, c) * in.budget);
        inst.power(i, c) = pc;
        inst.utility(i, c) = r - eta * pc;
      }
    }
    inst.rate_floor = in.rate_floor;
    inst.power_budget = in.budget;

    // The rate-maximizing bootstrap at a zero factor saturates any budget it
    // is given; pricing it at the probe scale keeps the search path
    // independent of budget slack. Feasibility falls back to the full budget.
    std::vector<double> budgets{in.budget};
    if (eta <= 0.0 && cfg.probe_power < in.budget)
      budgets.insert(budgets.begin(), cfg.probe_power);
    SlotState trial = cur;
    bool staged = false;
    for (double stage_budget : budgets) {
      try {
        EmbbRbInstance staged_inst = inst;
        staged_inst.power_budget = stage_budget;
        EmbbRbSolution rb = solve_rb_embb(staged_inst, &cur.alpha);
        out.bb_nodes += rb.diag.nodes;
        out.bb_exact = out.bb_exact && rb.diag.exact;
        build_power(rb.alpha, in.rate_floor, stage_budget, trial);
        staged = true;
        break;
      } catch (const InfeasibleError&) {
      }
    }
    if (!staged) {
      // Floor-free pass; every floored user keeps its best reachable RB so
      // the phase penalties have a link to work on.
      EmbbRbInstance relaxed = inst;
      relaxed.rate_floor = rvec::Zero(users);
      EmbbRbSolution rb = solve_rb_embb(relaxed, &cur.alpha);
      out.bb_nodes += rb.diag.nodes;
      for (int i = 0; i < users; ++i) {
        if (in.rate_floor[i] <= 0.0 || rb.alpha.row(i).sum() > 0) continue;
        int best_c = -1;
        double best = -1.0;
        for (int c = 0; c < rbs; ++c) {
          if (rb.alpha.col(c).sum() > 0) continue;
          if (inst.rate_cap(i, c) > best) {
            best = inst.rate_cap(i, c);
            best_c = c;
          }
        }
        if (best_c >= 0) rb.alpha(i, best_c) = 1;
      }
      build_power(rb.alpha, rvec::Zero(users), in.budget, trial);
    }
    trial.user_rate = embb_user_rates(gains, trial.alpha, trial.p, bw);
    trial.sum_rate = trial.user_rate.sum();
    trial.power = total_power_embb(trial.alpha, trial.p);
    if (stage_accept(feasible(trial), sub_value(trial), deficit(trial), feasible(cur),
                     sub_value(cur), deficit(cur)))
      cur = trial;

    // Phase stage.
    if (in.prop && in.optimize_phases) {
      PhaseProblem pb;
      pb.zeta = cfg.penalty;
      std::vector<std::vector<int>> user_terms(static_cast<size_t>(users));
      for (int i = 0; i < users; ++i) {
        for (int c = 0; c < rbs; ++c) {
          if (!cur.alpha(i, c) || cur.p(i, c) <= 0.0) continue;
          PhaseLink lk;
          lk.probe = in.h[static_cast<size_t>(i)][static_cast<size_t>(c)];
          lk.col = in.cols[static_cast<size_t>(i)];
          lk.p_lin = cur.p(i, c) / cfg.noise_power;
          pb.links.push_back(std::move(lk));
          PhaseRateTerm rt;
          rt.link = static_cast<int>(pb.links.size()) - 1;
          rt.weight = bw;
          pb.rate_terms.push_back(rt);
          const int tid = static_cast<int>(pb.rate_terms.size()) - 1;
          pb.objective_terms.push_back(tid);
          user_terms[static_cast<size_t>(i)].push_back(tid);
        }
      }
      for (int i = 0; i < users; ++i) {
        if (in.rate_floor[i] > 0.0)
          pb.floors.push_back({user_terms[static_cast<size_t>(i)], in.rate_floor[i]});
      }
      PgaDiag pd;
      SimPhases cand = solve_phases(pb, *in.prop, cur.phases, cfg.pga_step, cfg.pga_iters, &pd);
      out.pga_accepted += pd.accepted;
      const cmat cand_transfer = assemble_transfer(cand, *in.prop);
      const rmat cand_gains = effective_gains(in.h, in.cols, &cand_transfer, cfg.noise_power);
      SlotState trial2 = cur;
      trial2.phases = cand;
      trial2.user_rate = embb_user_rates(cand_gains, cur.alpha, cur.p, bw);
      trial2.sum_rate = trial2.user_rate.sum();
      if (stage_accept(feasible(trial2), sub_value(trial2), deficit(trial2), feasible(cur),
                       sub_value(cur), deficit(cur))) {
        cur = trial2;
        transfer = cand_transfer;
        gains = cand_gains;
      }
    }

    const double now = feasible(cur) ? sub_value(cur) : -deficit(cur);
    out.ao_cycles.back().push_back(now);
    if (std::abs(now - prev) < cfg.eps1) break;
    prev = now;
  }
  if (!feasible(cur)) {
    std::vector<std::string> bad;
    for (int i = 0; i < users; ++i)
      if (cur.user_rate[i] < in.rate_floor[i] * (1.0 - 1e-9))
        bad.push_back("C1(user " + std::to_string(i) + ")");
    throw InfeasibleError("eMBB rate floors unmet after phase optimization", bad);
  }
  out.state = std::move(cur);
  return out;
}

}  // namespace

EmbbSlotOutput run_embb_slot(const EmbbSlotInput& in) {
  const ScenarioConfig& cfg = *in.cfg;
  const int users = static_cast<int>(in.h.size());
  const int rbs = cfg.num_rbs;

  SlotState init;
  init.alpha = imat::Zero(users, rbs);
  init.p = rmat::Zero(users, rbs);
  init.phases = in.phases;
  init.user_rate = rvec::Zero(users);

  SlotSolveResult diag;
  const bool init_feasible = in.rate_floor.maxCoeff() <= 0.0;

  auto solve = [&](double eta, const SlotState& warm) {
    SlotSolveResult r = solve_slot_subtractive(in, eta, warm, diag);
    diag = r;
    return r.state;
  };
  auto value = [](const SlotState& s) { return std::pair<double, double>(s.sum_rate, s.power); };

  DinkelbachResult<SlotState> res = dinkelbach_drive(
      solve, value, [](const SlotState&) { return 0.0; }, std::move(init), init_feasible, 1.0,
      cfg.j_max, cfg.eps2);

  EmbbSlotOutput out;
  out.alpha = res.solution.alpha;
  out.p = res.solution.p;
  out.phases = res.solution.phases;
  out.sum_rate = res.solution.sum_rate;
  out.power = res.solution.power;
  out.diag.eta = res.eta;
  out.diag.dinkelbach_iters = res.iterations;
  out.diag.dinkelbach_converged = res.converged;
  out.diag.idle = res.idle;
  out.diag.history = res.history;
  out.diag.bb_nodes = diag.bb_nodes;
  out.diag.bb_exact = diag.bb_exact;
  out.diag.kkt_residual = diag.kkt_residual;
  out.diag.pga_accepted = diag.pga_accepted;
  out.diag.ao_cycles = diag.ao_cycles;
  return out;
}

// ---------------------------------------------------------------------------
// Mini-slot URLLC + sensing solve
// ---------------------------------------------------------------------------

namespace {

struct MiniState {
  imat beta, rho, z;
  rmat p;
  SimPhases phases;
  rvec user_rate;  // true clamped URLLC rates
  double sum_rate = 0.0;
  double power = 0.0;
};

struct MiniSolveResult {
  MiniState state;
  long bb_nodes = 0;
  bool bb_exact = true;
  double kkt_residual = 0.0;
  int pga_accepted = 0;
  std::vector<std::vector<double>> ao_cycles;
};

struct MiniContext {
  const UrllcMiniSlotInput* in;
  double dispersion = 0.0;  // short-blocklength penalty, bits/s/Hz
  int users = 0, rbs = 0, embb_users = 0;
};

rvec urllc_user_rates(const MiniContext& ctx, const rmat& gains, const imat& beta, const rmat& p) {
  const ScenarioConfig& cfg = *ctx.in->cfg;
  const double w = cfg.rb_bandwidth / cfg.minislots_per_slot;
  rvec rate = rvec::Zero(ctx.users);
  for (int j = 0; j < ctx.users; ++j)
    for (int c = 0; c < ctx.rbs; ++c)
      if (beta(j, c))
        rate[j] += w * std::max(0.0, std::log2(1.0 + gains(j, c) * p(j, c)) - ctx.dispersion);
  return rate;
}

double sense_gain_at(const MiniContext& ctx, const cmat& transfer, const rmat& p, int s, int c) {
  double gain = 0.0;
  for (int u = 0; u < ctx.users; ++u) {
    if (p(u, c) <= 0.0) continue;
    const cplx e = ctx.in->steer[static_cast<size_t>(s)].dot(
        transfer.col(ctx.in->cols[static_cast<size_t>(u)]));
    gain += p(u, c) * std::norm(e);
  }
  return gain;
}

// Scheduled sensing pairs must clear the beampattern threshold at the state's
// own phases.
bool sense_ok(const MiniContext& ctx, const cmat* transfer, const MiniState& st) {
  if (st.rho.sum() == 0) return true;
  if (!ctx.in->sensing_enabled || !transfer) return false;
  for (int s = 0; s < ctx.users; ++s)
    for (int c = 0; c < ctx.rbs; ++c)
      if (st.rho(s, c) && sense_gain_at(ctx, *transfer, st.p, s, c) <
                              ctx.in->sense_threshold[s] * (1.0 - 1e-9))
        return false;
  return true;
}

MiniSolveResult solve_mini_subtractive(const MiniContext& ctx, double eta, MiniState cur,
                                       MiniSolveResult diag_in) {
  const UrllcMiniSlotInput& in = *ctx.in;
  const ScenarioConfig& cfg = *in.cfg;
  const double w = cfg.rb_bandwidth / cfg.minislots_per_slot;
  const double default_p = std::min(in.budget, cfg.probe_power) / ctx.rbs;
  MiniSolveResult out = diag_in;

  const cmat* transfer_ptr = nullptr;
  cmat transfer;
  if (in.prop) {
    transfer = assemble_transfer(cur.phases, *in.prop);
    transfer_ptr = &transfer;
  }
  rmat gains = effective_gains(in.h, in.cols, transfer_ptr, cfg.noise_power);

  // q(i, j): beampattern gain toward target i per watt of user j.
  rmat q = rmat::Zero(ctx.users, ctx.users);
  auto refresh_q = [&] {
    if (!in.sensing_enabled || !transfer_ptr) return;
    for (int i = 0; i < ctx.users; ++i)
      for (int j = 0; j < ctx.users; ++j) {
        const cplx e =
            in.steer[static_cast<size_t>(i)].dot(transfer.col(in.cols[static_cast<size_t>(j)]));
        q(i, j) = std::norm(e);
      }
  };
  refresh_q();

  auto composite = [&](const MiniState& s) {
    double bonus = 0.0;
    for (int i = 0; i < ctx.users; ++i)
      if (s.rho.row(i).sum() > 0) bonus += in.detect_reward[i];
    return cfg.lyapunov_v * (s.sum_rate - eta * s.power) + bonus;
  };
  auto deficit = [&](const MiniState& s) { return floor_deficit(s.user_rate, in.rate_floor); };
  auto feasible = [&](const MiniState& s, const cmat* tr) {
    return deficit(s) <= 0.0 && sense_ok(ctx, tr, s);
  };

  double prev = -std::numeric_limits<double>::infinity();
  out.ao_cycles.emplace_back();
  for (int n = 0; n < cfg.n_max; ++n) {
    UrllcRbInstance inst;
    inst.rate.resize(ctx.users, ctx.rbs);
    inst.rate_cap.resize(ctx.users, ctx.rbs);
    inst.power.resize(ctx.users, ctx.rbs);
    for (int j = 0; j < ctx.users; ++j) {
      // A user with no packet demand imposes no floor and is not scheduled
      // for transmission; its entries stay rate-free (sensing may still
      // select it).
      const bool demanded = in.rate_floor[j] > 0.0;
      for (int c = 0; c < ctx.rbs; ++c) {
        const bool active = cur.beta(j, c) || cur.rho(j, c);
        const double pc = active && cur.p(j, c) > 0.0 ? cur.p(j, c) : default_p;
        inst.power(j, c) = pc;
        const double se = std::log2(1.0 + gains(j, c) * pc) - ctx.dispersion;
        const double se_cap = std::log2(1.0 + gains(j, c) * in.budget) - ctx.dispersion;
        inst.rate(j, c) = demanded ? w * std::max(0.0, se) : 0.0;
        inst.rate_cap(j, c) = demanded ? w * std::max(0.0, se_cap) : 0.0;
      }
    }
    inst.rate_floor = in.rate_floor;
    inst.floor_name = in.floor_name;
    inst.detect_reward = in.sensing_enabled ? in.detect_reward : rvec::Zero(ctx.users);
    if (!in.sensing_enabled) {
      inst.sense_gain = rmat::Zero(ctx.users, ctx.users);
      inst.sense_threshold = rvec::Constant(ctx.users, std::numeric_limits<double>::infinity());
    } else {
      inst.sense_gain = q;
      inst.sense_threshold = in.sense_threshold;
    }
    inst.sense_power.resize(ctx.users, ctx.rbs);
    for (int j = 0; j < ctx.users; ++j) {
      const double own_gain = in.sensing_enabled ? q(j, j) : 0.0;
      const double lb = own_gain > 0.0 ? in.sense_threshold[j] / own_gain
                                       : std::numeric_limits<double>::infinity();
      for (int c = 0; c < ctx.rbs; ++c)
        inst.sense_power(j, c) = std::max(lb, cur.rho(j, c) ? cur.p(j, c) : 0.0);
    }
    inst.v = cfg.lyapunov_v;
    inst.eta = eta;
    inst.power_budget = in.budget;
    inst.rb_owner = ivec::Constant(ctx.rbs, -1);
    inst.puncture_cost =
        in.puncture_cost.size() == ctx.rbs ? in.puncture_cost : rvec::Zero(ctx.rbs);
    inst.owner_slack = in.owner_slack.size() ? in.owner_slack : rvec();
    for (int c = 0; c < ctx.rbs; ++c)
      for (int i = 0; i < ctx.embb_users; ++i)
        if (in.alpha.size() && in.alpha(i, c)) inst.rb_owner[c] = i;

    UrllcRbSolution warm_sol;
    warm_sol.beta = cur.beta;
    warm_sol.rho = cur.rho;
    warm_sol.z = cur.z;

    // Bootstrap pricing at the probe scale (see the slot solve).
    std::vector<double> budgets{in.budget};
    if (eta <= 0.0 && cfg.probe_power < in.budget)
      budgets.insert(budgets.begin(), cfg.probe_power);

    MiniState trial = cur;
    bool floors_on = true;
    double stage_budget = in.budget;
    UrllcRbSolution rb;
    bool staged = false;
    for (double b : budgets) {
      try {
        UrllcRbInstance staged_inst = inst;
        staged_inst.power_budget = b;
        rb = solve_rb_urllc(staged_inst, &warm_sol);
        stage_budget = b;
        staged = true;
        break;
      } catch (const InfeasibleError&) {
      }
    }
    if (!staged) {
      floors_on = false;
      UrllcRbInstance relaxed = inst;
      relaxed.rate_floor = rvec::Zero(ctx.users);
      stage_budget = in.budget;
      rb = solve_rb_urllc(relaxed, &warm_sol);
      // Give every demanded user its best reachable RB so the phase
      // penalties can work toward the floor.
      for (int j = 0; j < ctx.users; ++j) {
        if (in.rate_floor[j] <= 0.0 || rb.beta.row(j).sum() > 0) continue;
        int best_c = -1;
        double best = -1.0;
        for (int c = 0; c < ctx.rbs; ++c) {
          if (rb.beta.col(c).sum() > 0) continue;
          if (inst.rate_cap(j, c) > best) {
            best = inst.rate_cap(j, c);
            best_c = c;
          }
        }
        if (best_c >= 0) {
          rb.beta(j, best_c) = 1;
          rb.z(j, best_c) = rb.beta(j, best_c) * rb.rho(j, best_c);
        }
      }
    }
    out.bb_nodes += rb.diag.nodes;
    out.bb_exact = out.bb_exact && rb.diag.exact;

    // Power stage on the proposed binaries; floors dropped if unreachable.
    for (int attempt = 0; attempt < 2; ++attempt) {
      PowerProblem pp;
      pp.floor = (floors_on && attempt == 0) ? in.rate_floor : rvec::Zero(ctx.users);
      pp.floor_name = in.floor_name;
      pp.budget = attempt == 0 ? stage_budget : in.budget;
      pp.eta = eta;
      std::vector<std::pair<int, int>> entry_pos;
      for (int c = 0; c < ctx.rbs; ++c) {
        int comm = -1, sense = -1;
        for (int j = 0; j < ctx.users; ++j) {
          if (rb.beta(j, c)) comm = j;
          if (rb.rho(j, c)) sense = j;
        }
        if (comm >= 0) {
          PowerEntry e;
          e.group = comm;
          e.gain = gains(comm, c);
          e.weight = w;
          e.rate_offset = w * ctx.dispersion;
          e.in_rate = true;
          if (sense == comm && q(comm, comm) > 0.0)
            e.lb = in.sense_threshold[comm] / q(comm, comm);
          pp.entries.push_back(e);
          entry_pos.emplace_back(comm, c);
        }
        if (sense >= 0 && sense != comm) {
          PowerEntry e;
          e.group = -1;
          e.in_rate = false;
          e.lb = q(sense, sense) > 0.0 ? in.sense_threshold[sense] / q(sense, sense) : 0.0;
          pp.entries.push_back(e);
          entry_pos.emplace_back(sense, c);
        }
      }
      try {
        PowerSolution ps = solve_power(pp);
        out.kkt_residual = std::max(out.kkt_residual, ps.kkt_residual);
        trial.beta = rb.beta;
        trial.rho = rb.rho;
        trial.z = rb.z;
        trial.p = rmat::Zero(ctx.users, ctx.rbs);
        for (size_t k = 0; k < entry_pos.size(); ++k)
          trial.p(entry_pos[k].first, entry_pos[k].second) = ps.p[static_cast<Eigen::Index>(k)];
        break;
      } catch (const InfeasibleError&) {
        if (attempt == 1) throw;
      }
    }
    trial.user_rate = urllc_user_rates(ctx, gains, trial.beta, trial.p);
    trial.sum_rate = trial.user_rate.sum();
    trial.power = total_power_urllc(trial.beta, trial.rho, trial.z, trial.p);
    if (stage_accept(feasible(trial, transfer_ptr), composite(trial), deficit(trial),
                     feasible(cur, transfer_ptr), composite(cur), deficit(cur)))
      cur = trial;

    // Phase stage.
    if (in.prop && in.optimize_phases) {
      PhaseProblem pb;
      pb.zeta = cfg.penalty;
      std::vector<std::vector<int>> user_terms(static_cast<size_t>(ctx.users));
      for (int j = 0; j < ctx.users; ++j) {
        for (int c = 0; c < ctx.rbs; ++c) {
          if (!cur.beta(j, c) || cur.p(j, c) <= 0.0) continue;
          PhaseLink lk;
          lk.probe = in.h[static_cast<size_t>(j)][static_cast<size_t>(c)];
          lk.col = in.cols[static_cast<size_t>(j)];
          lk.p_lin = cur.p(j, c) / cfg.noise_power;
          pb.links.push_back(std::move(lk));
          PhaseRateTerm rt;
          rt.link = static_cast<int>(pb.links.size()) - 1;
          rt.weight = w;
          rt.dispersion = ctx.dispersion;
          pb.rate_terms.push_back(rt);
          const int tid = static_cast<int>(pb.rate_terms.size()) - 1;
          pb.objective_terms.push_back(tid);
          user_terms[static_cast<size_t>(j)].push_back(tid);
        }
      }
      for (int j = 0; j < ctx.users; ++j)
        if (in.rate_floor[j] > 0.0)
          pb.floors.push_back({user_terms[static_cast<size_t>(j)], in.rate_floor[j]});
      // Keep the eMBB users alive through this mini-slot's phase choice.
      if (!in.h_embb.empty() && in.embb_current_floor.size()) {
        for (int i = 0; i < ctx.embb_users; ++i) {
          if (in.embb_current_floor[i] <= 0.0) continue;
          std::vector<int> terms;
          for (int c = 0; c < ctx.rbs; ++c) {
            if (!in.alpha(i, c)) continue;
            bool punctured = false;
            for (int j = 0; j < ctx.users; ++j) punctured = punctured || cur.beta(j, c);
            if (punctured) continue;
            PhaseLink lk;
            lk.probe = in.h_embb[static_cast<size_t>(i)][static_cast<size_t>(c)];
            lk.col = in.embb_cols[static_cast<size_t>(i)];
            lk.p_lin = in.p_embb(i, c) / cfg.noise_power;
            pb.links.push_back(std::move(lk));
            PhaseRateTerm rt;
            rt.link = static_cast<int>(pb.links.size()) - 1;
            rt.weight = w;
            pb.rate_terms.push_back(rt);
            terms.push_back(static_cast<int>(pb.rate_terms.size()) - 1);
          }
          if (!terms.empty()) pb.floors.push_back({terms, in.embb_current_floor[i]});
        }
      }
      if (in.sensing_enabled) {
        for (int s = 0; s < ctx.users; ++s) {
          for (int c = 0; c < ctx.rbs; ++c) {
            if (!cur.rho(s, c)) continue;
            PhaseProblem::GainFloor gf;
            gf.threshold = in.sense_threshold[s];
            gf.scale = cfg.rb_bandwidth;
            for (int u = 0; u < ctx.users; ++u) {
              if (cur.p(u, c) <= 0.0) continue;
              PhaseLink lk;
              lk.probe = in.steer[static_cast<size_t>(s)];
              lk.col = in.cols[static_cast<size_t>(u)];
              lk.p_lin = cur.p(u, c);
              pb.links.push_back(std::move(lk));
              gf.links.push_back(static_cast<int>(pb.links.size()) - 1);
            }
            if (!gf.links.empty()) pb.gain_floors.push_back(std::move(gf));
          }
        }
      }
      PgaDiag pd;
      SimPhases cand = solve_phases(pb, *in.prop, cur.phases, cfg.pga_step, cfg.pga_iters, &pd);
      out.pga_accepted += pd.accepted;
      const cmat cand_transfer = assemble_transfer(cand, *in.prop);
      const rmat cand_gains = effective_gains(in.h, in.cols, &cand_transfer, cfg.noise_power);
      MiniState trial2 = cur;
      trial2.phases = cand;
      trial2.user_rate = urllc_user_rates(ctx, cand_gains, cur.beta, cur.p);
      trial2.sum_rate = trial2.user_rate.sum();
      bool embb_ok = true;
      if (!in.h_embb.empty() && in.embb_current_floor.size() && feasible(cur, transfer_ptr)) {
        const rmat eg = effective_gains(in.h_embb, in.embb_cols, &cand_transfer, cfg.noise_power);
        for (int i = 0; i < ctx.embb_users && embb_ok; ++i) {
          if (in.embb_current_floor[i] <= 0.0) continue;
          double r = 0.0;
          for (int c = 0; c < ctx.rbs; ++c) {
            if (!in.alpha(i, c)) continue;
            bool punctured = false;
            for (int j = 0; j < ctx.users; ++j) punctured = punctured || cur.beta(j, c);
            if (punctured) continue;
            r += w * std::log2(1.0 + eg(i, c) * in.p_embb(i, c));
          }
          if (r < in.embb_current_floor[i] * (1.0 - kStageSlack)) embb_ok = false;
        }
      }
      if (embb_ok &&
          stage_accept(feasible(trial2, &cand_transfer), composite(trial2), deficit(trial2),
                       feasible(cur, transfer_ptr), composite(cur), deficit(cur))) {
        cur = trial2;
        transfer = cand_transfer;
        gains = cand_gains;
        refresh_q();
      }
    }

    const double now = feasible(cur, transfer_ptr) ? composite(cur) : -deficit(cur);
    out.ao_cycles.back().push_back(now);
    if (std::abs(now - prev) < cfg.eps1) break;
    prev = now;
  }
  if (!feasible(cur, transfer_ptr)) {
    std::vector<std::string> bad;
    for (int j = 0; j < ctx.users; ++j)
      if (cur.user_rate[j] < in.rate_floor[j] * (1.0 - 1e-9))
        bad.push_back(j < static_cast<int>(in.floor_name.size())
                          ? in.floor_name[static_cast<size_t>(j)]
                          : "C2/C3(user " + std::to_string(j) + ")");
    throw InfeasibleError("URLLC rate floors unmet after phase optimization", bad);
  }
  out.state = std::move(cur);
  return out;
}

}  // namespace

UrllcMiniSlotOutput run_urllc_minislot(const UrllcMiniSlotInput& in) {
  const ScenarioConfig& cfg = *in.cfg;
  MiniContext ctx;
  ctx.in = &in;
  ctx.users = static_cast<int>(in.h.size());
  ctx.rbs = cfg.num_rbs;
  ctx.embb_users = static_cast<int>(in.h_embb.size());
  ctx.dispersion = fbl_penalty(cfg.blocklength_symbols(), cfg.decode_err);

  MiniState init;
  init.beta = imat::Zero(ctx.users, ctx.rbs);
  init.rho = imat::Zero(ctx.users, ctx.rbs);
  init.z = imat::Zero(ctx.users, ctx.rbs);
  init.p = rmat::Zero(ctx.users, ctx.rbs);
  init.phases = in.phases;
  init.user_rate = rvec::Zero(ctx.users);

  MiniSolveResult diag;
  const bool init_feasible = in.rate_floor.maxCoeff() <= 0.0;

  auto solve = [&](double eta, const MiniState& warm) {
    MiniSolveResult r = solve_mini_subtractive(ctx, eta, warm, diag);
    diag = r;
    return r.state;
  };
  auto value = [](const MiniState& s) { return std::pair<double, double>(s.sum_rate, s.power); };
  auto bonus = [&](const MiniState& s) {
    double b = 0.0;
    for (int i = 0; i < ctx.users; ++i)
      if (s.rho.row(i).sum() > 0) b += in.detect_reward[i];
    return b;
  };

  DinkelbachResult<MiniState> res =
      dinkelbach_drive(solve, value, bonus, std::move(init), init_feasible,
                       std::max(cfg.lyapunov_v, 0.0), cfg.j_max, cfg.eps2);

  UrllcMiniSlotOutput out;
  out.beta = res.solution.beta;
  out.rho = res.solution.rho;
  out.z = res.solution.z;
  out.p = res.solution.p;
  out.phases = res.solution.phases;
  out.sum_rate = res.solution.sum_rate;
  out.power = res.solution.power;
  out.rate = res.solution.user_rate;
  out.diag.eta = res.eta;
  out.diag.dinkelbach_iters = res.iterations;
  out.diag.dinkelbach_converged = res.converged;
  out.diag.idle = res.idle;
  out.diag.history = res.history;
  out.diag.bb_nodes = diag.bb_nodes;
  out.diag.bb_exact = diag.bb_exact;
  out.diag.kkt_residual = diag.kkt_residual;
  out.diag.pga_accepted = diag.pga_accepted;
  out.diag.ao_cycles = diag.ao_cycles;
  return out;
}

// ---------------------------------------------------------------------------
// Episode
// ---------------------------------------------------------------------------

namespace {

std::string fmtd(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string bits_row(const imat& m, int row) {
  std::string s;
  for (int c = 0; c < m.cols(); ++c) s += m(row, c) ? '1' : '0';
  return s;
}

std::string mat_bits(const imat& m) {
  std::string s;
  for (int r = 0; r < m.rows(); ++r) {
    if (r) s += ';';
    s += bits_row(m, r);
  }
  return s;
}

std::string mat_vals(const rmat& m) {
  std::string s;
  for (int r = 0; r < m.rows(); ++r) {
    if (r) s += ';';
    for (int c = 0; c < m.cols(); ++c) {
      if (c) s += ',';
      s += fmtd(m(r, c));
    }
  }
  return s;
}

std::string ivec_vals(const ivec& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::string rvec_vals(const rvec& v) {
  std::string s;
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmtd(v[i]);
  }
  return s;
}

// Descending ladder of floor scales used when a solve reports infeasibility;
// scale 0 always succeeds since an empty allocation is admissible then.
constexpr double kFallbackScales[] = {0.75, 0.5, 0.25, 0.1, 0.0};

}  // namespace

double EpisodeTrace::objective() const {
  double acc = 0.0;
  for (const auto& s : slots) acc += s.realized_ee;
  for (const auto& m : minislots) acc += m.ee;
  return acc / std::max(1, num_slots);
}

double EpisodeTrace::mean_ee_embb() const {
  double acc = 0.0;
  for (const auto& s : slots) acc += s.realized_ee;
  return slots.empty() ? 0.0 : acc / static_cast<double>(slots.size());
}

double EpisodeTrace::mean_ee_urllc() const {
  double acc = 0.0;
  for (const auto& m : minislots) acc += m.ee;
  return minislots.empty() ? 0.0 : acc / static_cast<double>(minislots.size());
}

double EpisodeTrace::avg_aoi(int target) const {
  double acc = 0.0;
  for (const auto& m : minislots) acc += m.age_after[target];
  return minislots.empty() ? 0.0 : acc / static_cast<double>(minislots.size());
}

double EpisodeTrace::mean_backlog() const {
  double acc = 0.0;
  for (const auto& m : minislots) acc += m.queue_after.sum();
  return minislots.empty() ? 0.0
                           : acc / (static_cast<double>(minislots.size()) *
                                    std::max(1, num_urllc));
}

double EpisodeTrace::fallback_rate() const {
  double n = 0.0;
  for (const auto& s : slots) n += s.diag.fallback ? 1.0 : 0.0;
  for (const auto& m : minislots) n += m.diag.fallback ? 1.0 : 0.0;
  const double total = static_cast<double>(slots.size() + minislots.size());
  return total > 0 ? n / total : 0.0;
}

std::string serialize_trace(const EpisodeTrace& tr) {
  std::ostringstream os;
  char hexbuf[32];
  std::snprintf(hexbuf, sizeof(hexbuf), "%016llx",
                static_cast<unsigned long long>(tr.cfg_hash));
  os << "trace_version 1\n";
  os << "meta cfg_hash=" << hexbuf << " seed=" << tr.seed
     << " baseline=" << baseline_name(tr.baseline) << " slots=" << tr.num_slots
     << " minislots=" << tr.minislots_per_slot << " embb=" << tr.num_embb
     << " urllc=" << tr.num_urllc << "\n";
  size_t mi = 0;
  for (const auto& sl : tr.slots) {
    os << "slot t=" << sl.t << " fallback=" << (sl.diag.fallback ? 1 : 0)
       << " scale=" << fmtd(sl.diag.floor_scale) << " eta=" << fmtd(sl.diag.eta)
       << " ee=" << fmtd(sl.realized_ee) << " rate=" << fmtd(sl.realized_rate)
       << " power=" << fmtd(sl.power) << " c1_slack=" << fmtd(sl.c1_slack_min)
       << " iters=" << sl.diag.dinkelbach_iters
       << " converged=" << (sl.diag.dinkelbach_converged ? 1 : 0)
       << " nodes=" << sl.diag.bb_nodes << " exact=" << (sl.diag.bb_exact ? 1 : 0)
       << " kkt=" << fmtd(sl.diag.kkt_residual) << " pga=" << sl.diag.pga_accepted
       << " user_rate=" << rvec_vals(sl.realized_user_rate) << " alpha=" << mat_bits(sl.alpha)
       << " p=" << mat_vals(sl.p_embb) << "\n";
    while (mi < tr.minislots.size() && tr.minislots[mi].t == sl.t) {
      const auto& ms = tr.minislots[mi++];
      os << "ms t=" << ms.t << " tau=" << ms.tau << " fallback=" << (ms.diag.fallback ? 1 : 0)
         << " scale=" << fmtd(ms.diag.floor_scale) << " eta=" << fmtd(ms.diag.eta)
         << " ee=" << fmtd(ms.ee) << " rate=" << fmtd(ms.sum_rate) << " power=" << fmtd(ms.power)
         << " floor_slack=" << fmtd(ms.floor_slack_min) << " c5_slack=" << fmtd(ms.c5_slack_min)
         << " iters=" << ms.diag.dinkelbach_iters
         << " converged=" << (ms.diag.dinkelbach_converged ? 1 : 0)
         << " idle=" << (ms.diag.idle ? 1 : 0) << " nodes=" << ms.diag.bb_nodes
         << " exact=" << (ms.diag.bb_exact ? 1 : 0) << " kkt=" << fmtd(ms.diag.kkt_residual)
         << " pga=" << ms.diag.pga_accepted << " arrivals=" << ivec_vals(ms.arrivals)
         << " detected=" << ivec_vals(ms.detected) << " age=" << ivec_vals(ms.age_after)
         << " queue=" << rvec_vals(ms.queue_after) << " user_rate=" << rvec_vals(ms.rate)
         << " beta=" << mat_bits(ms.beta) << " rho=" << mat_bits(ms.rho)
         << " z=" << mat_bits(ms.z) << " p=" << mat_vals(ms.p_urllc) << "\n";
    }
  }
  os << "end objective=" << fmtd(tr.objective()) << "\n";
  return os.str();
}

void write_trace(const EpisodeTrace& tr, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace file: " + path);
  out << serialize_trace(tr);
}

EpisodeTrace run_episode(const ScenarioConfig& raw_cfg, std::uint64_t seed, Baseline baseline) {
  ScenarioConfig cfg = raw_cfg;
  cfg.apply_user_defaults();
  {
    auto bad = validate_config(cfg);
    if (!bad.empty()) throw std::invalid_argument("invalid config: " + bad.front());
  }
  const bool with_sim = baseline != Baseline::no_sim;
  const bool sensing = baseline == Baseline::proposed || baseline == Baseline::random_sim;
  const bool optimize = baseline == Baseline::proposed || baseline == Baseline::comm_only;

  Rng root(seed);
  Rng geom_rng = root.stream(0);
  Rng chan_rng = root.stream(1);
  Rng arr_rng = root.stream(2);
  Rng phase_rng = root.stream(3);

  const Geometry geom = build_geometry(cfg, geom_rng);
  const double lam = cfg.wavelength();
  rvec pl_embb(cfg.num_embb), pl_urllc(cfg.num_urllc);
  for (int i = 0; i < cfg.num_embb; ++i)
    pl_embb[i] = path_loss(geom.embb_user(i).distance, lam, cfg.pathloss_exponent);
  for (int i = 0; i < cfg.num_urllc; ++i)
    pl_urllc[i] = path_loss(geom.urllc_user(i).distance, lam, cfg.pathloss_exponent);

  PropagationMatrices prop;
  CorrelationMatrix corr;
  std::vector<cvec> steer;
  if (with_sim) {
    prop = build_propagation(geom, cfg);
    corr = build_correlation(geom.atom_positions.back(), lam);
    steer.reserve(static_cast<size_t>(cfg.num_urllc));
    for (int i = 0; i < cfg.num_urllc; ++i) {
      const UserRecord& u = geom.urllc_user(i);
      steer.push_back(steering_vector(u.elevation, u.azimuth, cfg.mx, cfg.mz));
    }
  }
  ColumnMap colmap{cfg.num_antennas};
  std::vector<int> embb_cols(static_cast<size_t>(cfg.num_embb));
  std::vector<int> urllc_cols(static_cast<size_t>(cfg.num_urllc));
  for (int i = 0; i < cfg.num_embb; ++i) embb_cols[static_cast<size_t>(i)] = colmap.embb(i);
  for (int i = 0; i < cfg.num_urllc; ++i) urllc_cols[static_cast<size_t>(i)] = colmap.urllc(i);

  // Deterministic per-user URLLC demand: the reliability quantile of the
  // arrival process converts the probabilistic constraint into a rate floor;
  // users with no traffic impose nothing.
  rvec urllc_floor(cfg.num_urllc);
  std::vector<std::string> floor_name(static_cast<size_t>(cfg.num_urllc));
  for (int i = 0; i < cfg.num_urllc; ++i) {
    const int quant =
        cfg.arrival_rate[i] > 0.0 ? poisson_icdf(cfg.arrival_rate[i], cfg.reliability) : 0;
    if (quant == 0) {
      urllc_floor[i] = 0.0;
      floor_name[static_cast<size_t>(i)] = "C2hat(user " + std::to_string(i) + ")";
      continue;
    }
    const double c2 = cfg.packet_bits[i] * quant;
    const double c3 = delay_rate_floor(cfg.packet_bits[i], cfg.t_max[i], cfg.t_comp_max);
    urllc_floor[i] = std::max(c2, c3);
    floor_name[static_cast<size_t>(i)] =
        (c3 > c2 ? "C3(user " : "C2hat(user ") + std::to_string(i) + ")";
  }
  rvec sense_threshold(cfg.num_urllc);
  for (int i = 0; i < cfg.num_urllc; ++i)
    sense_threshold[i] = cfg.beampattern_threshold * pl_urllc[i] * pl_urllc[i];

  EpisodeTrace tr;
  tr.cfg_hash = config_hash(cfg);
  tr.seed = seed;
  tr.baseline = baseline;
  tr.num_slots = cfg.num_slots;
  tr.minislots_per_slot = cfg.minislots_per_slot;
  tr.num_embb = cfg.num_embb;
  tr.num_urllc = cfg.num_urllc;

  SimPhases cur_phases;
  if (with_sim) cur_phases = random_phases(cfg.num_layers, cfg.atoms_per_layer(), phase_rng);

  AoiState aoi = AoiState::initial(cfg.num_urllc);
  VirtualQueues queues = VirtualQueues::initial(cfg.num_urllc);
  const double w_mini = cfg.rb_bandwidth / cfg.minislots_per_slot;

  for (int t = 0; t < cfg.num_slots; ++t) {
    ChannelSet chan =
        with_sim ? sample_channels(chan_rng, corr, pl_embb, pl_urllc, cfg.num_rbs)
                 : sample_direct_channels(chan_rng, cfg.num_antennas, pl_embb, pl_urllc,
                                          cfg.num_rbs);

    EmbbSlotInput sin;
    sin.cfg = &cfg;
    sin.prop = with_sim ? &prop : nullptr;
    sin.h = chan.h_embb;
    sin.cols = embb_cols;
    sin.phases = with_sim ? (baseline == Baseline::random_sim
                                 ? random_phases(cfg.num_layers, cfg.atoms_per_layer(), phase_rng)
                                 : cur_phases)
                          : SimPhases{};
    sin.optimize_phases = optimize;
    sin.budget = (1.0 - cfg.power_reserve) * cfg.p_max;
    sin.rate_floor = cfg.r_min;

    EmbbSlotOutput so;
    bool solved = false;
    double used_scale = 1.0;
    std::vector<std::string> infeasible_seen;
    try {
      so = run_embb_slot(sin);
      solved = true;
    } catch (const InfeasibleError& err) {
      infeasible_seen = err.violated();
    }
    if (!solved) {
      for (double scale : kFallbackScales) {
        EmbbSlotInput retry = sin;
        retry.rate_floor = cfg.r_min * scale;
        try {
          so = run_embb_slot(retry);
          solved = true;
          used_scale = scale;
          break;
        } catch (const InfeasibleError&) {
        }
      }
    }
    if (!solved) throw std::runtime_error("slot solve failed even with zero floors");
    so.diag.fallback = used_scale < 1.0;
    so.diag.floor_scale = used_scale;
    so.diag.infeasible = infeasible_seen;
    if (with_sim) cur_phases = so.phases;

    // Per-mini-slot eMBB baseline at the slot solution: rates used for the
    // unpunctured-future projection and for pricing punctures.
    const cmat* slot_transfer_ptr = nullptr;
    cmat slot_transfer;
    if (with_sim) {
      slot_transfer = assemble_transfer(so.phases, prop);
      slot_transfer_ptr = &slot_transfer;
    }
    const rmat slot_gains_e =
        effective_gains(chan.h_embb, embb_cols, slot_transfer_ptr, cfg.noise_power);
    rvec base_rate = rvec::Zero(cfg.num_embb);  // per user per mini-slot, bits/s
    rvec puncture_cost = rvec::Zero(cfg.num_rbs);
    for (int i = 0; i < cfg.num_embb; ++i) {
      for (int c = 0; c < cfg.num_rbs; ++c) {
        if (!so.alpha(i, c)) continue;
        const double r = w_mini * std::log2(1.0 + slot_gains_e(i, c) * so.p(i, c));
        base_rate[i] += r;
        puncture_cost[c] = r;
      }
    }

    rvec prefix = rvec::Zero(cfg.num_embb);
    const rvec slot_floor = cfg.r_min * used_scale;

    for (int tau = 0; tau < cfg.minislots_per_slot; ++tau) {
      ivec arrivals(cfg.num_urllc);
      for (int i = 0; i < cfg.num_urllc; ++i) arrivals[i] = arr_rng.poisson(cfg.arrival_rate[i]);

      const int remaining_after = cfg.minislots_per_slot - 1 - tau;
      rvec owner_slack(cfg.num_embb), current_floor(cfg.num_embb);
      for (int i = 0; i < cfg.num_embb; ++i) {
        const double projected = prefix[i] + (remaining_after + 1) * base_rate[i];
        owner_slack[i] = std::max(0.0, projected - slot_floor[i]);
        current_floor[i] = slot_floor[i] - prefix[i] - remaining_after * base_rate[i];
      }

      UrllcMiniSlotInput min_in;
      min_in.cfg = &cfg;
      min_in.prop = with_sim ? &prop : nullptr;
      min_in.h = chan.h_urllc;
      min_in.cols = urllc_cols;
      min_in.phases = with_sim ? (baseline == Baseline::random_sim
                                      ? random_phases(cfg.num_layers, cfg.atoms_per_layer(),
                                                      phase_rng)
                                      : so.phases)
                               : SimPhases{};
      min_in.optimize_phases = optimize;
      min_in.sensing_enabled = sensing;
      min_in.steer = steer;
      min_in.sense_threshold = sense_threshold;
      min_in.rate_floor = urllc_floor;
      min_in.floor_name = floor_name;
      rvec reward(cfg.num_urllc);
      for (int i = 0; i < cfg.num_urllc; ++i)
        reward[i] = queues.backlog[i] * static_cast<double>(aoi.age[i]);
      min_in.detect_reward = reward;
      min_in.budget = std::max(0.0, cfg.p_max - so.power);
      min_in.alpha = so.alpha;
      min_in.p_embb = so.p;
      min_in.h_embb = chan.h_embb;
      min_in.embb_cols = embb_cols;
      min_in.embb_current_floor = current_floor;
      min_in.owner_slack = owner_slack;
      min_in.puncture_cost = puncture_cost;

      UrllcMiniSlotOutput mo;
      bool ms_solved = false;
      double ms_scale = 1.0;
      std::vector<std::string> ms_infeasible;
      try {
        mo = run_urllc_minislot(min_in);
        ms_solved = true;
      } catch (const InfeasibleError& err) {
        ms_infeasible = err.violated();
      }
      if (!ms_solved) {
        for (double scale : kFallbackScales) {
          UrllcMiniSlotInput retry = min_in;
          retry.rate_floor = urllc_floor * scale;
          try {
            mo = run_urllc_minislot(retry);
            ms_solved = true;
            ms_scale = scale;
            break;
          } catch (const InfeasibleError&) {
          }
        }
      }
      if (!ms_solved) throw std::runtime_error("mini-slot solve failed even with zero floors");
      mo.diag.fallback = ms_scale < 1.0;
      mo.diag.floor_scale = ms_scale;
      mo.diag.infeasible = ms_infeasible;

      // Realized eMBB contribution of this mini-slot at the phases it saw.
      const cmat* ms_transfer_ptr = nullptr;
      cmat ms_transfer;
      if (with_sim) {
        ms_transfer = assemble_transfer(mo.phases, prop);
        ms_transfer_ptr = &ms_transfer;
      }
      const rmat ms_gains_e =
          effective_gains(chan.h_embb, embb_cols, ms_transfer_ptr, cfg.noise_power);
      for (int i = 0; i < cfg.num_embb; ++i) {
        for (int c = 0; c < cfg.num_rbs; ++c) {
          if (!so.alpha(i, c)) continue;
          bool punctured = false;
          for (int j = 0; j < cfg.num_urllc; ++j) punctured = punctured || mo.beta(j, c);
          if (punctured) continue;
          prefix[i] += w_mini * std::log2(1.0 + ms_gains_e(i, c) * so.p(i, c));
        }
      }

      ivec detected(cfg.num_urllc);
      for (int i = 0; i < cfg.num_urllc; ++i) detected[i] = mo.rho.row(i).sum();
      aoi = step_aoi(aoi, detected);
      queues = update_virtual_queue(queues, aoi.age, cfg.aoi_max);

      MiniSlotRecord rec;
      rec.t = t;
      rec.tau = tau;
      rec.beta = mo.beta;
      rec.rho = mo.rho;
      rec.z = mo.z;
      rec.p_urllc = mo.p;
      rec.arrivals = arrivals;
      rec.detected = detected;
      rec.age_after = aoi.age;
      rec.queue_after = queues.backlog;
      rec.rate = mo.rate;
      rec.sum_rate = mo.sum_rate;
      rec.power = mo.power;
      rec.ee = mo.power > 0.0 ? mo.sum_rate / mo.power : 0.0;
      double fslack = std::numeric_limits<double>::infinity();
      for (int i = 0; i < cfg.num_urllc; ++i)
        if (urllc_floor[i] * ms_scale > 0.0)
          fslack = std::min(fslack, mo.rate[i] - urllc_floor[i] * ms_scale);
      rec.floor_slack_min = std::isfinite(fslack) ? fslack : 0.0;
      double c5slack = std::numeric_limits<double>::infinity();
      if (sensing && ms_transfer_ptr) {
        for (int i = 0; i < cfg.num_urllc; ++i) {
          for (int c = 0; c < cfg.num_rbs; ++c) {
            if (!mo.rho(i, c)) continue;
            const cmat sigma = effective_covariance(mo.p, urllc_cols, ms_transfer, c);
            const double gain = beampattern_gain(sigma, steer[static_cast<size_t>(i)]);
            c5slack = std::min(c5slack, gain / sense_threshold[i] - 1.0);
          }
        }
      }
      rec.c5_slack_min = std::isfinite(c5slack) ? c5slack : 0.0;
      rec.diag = mo.diag;
      tr.minislots.push_back(std::move(rec));
    }

    SlotRecord srec;
    srec.t = t;
    srec.alpha = so.alpha;
    srec.p_embb = so.p;
    srec.solver_ee = so.diag.eta;
    srec.realized_user_rate = prefix;
    srec.realized_rate = prefix.sum();
    srec.power = so.power;
    srec.realized_ee = so.power > 0.0 ? srec.realized_rate / so.power : 0.0;
    double c1slack = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.num_embb; ++i)
      if (slot_floor[i] > 0.0) c1slack = std::min(c1slack, prefix[i] - slot_floor[i]);
    srec.c1_slack_min = std::isfinite(c1slack) ? c1slack : 0.0;
    srec.diag = so.diag;
    tr.slots.push_back(std::move(srec));
  }
  return tr;
}

}  // namespace simisac
