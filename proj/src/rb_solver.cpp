// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include "simisac/rb_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace simisac {

namespace {

bool floor_ok(double rate, double floor) {
  return rate >= floor - 1e-9 * std::max(1.0, std::abs(floor));
}

bool budget_ok(double power, double budget) { return power <= budget * (1.0 + 1e-12) + 1e-15; }

bool gain_ok(double gain, double threshold) { return gain >= threshold * (1.0 - 1e-12); }

constexpr double kImprove = 1e-12;

}  // namespace

// ---------------------------------------------------------------------------
// eMBB RB assignment
// ---------------------------------------------------------------------------

static double evaluate_rb_embb(const EmbbRbInstance& inst, const imat& alpha) {
  double obj = 0.0;
  for (int i = 0; i < alpha.rows(); ++i)
    for (int c = 0; c < alpha.cols(); ++c)
      if (alpha(i, c)) obj += inst.utility(i, c);
  return obj;
}

static bool feasible_rb_embb(const EmbbRbInstance& inst, const imat& alpha) {
  const int users = static_cast<int>(inst.utility.rows());
  const int rbs = static_cast<int>(inst.utility.cols());
  double power = 0.0;
  rvec rate = rvec::Zero(users);
  for (int c = 0; c < rbs; ++c) {
    int assigned = 0;
    for (int i = 0; i < users; ++i) {
      if (!alpha(i, c)) continue;
      ++assigned;
      power += inst.power(i, c);
      rate[i] += inst.cap()(i, c);
    }
    if (assigned > 1) return false;
  }
  if (!budget_ok(power, inst.power_budget)) return false;
  for (int i = 0; i < users; ++i)
    if (!floor_ok(rate[i], inst.rate_floor[i])) return false;
  return true;
}

namespace {

struct EmbbSearch {
  const EmbbRbInstance& inst;
  int users, rbs;
  std::vector<double> util_suffix;              // best nonnegative utility from rb c onward
  std::vector<std::vector<double>> rate_suffix;  // per user, reachable rate from rb c onward
  std::vector<int> pick;                        // assignment in progress, -1 = none
  std::vector<int> best_pick;
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  long nodes = 0;

  explicit EmbbSearch(const EmbbRbInstance& in)
      : inst(in),
        users(static_cast<int>(in.utility.rows())),
        rbs(static_cast<int>(in.utility.cols())),
        pick(static_cast<size_t>(rbs), -1) {
    util_suffix.assign(static_cast<size_t>(rbs) + 1, 0.0);
    for (int c = rbs - 1; c >= 0; --c) {
      double top = 0.0;
      for (int i = 0; i < users; ++i) top = std::max(top, inst.utility(i, c));
      util_suffix[static_cast<size_t>(c)] = util_suffix[static_cast<size_t>(c) + 1] + top;
    }
    rate_suffix.assign(static_cast<size_t>(users),
                       std::vector<double>(static_cast<size_t>(rbs) + 1, 0.0));
    for (int i = 0; i < users; ++i)
      for (int c = rbs - 1; c >= 0; --c)
        rate_suffix[static_cast<size_t>(i)][static_cast<size_t>(c)] =
            rate_suffix[static_cast<size_t>(i)][static_cast<size_t>(c) + 1] + inst.cap()(i, c);
  }

  void run(int c, double util, double power, rvec& rate) {
    ++nodes;
    if (!budget_ok(power, inst.power_budget)) return;
    for (int i = 0; i < users; ++i) {
      if (!floor_ok(rate[i] + rate_suffix[static_cast<size_t>(i)][static_cast<size_t>(c)],
                    inst.rate_floor[i]))
        return;
    }
    if (found && util + util_suffix[static_cast<size_t>(c)] <= best + kImprove) return;
    if (c == rbs) {
      for (int i = 0; i < users; ++i)
        if (!floor_ok(rate[i], inst.rate_floor[i])) return;
      if (!found || util > best + kImprove) {
        best = util;
        best_pick = pick;
        found = true;
      }
      return;
    }
    pick[static_cast<size_t>(c)] = -1;
    run(c + 1, util, power, rate);
    for (int i = 0; i < users; ++i) {
      pick[static_cast<size_t>(c)] = i;
      rate[i] += inst.cap()(i, c);
      run(c + 1, util + inst.utility(i, c), power + inst.power(i, c), rate);
      rate[i] -= inst.cap()(i, c);
    }
    pick[static_cast<size_t>(c)] = -1;
  }
};

imat pick_to_alpha(const std::vector<int>& pick, int users) {
  imat alpha = imat::Zero(users, static_cast<int>(pick.size()));
  for (size_t c = 0; c < pick.size(); ++c)
    if (pick[c] >= 0) alpha(pick[c], static_cast<int>(c)) = 1;
  return alpha;
}

void throw_unreachable_floors(const rmat& rate, const rvec& floor,
                              const std::vector<std::string>* names) {
  std::vector<std::string> bad;
  for (int i = 0; i < rate.rows(); ++i) {
    if (!floor_ok(rate.row(i).sum(), floor[i])) {
      bad.push_back(names ? (*names)[static_cast<size_t>(i)]
                          : "C1(user " + std::to_string(i) + ")");
    }
  }
  if (!bad.empty()) {
    std::string what = "rate floor unreachable even with every RB:";
    for (const auto& b : bad) what += " " + b;
    throw InfeasibleError(what, bad);
  }
}

EmbbRbSolution greedy_rb_embb(const EmbbRbInstance& inst) {
  const int users = static_cast<int>(inst.utility.rows());
  const int rbs = static_cast<int>(inst.utility.cols());
  std::vector<int> pick(static_cast<size_t>(rbs), -1);
  rvec rate = rvec::Zero(users);
  double power = 0.0;

  // Floors first, cheapest coverage by rate.
  for (int i = 0; i < users; ++i) {
    while (!floor_ok(rate[i], inst.rate_floor[i])) {
      int best_c = -1;
      double best_rate = 0.0;
      for (int c = 0; c < rbs; ++c) {
        if (pick[static_cast<size_t>(c)] >= 0) continue;
        if (!budget_ok(power + inst.power(i, c), inst.power_budget)) continue;
        if (inst.cap()(i, c) > best_rate) {
          best_rate = inst.cap()(i, c);
          best_c = c;
        }
      }
      if (best_c < 0)
        throw InfeasibleError("rate floor unreachable under budget (user " + std::to_string(i) + ")",
                              {"C1(user " + std::to_string(i) + ")"});
      pick[static_cast<size_t>(best_c)] = i;
      rate[i] += inst.cap()(i, best_c);
      power += inst.power(i, best_c);
    }
  }
  // Fill remaining RBs by marginal utility.
  for (int c = 0; c < rbs; ++c) {
    if (pick[static_cast<size_t>(c)] >= 0) continue;
    int best_i = -1;
    double best_u = kImprove;
    for (int i = 0; i < users; ++i) {
      if (!budget_ok(power + inst.power(i, c), inst.power_budget)) continue;
      if (inst.utility(i, c) > best_u) {
        best_u = inst.utility(i, c);
        best_i = i;
      }
    }
    if (best_i >= 0) {
      pick[static_cast<size_t>(c)] = best_i;
      rate[best_i] += inst.rate(best_i, c);
      power += inst.power(best_i, c);
    }
  }
  // 1-swap local search.
  bool changed = true;
  int passes = 0;
  while (changed && passes++ < 16) {
    changed = false;
    for (int c = 0; c < rbs; ++c) {
      const int cur = pick[static_cast<size_t>(c)];
      for (int cand = -1; cand < users; ++cand) {
        if (cand == cur) continue;
        const double delta = (cand >= 0 ? inst.utility(cand, c) : 0.0) -
                             (cur >= 0 ? inst.utility(cur, c) : 0.0);
        if (delta <= kImprove) continue;
        const double new_power = power - (cur >= 0 ? inst.power(cur, c) : 0.0) +
                                 (cand >= 0 ? inst.power(cand, c) : 0.0);
        if (!budget_ok(new_power, inst.power_budget)) continue;
        if (cur >= 0 && !floor_ok(rate[cur] - inst.cap()(cur, c), inst.rate_floor[cur])) continue;
        if (cur >= 0) rate[cur] -= inst.cap()(cur, c);
        if (cand >= 0) rate[cand] += inst.cap()(cand, c);
        pick[static_cast<size_t>(c)] = cand;
        power = new_power;
        changed = true;
      }
    }
  }
  EmbbRbSolution sol;
  sol.alpha = pick_to_alpha(pick, users);
  sol.objective = evaluate_rb_embb(inst, sol.alpha);
  sol.diag.exact = false;
  return sol;
}

}  // namespace

EmbbRbSolution solve_rb_embb(const EmbbRbInstance& inst, const imat* warm) {
  const int users = static_cast<int>(inst.utility.rows());
  const int rbs = static_cast<int>(inst.utility.cols());
  throw_unreachable_floors(inst.cap(), inst.rate_floor, nullptr);

  if (static_cast<long>(users) * rbs <= 64) {
    EmbbSearch search(inst);
    rvec rate = rvec::Zero(users);
    search.run(0, 0.0, 0.0, rate);
    if (!search.found)
      throw InfeasibleError("eMBB rate floors jointly unreachable under exclusivity and budget",
                            {"C1"});
    EmbbRbSolution sol;
    sol.alpha = pick_to_alpha(search.best_pick, users);
    sol.objective = evaluate_rb_embb(inst, sol.alpha);
    sol.diag.nodes = search.nodes;
    sol.diag.exact = true;
    return sol;
  }

  const bool warm_ok = warm && feasible_rb_embb(inst, *warm);
  EmbbRbSolution sol;
  try {
    sol = greedy_rb_embb(inst);
  } catch (const InfeasibleError&) {
    if (!warm_ok) throw;
    sol.alpha = *warm;
    sol.objective = evaluate_rb_embb(inst, *warm);
    sol.diag.exact = false;
    return sol;
  }
  if (warm_ok) {
    const double warm_obj = evaluate_rb_embb(inst, *warm);
    if (warm_obj > sol.objective) {
      sol.alpha = *warm;
      sol.objective = warm_obj;
    }
  }
  return sol;
}

double brute_force_rb_embb(const EmbbRbInstance& inst) {
  const int users = static_cast<int>(inst.utility.rows());
  const int rbs = static_cast<int>(inst.utility.cols());
  if (static_cast<long>(users) * rbs > 16)
    throw std::invalid_argument("brute_force_rb_embb: instance too large");

  double best = -std::numeric_limits<double>::infinity();
  imat alpha = imat::Zero(users, rbs);
  // Odometer over per-RB choices {none, user 0, ..}; feasibility at leaves.
  std::vector<int> pick(static_cast<size_t>(rbs), -1);
  while (true) {
    for (int c = 0; c < rbs; ++c) {
      alpha.col(c).setZero();
      if (pick[static_cast<size_t>(c)] >= 0) alpha(pick[static_cast<size_t>(c)], c) = 1;
    }
    if (feasible_rb_embb(inst, alpha)) best = std::max(best, evaluate_rb_embb(inst, alpha));
    int c = 0;
    while (c < rbs) {
      if (++pick[static_cast<size_t>(c)] < users) break;
      pick[static_cast<size_t>(c)] = -1;
      ++c;
    }
    if (c == rbs) break;
  }
  if (!std::isfinite(best))
    throw InfeasibleError("eMBB rate floors jointly unreachable under exclusivity and budget",
                          {"C1"});
  return best;
}

// ---------------------------------------------------------------------------
// URLLC RB + sensing assignment
// ---------------------------------------------------------------------------

namespace {

struct Combo {
  int comm;   // beta user or -1
  int sense;  // rho target or -1
};

double comm_power(const UrllcRbInstance& inst, int c, const Combo& k) {
  if (k.comm < 0) return 0.0;
  if (k.comm == k.sense) return std::max(inst.power(k.comm, c), inst.sense_power(k.comm, c));
  return inst.power(k.comm, c);
}

double combo_power(const UrllcRbInstance& inst, int c, const Combo& k) {
  double p = comm_power(inst, c, k);
  if (k.sense >= 0 && k.sense != k.comm) p += inst.sense_power(k.sense, c);
  return p;
}

// Beampattern gain toward the sensing target from every user transmitting on
// this RB (the communication signal contributes too).
double combo_gain(const UrllcRbInstance& inst, int c, const Combo& k) {
  if (k.sense < 0) return 0.0;
  double gain = 0.0;
  if (k.comm >= 0) gain += inst.sense_gain(k.sense, k.comm) * comm_power(inst, c, k);
  if (k.sense != k.comm) gain += inst.sense_gain(k.sense, k.sense) * inst.sense_power(k.sense, c);
  return gain;
}

double combo_utility(const UrllcRbInstance& inst, int c, const Combo& k) {
  double u = 0.0;
  if (k.comm >= 0) u += inst.v * (inst.rate(k.comm, c) - inst.eta * comm_power(inst, c, k));
  if (k.sense >= 0) {
    u += inst.detect_reward[k.sense];
    if (k.sense != k.comm) u -= inst.v * inst.eta * inst.sense_power(k.sense, c);
  }
  return u;
}

bool combo_sense_ok(const UrllcRbInstance& inst, int c, const Combo& k) {
  if (k.sense < 0) return true;
  if (!std::isfinite(inst.sense_power(k.sense, c))) return false;
  return gain_ok(combo_gain(inst, c, k), inst.sense_threshold[k.sense]);
}

}  // namespace

static double evaluate_rb_urllc(const UrllcRbInstance& inst, const imat& beta, const imat& rho) {
  double obj = 0.0;
  for (int c = 0; c < beta.cols(); ++c) {
    Combo k{-1, -1};
    for (int j = 0; j < beta.rows(); ++j) {
      if (beta(j, c)) k.comm = j;
      if (rho(j, c)) k.sense = j;
    }
    obj += combo_utility(inst, c, k);
  }
  return obj;
}

static bool feasible_rb_urllc(const UrllcRbInstance& inst, const imat& beta, const imat& rho) {
  const int users = static_cast<int>(inst.rate.rows());
  const int rbs = static_cast<int>(inst.rate.cols());
  rvec rate = rvec::Zero(users);
  rvec slack_used = rvec::Zero(inst.owner_slack.size());
  double power = 0.0;
  ivec sensed = ivec::Zero(users);
  for (int c = 0; c < rbs; ++c) {
    Combo k{-1, -1};
    int nb = 0, nr = 0;
    for (int j = 0; j < users; ++j) {
      if (beta(j, c)) {
        k.comm = j;
        ++nb;
      }
      if (rho(j, c)) {
        k.sense = j;
        ++nr;
      }
    }
    if (nb > 1 || nr > 1) return false;
    if (k.comm >= 0) rate[k.comm] += inst.cap()(k.comm, c);
    if (k.sense >= 0) ++sensed[k.sense];
    power += combo_power(inst, c, k);
    if (!combo_sense_ok(inst, c, k)) return false;
    if (k.comm >= 0 && inst.rb_owner[c] >= 0) slack_used[inst.rb_owner[c]] += inst.puncture_cost[c];
  }
  for (int j = 0; j < users; ++j) {
    if (sensed[j] > 1) return false;
    if (!floor_ok(rate[j], inst.rate_floor[j])) return false;
  }
  for (int i = 0; i < slack_used.size(); ++i)
    if (!floor_ok(inst.owner_slack[i], slack_used[i])) return false;
  return budget_ok(power, inst.power_budget);
}

namespace {

struct UrllcSearch {
  const UrllcRbInstance& inst;
  int users, rbs;
  std::vector<double> comm_suffix;               // best nonnegative comm utility from rb c onward
  std::vector<std::vector<double>> rate_suffix;  // per user
  std::vector<Combo> pick;
  std::vector<Combo> best_pick;
  double best = -std::numeric_limits<double>::infinity();
  bool found = false;
  long nodes = 0;

  explicit UrllcSearch(const UrllcRbInstance& in)
      : inst(in),
        users(static_cast<int>(in.rate.rows())),
        rbs(static_cast<int>(in.rate.cols())),
        pick(static_cast<size_t>(rbs), Combo{-1, -1}) {
    comm_suffix.assign(static_cast<size_t>(rbs) + 1, 0.0);
    for (int c = rbs - 1; c >= 0; --c) {
      double top = 0.0;
      for (int j = 0; j < users; ++j)
        top = std::max(top, inst.v * (inst.rate(j, c) - inst.eta * inst.power(j, c)));
      comm_suffix[static_cast<size_t>(c)] = comm_suffix[static_cast<size_t>(c) + 1] + top;
    }
    rate_suffix.assign(static_cast<size_t>(users),
                       std::vector<double>(static_cast<size_t>(rbs) + 1, 0.0));
    for (int j = 0; j < users; ++j)
      for (int c = rbs - 1; c >= 0; --c)
        rate_suffix[static_cast<size_t>(j)][static_cast<size_t>(c)] =
            rate_suffix[static_cast<size_t>(j)][static_cast<size_t>(c) + 1] + inst.cap()(j, c);
  }

  void run(int c, double util, double power, rvec& rate, rvec& slack_used, ivec& sensed,
           double unsensed_reward) {
    ++nodes;
    if (!budget_ok(power, inst.power_budget)) return;
    for (int j = 0; j < users; ++j) {
      if (!floor_ok(rate[j] + rate_suffix[static_cast<size_t>(j)][static_cast<size_t>(c)],
                    inst.rate_floor[j]))
        return;
    }
    if (found &&
        util + comm_suffix[static_cast<size_t>(c)] + unsensed_reward <= best + kImprove)
      return;
    if (c == rbs) {
      for (int j = 0; j < users; ++j)
        if (!floor_ok(rate[j], inst.rate_floor[j])) return;
      if (!found || util > best + kImprove) {
        best = util;
        best_pick = pick;
        found = true;
      }
      return;
    }
    const int owner = inst.rb_owner[c];
    for (int b = -1; b < users; ++b) {
      const int comm = b;
      double slack_cost = 0.0;
      if (comm >= 0 && owner >= 0) {
        slack_cost = inst.puncture_cost[c];
        if (!floor_ok(inst.owner_slack[owner], slack_used[owner] + slack_cost)) continue;
      }
      for (int s = -1; s < users; ++s) {
        const int sense = s;
        if (sense >= 0 && sensed[sense]) continue;
        Combo k{comm, sense};
        if (!combo_sense_ok(inst, c, k)) continue;
        pick[static_cast<size_t>(c)] = k;
        if (comm >= 0) rate[comm] += inst.cap()(comm, c);
        if (comm >= 0 && owner >= 0) slack_used[owner] += slack_cost;
        double dreward = 0.0;
        if (sense >= 0) {
          sensed[sense] = 1;
          dreward = std::max(0.0, inst.detect_reward[sense]);
        }
        run(c + 1, util + combo_utility(inst, c, k), power + combo_power(inst, c, k), rate,
            slack_used, sensed, unsensed_reward - dreward);
        if (sense >= 0) sensed[sense] = 0;
        if (comm >= 0 && owner >= 0) slack_used[owner] -= slack_cost;
        if (comm >= 0) rate[comm] -= inst.cap()(comm, c);
      }
    }
    pick[static_cast<size_t>(c)] = Combo{-1, -1};
  }
};

UrllcRbSolution picks_to_solution(const UrllcRbInstance& inst, const std::vector<Combo>& pick) {
  const int users = static_cast<int>(inst.rate.rows());
  const int rbs = static_cast<int>(inst.rate.cols());
  UrllcRbSolution sol;
  sol.beta = imat::Zero(users, rbs);
  sol.rho = imat::Zero(users, rbs);
  sol.z = imat::Zero(users, rbs);
  for (int c = 0; c < rbs; ++c) {
    const Combo& k = pick[static_cast<size_t>(c)];
    if (k.comm >= 0) sol.beta(k.comm, c) = 1;
    if (k.sense >= 0) sol.rho(k.sense, c) = 1;
    if (k.comm >= 0 && k.comm == k.sense) sol.z(k.comm, c) = 1;
  }
  sol.objective = evaluate_rb_urllc(inst, sol.beta, sol.rho);
  return sol;
}

void throw_urllc_unreachable(const UrllcRbInstance& inst) {
  std::vector<std::string> bad;
  for (int j = 0; j < inst.rate.rows(); ++j) {
    if (!floor_ok(inst.cap().row(j).sum(), inst.rate_floor[j])) {
      bad.push_back(j < static_cast<int>(inst.floor_name.size())
                        ? inst.floor_name[static_cast<size_t>(j)]
                        : "C2/C3(user " + std::to_string(j) + ")");
    }
  }
  if (!bad.empty()) {
    std::string what = "URLLC rate floor unreachable even with every RB:";
    for (const auto& b : bad) what += " " + b;
    throw InfeasibleError(what, bad);
  }
}

UrllcRbSolution greedy_rb_urllc(const UrllcRbInstance& inst) {
  const int users = static_cast<int>(inst.rate.rows());
  const int rbs = static_cast<int>(inst.rate.cols());
  std::vector<Combo> pick(static_cast<size_t>(rbs), Combo{-1, -1});
  rvec rate = rvec::Zero(users);
  rvec slack_used = rvec::Zero(inst.owner_slack.size());
  ivec sensed = ivec::Zero(users);
  double power = 0.0;

  auto can_puncture = [&](int c) {
    const int owner = inst.rb_owner[c];
    if (owner < 0) return true;
    return floor_ok(inst.owner_slack[owner], slack_used[owner] + inst.puncture_cost[c]);
  };
  auto add_comm = [&](int j, int c) {
    pick[static_cast<size_t>(c)].comm = j;
    rate[j] += inst.cap()(j, c);
    power += inst.power(j, c);
    if (inst.rb_owner[c] >= 0) slack_used[inst.rb_owner[c]] += inst.puncture_cost[c];
  };

  for (int j = 0; j < users; ++j) {
    while (!floor_ok(rate[j], inst.rate_floor[j])) {
      int best_c = -1;
      double best_rate = 0.0;
      for (int c = 0; c < rbs; ++c) {
        if (pick[static_cast<size_t>(c)].comm >= 0) continue;
        if (!can_puncture(c)) continue;
        if (!budget_ok(power + inst.power(j, c), inst.power_budget)) continue;
        if (inst.cap()(j, c) > best_rate) {
          best_rate = inst.cap()(j, c);
          best_c = c;
        }
      }
      if (best_c < 0)
        throw InfeasibleError(
            "URLLC rate floor unreachable under budget/puncture slack (user " + std::to_string(j) +
                ")",
            {j < static_cast<int>(inst.floor_name.size()) ? inst.floor_name[static_cast<size_t>(j)]
                                                          : "C2/C3"});
      add_comm(j, best_c);
    }
  }
  for (int c = 0; c < rbs; ++c) {
    if (pick[static_cast<size_t>(c)].comm >= 0) continue;
    if (!can_puncture(c)) continue;
    int best_j = -1;
    double best_u = kImprove;
    for (int j = 0; j < users; ++j) {
      if (!budget_ok(power + inst.power(j, c), inst.power_budget)) continue;
      const double u = inst.v * (inst.rate(j, c) - inst.eta * inst.power(j, c));
      if (u > best_u) {
        best_u = u;
        best_j = j;
      }
    }
    if (best_j >= 0) add_comm(best_j, c);
  }
  // Sensing: piggyback on the target's own RB when the beampattern already
  // clears the threshold, otherwise take the cheapest admissible RB.
  std::vector<int> order(static_cast<size_t>(users));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return inst.detect_reward[a] > inst.detect_reward[b];
  });
  for (int s : order) {
    if (inst.detect_reward[s] <= 0.0) continue;
    int best_c = -1;
    double best_net = 0.0;
    for (int c = 0; c < rbs; ++c) {
      if (pick[static_cast<size_t>(c)].sense >= 0) continue;
      Combo k{pick[static_cast<size_t>(c)].comm, s};
      if (!combo_sense_ok(inst, c, k)) continue;
      const double extra =
          (k.comm == s) ? std::max(0.0, inst.sense_power(s, c) - inst.power(s, c))
                        : inst.sense_power(s, c);
      if (!budget_ok(power + extra, inst.power_budget)) continue;
      const double net = inst.detect_reward[s] - inst.v * inst.eta * extra;
      if (net > best_net + kImprove) {
        best_net = net;
        best_c = c;
      }
    }
    if (best_c >= 0) {
      Combo before{pick[static_cast<size_t>(best_c)].comm, -1};
      Combo after{pick[static_cast<size_t>(best_c)].comm, s};
      power += combo_power(inst, best_c, after) - combo_power(inst, best_c, before);
      pick[static_cast<size_t>(best_c)].sense = s;
      sensed[s] = 1;
    }
  }
  UrllcRbSolution sol = picks_to_solution(inst, pick);
  sol.diag.exact = false;
  return sol;
}

}  // namespace

UrllcRbSolution solve_rb_urllc(const UrllcRbInstance& inst, const UrllcRbSolution* warm) {
  const int users = static_cast<int>(inst.rate.rows());
  const int rbs = static_cast<int>(inst.rate.cols());
  throw_urllc_unreachable(inst);

  if (static_cast<long>(users) * rbs <= 64) {
    UrllcSearch search(inst);
    rvec rate = rvec::Zero(users);
    rvec slack_used = rvec::Zero(inst.owner_slack.size());
    ivec sensed = ivec::Zero(users);
    double unsensed = 0.0;
    for (int j = 0; j < users; ++j) unsensed += std::max(0.0, inst.detect_reward[j]);
    search.run(0, 0.0, 0.0, rate, slack_used, sensed, unsensed);
    if (!search.found)
      throw InfeasibleError(
          "URLLC rate floors jointly unreachable under exclusivity, slack, and budget",
          inst.floor_name.empty() ? std::vector<std::string>{"C2/C3"} : inst.floor_name);
    UrllcRbSolution sol = picks_to_solution(inst, search.best_pick);
    sol.diag.nodes = search.nodes;
    sol.diag.exact = true;
    return sol;
  }

  const bool warm_ok = warm && feasible_rb_urllc(inst, warm->beta, warm->rho);
  UrllcRbSolution sol;
  try {
    sol = greedy_rb_urllc(inst);
  } catch (const InfeasibleError&) {
    if (!warm_ok) throw;
    sol = *warm;
    sol.objective = evaluate_rb_urllc(inst, warm->beta, warm->rho);
    sol.diag.exact = false;
    return sol;
  }
  if (warm_ok) {
    const double warm_obj = evaluate_rb_urllc(inst, warm->beta, warm->rho);
    if (warm_obj > sol.objective) {
      sol = *warm;
      sol.objective = warm_obj;
      sol.diag.exact = false;
    }
  }
  return sol;
}

double brute_force_rb_urllc(const UrllcRbInstance& inst) {
  const int users = static_cast<int>(inst.rate.rows());
  const int rbs = static_cast<int>(inst.rate.cols());
  if (static_cast<long>(users) * rbs > 16)
    throw std::invalid_argument("brute_force_rb_urllc: instance too large");

  const int combos = (users + 1) * (users + 1);
  double total = std::pow(static_cast<double>(combos), rbs);
  if (total > 2.5e7) throw std::invalid_argument("brute_force_rb_urllc: combo space too large");

  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> code(static_cast<size_t>(rbs), 0);
  imat beta(users, rbs), rho(users, rbs);
  while (true) {
    beta.setZero();
    rho.setZero();
    for (int c = 0; c < rbs; ++c) {
      const int b = code[static_cast<size_t>(c)] / (users + 1);
      const int s = code[static_cast<size_t>(c)] % (users + 1);
      if (b < users) beta(b, c) = 1;
      if (s < users) rho(s, c) = 1;
    }
    if (feasible_rb_urllc(inst, beta, rho)) best = std::max(best, evaluate_rb_urllc(inst, beta, rho));
    int c = 0;
    while (c < rbs) {
      if (++code[static_cast<size_t>(c)] < combos) break;
      code[static_cast<size_t>(c)] = 0;
      ++c;
    }
    if (c == rbs) break;
  }
  if (!std::isfinite(best))
    throw InfeasibleError(
        "URLLC rate floors jointly unreachable under exclusivity, slack, and budget",
        inst.floor_name.empty() ? std::vector<std::string>{"C2/C3"} : inst.floor_name);
  return best;
}

}  // namespace simisac
