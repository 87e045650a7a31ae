// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include "simisac/power_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace simisac {

namespace {

constexpr double kLn2 = 0.69314718055994530942;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Water level parameterized by x = (1 + mu) / (eta + nu): the stationarity
// point of an in-rate entry, pushed up to its lower bound.
double entry_power_at(const PowerEntry& e, double x) {
  if (!e.in_rate || e.weight <= 0.0 || e.gain <= 0.0) return e.lb;
  if (x == kInf) return kInf;
  const double p = x * e.weight / kLn2 - 1.0 / e.gain;
  return std::max(e.lb, std::max(0.0, p));
}

double entry_unclamped_rate(const PowerEntry& e, double p) {
  if (!e.in_rate) return 0.0;
  return e.weight * std::log2(1.0 + e.gain * p) - e.rate_offset;
}

struct Workspace {
  const PowerProblem* prob;
  std::vector<char> active;                 // entry participates in rate terms
  std::vector<std::vector<int>> by_group;   // entry ids per floor group

  double group_rate(int g, double x) const {
    double r = 0.0;
    for (int id : by_group[static_cast<size_t>(g)]) {
      const PowerEntry& e = prob->entries[static_cast<size_t>(id)];
      if (!active[static_cast<size_t>(id)]) continue;
      r += entry_unclamped_rate(e, entry_power_at(e, x));
    }
    return r;
  }

  bool group_can_grow(int g) const {
    for (int id : by_group[static_cast<size_t>(g)]) {
      const PowerEntry& e = prob->entries[static_cast<size_t>(id)];
      if (active[static_cast<size_t>(id)] && e.weight > 0.0 && e.gain > 0.0) return true;
    }
    return false;
  }

  // Smallest x >= x_min with group rate >= floor; exact x_min when the floor
  // is already met there (zero multiplier).
  double solve_group_level(int g, double floor, double x_min) const {
    if (group_rate(g, x_min) >= floor) return x_min;
    if (!group_can_grow(g)) return kInf;
    double lo = x_min;
    double hi = std::max(x_min, 1.0);
    int guard = 0;
    while (group_rate(g, hi) < floor) {
      hi *= 2.0;
      if (++guard > 1100) return kInf;
    }
    for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (group_rate(g, mid) < floor) lo = mid;
      else hi = mid;
    }
    return hi;  // upper end keeps the floor satisfied
  }

  // Per-entry powers and total at a given price (eta + nu).
  double total_power(double price, std::vector<double>* levels) const {
    const int groups = static_cast<int>(prob->floor.size());
    const double x_free = price > 0.0 ? 1.0 / price : kInf;
    double total = 0.0;
    std::vector<double> x_group(static_cast<size_t>(groups), x_free);
    for (int g = 0; g < groups; ++g) {
      if (prob->floor[g] > 0.0) {
        x_group[static_cast<size_t>(g)] =
            solve_group_level(g, prob->floor[g], x_free == kInf ? 0.0 : x_free);
        if (x_group[static_cast<size_t>(g)] == kInf && !group_can_grow(g)) return kInf;
      } else if (x_free == kInf && group_can_grow(g)) {
        return kInf;
      }
    }
    for (size_t i = 0; i < prob->entries.size(); ++i) {
      const PowerEntry& e = prob->entries[i];
      double x = x_free;
      if (e.group >= 0) x = x_group[static_cast<size_t>(e.group)];
      if (!active[i]) {
        total += e.lb;
        continue;
      }
      const double p = entry_power_at(e, x);
      if (p == kInf) return kInf;
      total += p;
    }
    if (x_free == kInf) {
      // eta + nu == 0 with some free positive entry means unbounded water.
      for (size_t i = 0; i < prob->entries.size(); ++i) {
        const PowerEntry& e = prob->entries[i];
        if (e.group < 0 && active[i] && e.in_rate && e.weight > 0.0 && e.gain > 0.0) return kInf;
      }
    }
    if (levels) {
      levels->assign(static_cast<size_t>(groups) + 1, x_free);
      for (int g = 0; g < groups; ++g) (*levels)[static_cast<size_t>(g)] = x_group[static_cast<size_t>(g)];
    }
    return total;
  }
};

}  // namespace

double entry_rate(const PowerEntry& e, double p) {
  if (!e.in_rate) return 0.0;
  return std::max(0.0, e.weight * std::log2(1.0 + e.gain * p) - e.rate_offset);
}

PowerSolution solve_power(const PowerProblem& prob) {
  const int groups = static_cast<int>(prob.floor.size());
  const size_t n = prob.entries.size();

  Workspace ws;
  ws.prob = &prob;
  ws.active.assign(n, 1);
  ws.by_group.assign(static_cast<size_t>(groups), {});
  double lb_total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const PowerEntry& e = prob.entries[i];
    if (e.group >= groups)
      throw std::invalid_argument("solve_power: entry group out of range");
    if (e.group >= 0) ws.by_group[static_cast<size_t>(e.group)].push_back(static_cast<int>(i));
    if (e.lb < 0.0) throw std::invalid_argument("solve_power: negative lower bound");
    lb_total += e.lb;
  }
  auto floor_label = [&](int g) {
    return g < static_cast<int>(prob.floor_name.size()) ? prob.floor_name[static_cast<size_t>(g)]
                                                        : "C1(user " + std::to_string(g) + ")";
  };

  if (lb_total > prob.budget * (1.0 + 1e-9) + 1e-18)
    throw InfeasibleError("beampattern power lower bounds exceed the residual budget", {"C5"});

  // Reachability and minimum power for the floors (price-independent).
  {
    double min_total = lb_total;
    std::vector<std::string> binding;
    for (int g = 0; g < groups; ++g) {
      if (prob.floor[g] <= 0.0) continue;
      const double x = ws.solve_group_level(g, prob.floor[g], 0.0);
      if (x == kInf) {
        throw InfeasibleError("rate floor unreachable at any power: " + floor_label(g),
                              {floor_label(g)});
      }
      double extra = 0.0;
      for (int id : ws.by_group[static_cast<size_t>(g)]) {
        const PowerEntry& e = prob.entries[static_cast<size_t>(id)];
        extra += entry_power_at(e, x) - e.lb;
      }
      if (extra > 0.0) binding.push_back(floor_label(g));
      min_total += extra;
    }
    if (min_total > prob.budget * (1.0 + 1e-9)) {
      std::string what = "rate floors exceed the power budget:";
      for (const auto& b : binding) what += " " + b;
      throw InfeasibleError(what, binding.empty() ? std::vector<std::string>{"C10"} : binding);
    }
  }

  rvec p(n);
  std::vector<double> levels;
  double price = 0.0;

  // Repair loop: drop entries whose dispersion-adjusted rate is negative at
  // the optimum; each pass removes one entry, so it terminates.
  for (size_t pass = 0; pass <= n; ++pass) {
    double total0 = ws.total_power(prob.eta, &levels);
    if (total0 <= prob.budget) {
      price = prob.eta;
    } else {
      double lo = prob.eta;
      double hi = std::max(prob.eta, 1e-12);
      int guard = 0;
      while (ws.total_power(hi, nullptr) > prob.budget) {
        hi = hi > 0 ? hi * 2.0 : 1e-12;
        if (++guard > 400) break;
      }
      for (int it = 0; it < 200 && hi - lo > 1e-16 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (ws.total_power(mid, nullptr) > prob.budget) lo = mid;
        else hi = mid;
      }
      price = hi;
      ws.total_power(price, &levels);
    }

    const double x_free = price > 0.0 ? 1.0 / price : kInf;
    for (size_t i = 0; i < n; ++i) {
      const PowerEntry& e = prob.entries[i];
      if (!ws.active[i]) {
        p[static_cast<Eigen::Index>(i)] = e.lb;
        continue;
      }
      const double x = e.group >= 0 ? levels[static_cast<size_t>(e.group)] : x_free;
      p[static_cast<Eigen::Index>(i)] = entry_power_at(e, x);
    }

    // Find the worst clamped-off entry.
    int worst = -1;
    double worst_score = -1e-9;
    for (size_t i = 0; i < n; ++i) {
      const PowerEntry& e = prob.entries[i];
      if (!ws.active[i] || !e.in_rate) continue;
      const double r = entry_unclamped_rate(e, p[static_cast<Eigen::Index>(i)]);
      const double score = r / std::max(1.0, e.rate_offset);
      if (score < worst_score) {
        worst_score = score;
        worst = static_cast<int>(i);
      }
    }
    if (worst < 0) break;
    ws.active[static_cast<size_t>(worst)] = 0;
  }

  PowerSolution sol;
  sol.p = p;
  sol.nu = price - prob.eta;
  sol.mu = rvec::Zero(groups);
  const double x_free = price > 0.0 ? 1.0 / price : kInf;
  for (int g = 0; g < groups; ++g) {
    const double x = levels[static_cast<size_t>(g)];
    if (x_free != kInf && x > x_free) sol.mu[g] = price * x - 1.0;
  }

  double sum_rate = 0.0, total = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const PowerEntry& e = prob.entries[i];
    const double pi = p[static_cast<Eigen::Index>(i)];
    total += pi;
    sum_rate += ws.active[i] ? entry_rate(e, pi) : 0.0;
  }
  sol.sum_rate = sum_rate;
  sol.total_power = total;
  sol.objective = sum_rate - prob.eta * total;

  // Scaled KKT residuals of the problem actually solved (final active set).
  // A zero price arises only in the factor-free bootstrap, which anchors at
  // the floors rather than a stationary point; its certificate covers the
  // primal side only.
  double res = 0.0;
  const double price_scale = std::max(price, 1e-300);
  for (size_t i = 0; i < n; ++i) {
    const PowerEntry& e = prob.entries[i];
    const double pi = p[static_cast<Eigen::Index>(i)];
    if (pi < e.lb - 1e-12 * std::max(1.0, e.lb)) res = std::max(res, 1.0);
    if (!ws.active[i] || !e.in_rate || e.weight <= 0.0 || e.gain <= 0.0) {
      // Pure cost: optimal at the lower bound.
      res = std::max(res, std::abs(pi - e.lb) / std::max(1.0, e.lb));
      continue;
    }
    if (price <= 0.0) continue;
    const double mu = e.group >= 0 ? sol.mu[e.group] : 0.0;
    const double marginal = (1.0 + mu) * e.weight * e.gain / ((1.0 + e.gain * pi) * kLn2);
    const double s = marginal - price;
    const bool at_lb = pi <= e.lb + 1e-12 * std::max(1.0, e.lb) + 1e-300;
    if (at_lb) {
      res = std::max(res, std::max(0.0, s) / price_scale);
    } else {
      res = std::max(res, std::abs(s) / price_scale);
    }
  }
  for (int g = 0; g < groups; ++g) {
    if (prob.floor[g] <= 0.0) continue;
    double rate_g = 0.0;
    for (int id : ws.by_group[static_cast<size_t>(g)]) {
      if (!ws.active[static_cast<size_t>(id)]) continue;
      rate_g += entry_unclamped_rate(prob.entries[static_cast<size_t>(id)],
                                     p[static_cast<Eigen::Index>(id)]);
    }
    const double scale = std::max(1.0, prob.floor[g]);
    res = std::max(res, std::max(0.0, prob.floor[g] - rate_g) / scale);
    const double slack_rel = std::max(0.0, rate_g - prob.floor[g]) / scale;
    res = std::max(res, sol.mu[g] / (1.0 + sol.mu[g]) * slack_rel);
  }
  if (prob.budget > 0.0) {
    res = std::max(res, std::max(0.0, total - prob.budget) / prob.budget);
    res = std::max(res, (sol.nu / price_scale) * std::max(0.0, prob.budget - total) / prob.budget);
  }
  sol.kkt_residual = res;
  return sol;
}

}  // namespace simisac
