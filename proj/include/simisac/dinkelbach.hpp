// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "simisac/types.hpp"

namespace simisac {

struct DinkelbachStep {
  double numerator;
  double denominator;
  double eta;  // factor the step was solved at
};

template <class Sol>
struct DinkelbachResult {
  Sol solution;
  double eta = 0.0;
  int iterations = 0;
  bool converged = false;
  bool idle = false;  // zero numerator and denominator: nothing to allocate
  std::vector<DinkelbachStep> history;
};

// Iterative ratio maximization: solve the subtractive problem at the current
// factor, move the factor to the achieved ratio, stop when it settles.
//
//   solve(eta, warm) -> Sol   maximizes weight*(num - eta*den) + bonus
//   value(sol)       -> {numerator, denominator}
//   bonus(sol)       -> factor-independent additive part (detection rewards)
//
// A candidate replaces the warm solution only when it improves the weighted
// objective without lowering the subtractive value num - eta*den. The second
// condition costs a little optimality when the bonus trades against the
// ratio, but it makes the factor sequence exactly non-decreasing, and a
// rejected candidate turns the iteration into an exact fixed point.
template <class Sol, class Solve, class Value, class Bonus>
DinkelbachResult<Sol> dinkelbach_drive(Solve&& solve, Value&& value, Bonus&& bonus, Sol init,
                                       bool init_feasible, double weight, int j_max,
                                       double eps2) {
  DinkelbachResult<Sol> res;
  res.solution = std::move(init);
  auto [num, den] = value(res.solution);
  double bon = bonus(res.solution);
  bool have_feasible = init_feasible;
  double eta = 0.0;

  for (int j = 0; j < j_max; ++j) {
    Sol candidate = solve(eta, res.solution);
    auto [cnum, cden] = value(candidate);
    const double cbon = bonus(candidate);
    const double warm_sub = num - eta * den;
    const double cand_sub = cnum - eta * cden;
    const bool better = weight * cand_sub + cbon > weight * warm_sub + bon;
    if (!have_feasible || (better && cand_sub >= warm_sub)) {
      res.solution = std::move(candidate);
      num = cnum;
      den = cden;
      bon = cbon;
      have_feasible = true;
    }
    res.iterations = j + 1;
    if (den <= 0.0) {
      res.idle = (num <= 0.0);
      res.eta = 0.0;
      res.history.push_back({num, den, eta});
      res.converged = res.idle;
      return res;
    }
    // The acceptance rule guarantees the ratio cannot drop; the max() only
    // absorbs division rounding in the converged regime.
    const double next_eta = std::max(num / den, eta);
    res.history.push_back({num, den, eta});
    // Terminal condition in residual form: the subtractive value achieved at
    // the current factor, scaled so sub-watt denominators are not penalized.
    if (std::abs(num - eta * den) <= eps2 * std::max(1.0, den)) {
      res.eta = next_eta;
      res.converged = true;
      return res;
    }
    eta = next_eta;
  }
  res.eta = eta;
  return res;
}

// Plain ratio maximization without an additive part.
template <class Sol, class Solve, class Value>
DinkelbachResult<Sol> dinkelbach_drive(Solve&& solve, Value&& value, Sol init, int j_max,
                                       double eps2) {
  return dinkelbach_drive(std::forward<Solve>(solve), std::forward<Value>(value),
                          [](const Sol&) { return 0.0; }, std::move(init), true, 1.0, j_max,
                          eps2);
}

}  // namespace simisac
