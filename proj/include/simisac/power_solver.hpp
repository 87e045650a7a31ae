// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <string>
#include <vector>

#include "simisac/types.hpp"

namespace simisac {

// One allocated (user, RB) power variable. Rate entries contribute
// weight * log2(1 + gain * p) to the objective and to their group's floor;
// entries with in_rate = false (sensing-only RBs) are pure cost and sit at
// their lower bound. Lower bounds encode the beampattern requirement.
struct PowerEntry {
  int group = -1;      // floor group (user), or -1
  double gain = 0.0;   // 1/W
  double weight = 0.0; // bits/s per log2 unit
  double lb = 0.0;     // W
  bool in_rate = true;
  double rate_offset = 0.0;  // bits/s subtracted from this entry's true rate (FBL penalty)
};

struct PowerProblem {
  std::vector<PowerEntry> entries;
  rvec floor;  // per group, bits/s (true clamped rates must reach this)
  std::vector<std::string> floor_name;
  double budget = 0.0;
  double eta = 0.0;  // power price from the fractional transform
};

struct PowerSolution {
  rvec p;
  double objective = 0.0;      // sum of true rates minus eta * total power
  double sum_rate = 0.0;       // true (clamped) rates
  double total_power = 0.0;
  double kkt_residual = 0.0;   // scaled; see solver notes
  rvec mu;                     // floor multipliers
  double nu = 0.0;             // budget multiplier
};

// Water-filling with per-group floor multipliers and a budget multiplier,
// each resolved by bisection. Entries whose dispersion-adjusted rate would be
// negative at the optimum are dropped (power zero) and the reduced problem is
// re-solved, so reported rates are exact. Throws InfeasibleError naming the
// binding floor when the floors and lower bounds exceed the budget.
PowerSolution solve_power(const PowerProblem& prob);

// True rate of entry e at power p: max(0, weight*log2(1+gain*p) - rate_offset).
double entry_rate(const PowerEntry& e, double p);

}  // namespace simisac
