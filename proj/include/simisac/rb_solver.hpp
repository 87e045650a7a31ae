// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <string>
#include <vector>

#include "simisac/types.hpp"

namespace simisac {

struct RbDiag {
  long nodes = 0;
  bool exact = true;
};

// Binary RB assignment for eMBB at fixed powers and phases. Each RB carries
// at most one user; the chosen set must cover per-user rate floors within the
// power budget. `utility` is the subtractive-objective contribution of an
// assignment (rate minus priced power).
struct EmbbRbInstance {
  rmat utility;     // U_e x C
  rmat rate;        // U_e x C, bits/s if assigned at the candidate power
  rmat rate_cap;    // U_e x C, bits/s reachable with concentrated power;
                    // floor feasibility uses this (empty: same as rate)
  rmat power;       // U_e x C, W if assigned
  rvec rate_floor;  // per user, bits/s
  double power_budget = 0.0;

  const rmat& cap() const { return rate_cap.size() ? rate_cap : rate; }
};

struct EmbbRbSolution {
  imat alpha;
  double objective = 0.0;
  RbDiag diag;
};

// Exact depth-first branch and bound when U_e * C <= 64 binary variables,
// greedy construction plus 1-swap local search above that. Deterministic:
// ties break lexicographically by (user, RB). Throws InfeasibleError when the
// rate floors are unreachable.
EmbbRbSolution solve_rb_embb(const EmbbRbInstance& inst, const imat* warm = nullptr);

// Exhaustive enumeration over all admissible maps; test oracle only.
double brute_force_rb_embb(const EmbbRbInstance& inst);

// Joint URLLC communication (beta) and sensing (rho) assignment for one
// mini-slot at fixed powers and phases, maximizing
//   v * sum(rate - eta*power over beta) - v * eta * (extra sensing power)
//   + sum over newly detected targets of detect_reward
// subject to OFDMA exclusivity, one sensing RB per target, per-user rate
// floors, the beampattern threshold for scheduled sensing pairs, the residual
// power budget, and the surviving eMBB slack consumed by puncturing.
struct UrllcRbInstance {
  rmat rate;             // U_u x C, bits/s if beta set at the candidate power
  rmat rate_cap;         // U_u x C, floor feasibility bound (empty: same as rate)
  rmat power;            // U_u x C, W drawn by a communication entry
  rmat sense_power;      // U_u x C, W a sensing activation draws (its
                         // beampattern-required floor); a jointly used RB is
                         // powered once at the larger of the two
  rvec rate_floor;       // per user; 0 imposes nothing
  std::vector<std::string> floor_name;  // label used in infeasibility reports
  rvec detect_reward;    // per target: queue backlog * current age
  rmat sense_gain;       // U_u x U_u: gain toward target i per W of user j
  rvec sense_threshold;  // per target: threshold * pathloss^2
  double v = 1.0;
  double eta = 0.0;
  double power_budget = 0.0;
  ivec rb_owner;         // per RB: eMBB owner or -1
  rvec puncture_cost;    // per RB: owner rate lost if punctured now
  rvec owner_slack;      // per eMBB user: rate slack left above its floor

  const rmat& cap() const { return rate_cap.size() ? rate_cap : rate; }
};

struct UrllcRbSolution {
  imat beta;
  imat rho;
  imat z;
  double objective = 0.0;
  RbDiag diag;
};

UrllcRbSolution solve_rb_urllc(const UrllcRbInstance& inst, const UrllcRbSolution* warm = nullptr);

double brute_force_rb_urllc(const UrllcRbInstance& inst);

}  // namespace simisac
