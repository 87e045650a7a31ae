// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <string>
#include <vector>

#include "simisac/types.hpp"

namespace simisac {

// Binary RB maps and power maps for one slot/mini-slot. alpha is the per-slot
// eMBB map; beta (communication), rho (sensing) and z = beta AND rho are
// per-mini-slot URLLC maps. Powers are zero wherever the matching indicator
// is zero.
struct AllocationState {
  imat alpha;    // U_e x C
  imat beta;     // U_u x C
  imat rho;      // U_u x C
  imat z;        // U_u x C
  rmat p_embb;   // U_e x C, W
  rmat p_urllc;  // U_u x C, W
};

double total_power_embb(const imat& alpha, const rmat& p_embb);

// sum (beta + rho - z) * p: an RB both punctured and sensed by the same user
// is powered once.
double total_power_urllc(const imat& beta, const imat& rho, const imat& z, const rmat& p_urllc);

// Exact binary/budget feasibility: OFDMA exclusivity per map, at most one
// sensing RB per target, z = beta*rho elementwise, total power within p_max,
// powers nonnegative and zero on inactive entries. Returns violations.
std::vector<std::string> check_allocation(const AllocationState& st, double p_max);

}  // namespace simisac
