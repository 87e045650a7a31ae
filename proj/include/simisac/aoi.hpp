// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <vector>

#include "simisac/types.hpp"

namespace simisac {

// Per-target age in mini-slots. Starts at 0; after the first transition it is
// always >= 1 and resets to exactly 1 on detection.
struct AoiState {
  ivec age;

  static AoiState initial(int num_targets) { return AoiState{ivec::Zero(num_targets)}; }
};

// Lyapunov bookkeeping: backlog grows when the age exceeds its budget.
struct VirtualQueues {
  rvec backlog;

  static VirtualQueues initial(int num_targets) { return VirtualQueues{rvec::Zero(num_targets)}; }
};

// age' = age + 1 - detected * age; equivalent to "reset to 1 on detection,
// else increment". The same rule applies across slot boundaries. Rejects
// detected counts outside {0, 1}.
AoiState step_aoi(const AoiState& state, const ivec& detected);

// backlog' = max(0, backlog + age' - aoi_max), elementwise, using the
// post-decision age.
VirtualQueues update_virtual_queue(const VirtualQueues& queues, const ivec& new_age,
                                   const ivec& aoi_max);

// Coefficients of the per-mini-slot scheduling objective for one target:
// detecting target i now earns backlog * age; the detection-independent part
// backlog * (1 + age - aoi_max) is kept for bookkeeping.
struct DppWeight {
  double detect_reward;
  double constant;
};
DppWeight dpp_weight(const VirtualQueues& queues, const AoiState& state, int target, int aoi_max);

// Finite-horizon mean of a stored post-decision age sequence.
double average_aoi(const std::vector<ivec>& age_history, int target);

}  // namespace simisac
