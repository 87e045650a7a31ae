// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include "simisac/aoi.hpp"

#include <stdexcept>

namespace simisac {

AoiState step_aoi(const AoiState& state, const ivec& detected) {
  if (detected.size() != state.age.size())
    throw std::invalid_argument("step_aoi: size mismatch");
  AoiState next;
  next.age.resize(state.age.size());
  for (int i = 0; i < state.age.size(); ++i) {
    if (detected[i] != 0 && detected[i] != 1)
      throw std::invalid_argument("step_aoi: a target may be detected on at most one RB");
    next.age[i] = state.age[i] + 1 - detected[i] * state.age[i];
  }
  return next;
}

VirtualQueues update_virtual_queue(const VirtualQueues& queues, const ivec& new_age,
                                   const ivec& aoi_max) {
  if (new_age.size() != queues.backlog.size() || aoi_max.size() != queues.backlog.size())
    throw std::invalid_argument("update_virtual_queue: size mismatch");
  VirtualQueues next;
  next.backlog.resize(queues.backlog.size());
  for (int i = 0; i < queues.backlog.size(); ++i) {
    next.backlog[i] = std::max(0.0, queues.backlog[i] + new_age[i] - aoi_max[i]);
  }
  return next;
}

DppWeight dpp_weight(const VirtualQueues& queues, const AoiState& state, int target, int aoi_max) {
  const double u = queues.backlog[target];
  const double age = static_cast<double>(state.age[target]);
  return DppWeight{u * age, u * (1.0 + age - aoi_max)};
}

double average_aoi(const std::vector<ivec>& age_history, int target) {
  if (age_history.empty()) throw std::invalid_argument("average_aoi: empty history");
  double sum = 0.0;
  for (const auto& ages : age_history) sum += ages[target];
  return sum / static_cast<double>(age_history.size());
}

}  // namespace simisac
