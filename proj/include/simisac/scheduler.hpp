// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "simisac/allocation.hpp"
#include "simisac/aoi.hpp"
#include "simisac/channel.hpp"
#include "simisac/dinkelbach.hpp"
#include "simisac/phase_solver.hpp"
#include "simisac/rb_solver.hpp"
#include "simisac/scenario.hpp"
#include "simisac/sim_physics.hpp"
#include "simisac/types.hpp"

namespace simisac {

enum class Baseline { proposed, random_sim, no_sim, comm_only };

std::string baseline_name(Baseline b);
Baseline baseline_from_name(const std::string& name);

// Users are served through transfer-matrix columns round-robin modulo the
// antenna count, independently per service.
struct ColumnMap {
  int num_columns = 1;
  int embb(int user) const { return user % num_columns; }
  int urllc(int user) const { return user % num_columns; }
};

// ---------------------------------------------------------------------------
// Slot-level eMBB solve
// ---------------------------------------------------------------------------

struct EmbbSlotInput {
  const ScenarioConfig* cfg = nullptr;
  const PropagationMatrices* prop = nullptr;  // null: no metasurface in the loop
  std::vector<std::vector<cvec>> h;           // [user][rb]
  std::vector<int> cols;                      // user -> transfer column
  SimPhases phases;                           // starting point
  bool optimize_phases = true;
  double budget = 0.0;
  rvec rate_floor;                            // per user, bits/s
};

struct SolveDiag {
  double eta = 0.0;
  int dinkelbach_iters = 0;
  bool dinkelbach_converged = false;
  bool idle = false;
  std::vector<DinkelbachStep> history;
  long bb_nodes = 0;
  bool bb_exact = true;
  double kkt_residual = 0.0;
  int pga_accepted = 0;
  bool fallback = false;
  double floor_scale = 1.0;
  std::vector<std::string> infeasible;  // constraints reported by failed attempts
  // Objective after each alternating cycle, one inner vector per subtractive
  // solve; the guards make every sequence non-decreasing.
  std::vector<std::vector<double>> ao_cycles;
};

struct EmbbSlotOutput {
  imat alpha;
  rmat p;
  SimPhases phases;
  double sum_rate = 0.0;   // at slot assumptions (no puncturing)
  double power = 0.0;
  SolveDiag diag;
};

// Double loop: fractional transform outside, alternating RB / power / phase
// updates inside, each stage guarded so the subtractive objective never
// decreases. Throws InfeasibleError when the rate floors cannot be met.
EmbbSlotOutput run_embb_slot(const EmbbSlotInput& in);

// ---------------------------------------------------------------------------
// Mini-slot URLLC + sensing solve
// ---------------------------------------------------------------------------

struct UrllcMiniSlotInput {
  const ScenarioConfig* cfg = nullptr;
  const PropagationMatrices* prop = nullptr;
  std::vector<std::vector<cvec>> h;  // URLLC channels [user][rb]
  std::vector<int> cols;             // URLLC user -> column
  SimPhases phases;                  // warm start from the slot solution
  bool optimize_phases = true;
  bool sensing_enabled = true;
  std::vector<cvec> steer;           // per target
  rvec sense_threshold;              // per target, linear threshold * pathloss^2
  rvec rate_floor;                   // per user, bits/s; 0 = no demand
  std::vector<std::string> floor_name;
  rvec detect_reward;                // per target, backlog * age
  double budget = 0.0;

  // eMBB coupling within the slot.
  imat alpha;
  rmat p_embb;
  std::vector<std::vector<cvec>> h_embb;
  std::vector<int> embb_cols;
  rvec embb_current_floor;  // per eMBB user: rate this mini-slot must retain, bits/s
  rvec owner_slack;         // per eMBB user: slack consumable by puncturing now
  rvec puncture_cost;       // per RB: owner rate lost if punctured this mini-slot
};

struct UrllcMiniSlotOutput {
  imat beta, rho, z;
  rmat p;
  SimPhases phases;
  double sum_rate = 0.0;
  double power = 0.0;
  rvec rate;  // per user
  SolveDiag diag;
};

UrllcMiniSlotOutput run_urllc_minislot(const UrllcMiniSlotInput& in);

// ---------------------------------------------------------------------------
// Episode
// ---------------------------------------------------------------------------

struct SlotRecord {
  int t = 0;
  imat alpha;
  rmat p_embb;
  double solver_ee = 0.0;    // fractional factor reached by the slot solve
  double realized_rate = 0.0;
  double realized_ee = 0.0;  // with the punctures and phases the slot actually saw
  double power = 0.0;
  rvec realized_user_rate;
  double c1_slack_min = 0.0;  // min realized rate minus floor across users
  SolveDiag diag;
};

struct MiniSlotRecord {
  int t = 0, tau = 0;
  imat beta, rho, z;
  rmat p_urllc;
  ivec arrivals;
  ivec detected;
  ivec age_after;
  rvec queue_after;
  rvec rate;
  double sum_rate = 0.0;
  double power = 0.0;
  double ee = 0.0;
  double floor_slack_min = 0.0;  // min (rate - floor) over demanded users
  double c5_slack_min = 0.0;     // min relative beampattern slack over scheduled pairs
  SolveDiag diag;
};

struct EpisodeTrace {
  std::uint64_t cfg_hash = 0;
  std::uint64_t seed = 0;
  Baseline baseline = Baseline::proposed;
  int num_slots = 0, minislots_per_slot = 0, num_embb = 0, num_urllc = 0;
  std::vector<SlotRecord> slots;
  std::vector<MiniSlotRecord> minislots;

  // (1/T) [sum_t EE_e(t) + sum_t sum_tau EE_u(t,tau)]
  double objective() const;
  double mean_ee_embb() const;
  double mean_ee_urllc() const;
  double avg_aoi(int target) const;
  double mean_backlog() const;
  double fallback_rate() const;
};

std::string serialize_trace(const EpisodeTrace& trace);
void write_trace(const EpisodeTrace& trace, const std::string& path);

EpisodeTrace run_episode(const ScenarioConfig& cfg, std::uint64_t seed,
                         Baseline baseline = Baseline::proposed);

}  // namespace simisac
