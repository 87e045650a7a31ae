// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <vector>

#include "simisac/sim_physics.hpp"
#include "simisac/types.hpp"

namespace simisac {

// Objective over the metasurface phases, built from quadratic link terms
//   x_k = p_lin * |probe^H Theta[:, col]|^2
// (an SNR when probe is a channel and p_lin = p/noise, a beampattern
// contribution when probe is a steering vector and p_lin = p).
struct PhaseLink {
  cvec probe;
  int col = 0;
  double p_lin = 0.0;
};

// r = weight * max(0, log2(1 + x) - dispersion)
struct PhaseRateTerm {
  int link = 0;
  double weight = 0.0;
  double dispersion = 0.0;
};

struct PhaseProblem {
  std::vector<PhaseLink> links;
  std::vector<PhaseRateTerm> rate_terms;
  std::vector<int> objective_terms;  // rate terms summed into the objective

  // zeta * [floor - sum of member rates]^+
  struct RateFloor {
    std::vector<int> terms;
    double floor = 0.0;
  };
  std::vector<RateFloor> floors;

  // zeta * scale * [1 - sum of member link gains / threshold]^+  (the
  // beampattern requirement, in violation-fraction units so one penalty
  // weight covers both constraint families)
  struct GainFloor {
    std::vector<int> links;
    double threshold = 0.0;
    double scale = 0.0;
  };
  std::vector<GainFloor> gain_floors;

  double zeta = 0.0;
};

double phase_objective(const PhaseProblem& prob, const cmat& transfer);

// Exact gradient of the objective with respect to every phase angle,
// obtained from the Wirtinger derivative through the cascaded layer product.
rmat phase_gradient(const PhaseProblem& prob, const SimPhases& phases,
                    const PropagationMatrices& prop);

struct PgaDiag {
  int accepted = 0;
  int evaluations = 0;
  double initial_objective = 0.0;
  double final_objective = 0.0;
};

// Monotone ascent: step along the gradient in angle space (which is the
// projected update, since angles parameterize the unit circle exactly),
// halving the trial step until the objective improves and growing it on
// success. Returns the best iterate visited.
SimPhases solve_phases(const PhaseProblem& prob, const PropagationMatrices& prop,
                       const SimPhases& init, double step0, int max_iters,
                       PgaDiag* diag = nullptr);

}  // namespace simisac
