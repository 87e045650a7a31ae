// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include "simisac/phase_solver.hpp"

#include <algorithm>
#include <cmath>

namespace simisac {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

struct Evaluated {
  std::vector<double> x;     // link gains
  std::vector<double> rate;  // clamped rates per rate term
};

Evaluated evaluate_links(const PhaseProblem& prob, const cmat& transfer) {
  Evaluated ev;
  ev.x.resize(prob.links.size());
  for (size_t k = 0; k < prob.links.size(); ++k) {
    const PhaseLink& lk = prob.links[k];
    const cplx e = lk.probe.dot(transfer.col(lk.col));
    ev.x[k] = lk.p_lin * std::norm(e);
  }
  ev.rate.resize(prob.rate_terms.size());
  for (size_t t = 0; t < prob.rate_terms.size(); ++t) {
    const PhaseRateTerm& rt = prob.rate_terms[t];
    const double se = std::log2(1.0 + ev.x[static_cast<size_t>(rt.link)]) - rt.dispersion;
    ev.rate[t] = rt.weight * std::max(0.0, se);
  }
  return ev;
}

}  // namespace

double phase_objective(const PhaseProblem& prob, const cmat& transfer) {
  const Evaluated ev = evaluate_links(prob, transfer);
  double f = 0.0;
  for (int t : prob.objective_terms) f += ev.rate[static_cast<size_t>(t)];
  for (const auto& fl : prob.floors) {
    double r = 0.0;
    for (int t : fl.terms) r += ev.rate[static_cast<size_t>(t)];
    f -= prob.zeta * std::max(0.0, fl.floor - r);
  }
  for (const auto& gf : prob.gain_floors) {
    double x = 0.0;
    for (int k : gf.links) x += ev.x[static_cast<size_t>(k)];
    f -= prob.zeta * gf.scale * std::max(0.0, 1.0 - x / gf.threshold);
  }
  return f;
}

rmat phase_gradient(const PhaseProblem& prob, const SimPhases& phases,
                    const PropagationMatrices& prop) {
  const int layers = prop.num_layers();
  const int atoms = static_cast<int>(prop.psi[0].rows());
  const int cols = static_cast<int>(prop.psi[0].cols());

  // Forward partial products: fwd[l] = Psi^(l) Phi^(l-1) ... Psi^(1), M x N.
  std::vector<cmat> fwd(static_cast<size_t>(layers));
  fwd[0] = prop.psi[0];
  for (int l = 1; l < layers; ++l) {
    fwd[static_cast<size_t>(l)] =
        prop.psi[static_cast<size_t>(l)] * (phases.coeffs(l - 1).asDiagonal() * fwd[static_cast<size_t>(l - 1)]);
  }
  const cmat transfer = phases.coeffs(layers - 1).asDiagonal() * fwd[static_cast<size_t>(layers - 1)];

  // Backward partial products: bwd[l] such that Theta = bwd[l] Phi^(l) fwd[l].
  std::vector<cmat> bwd(static_cast<size_t>(layers));
  bwd[static_cast<size_t>(layers - 1)] = cmat::Identity(atoms, atoms);
  for (int l = layers - 2; l >= 0; --l) {
    bwd[static_cast<size_t>(l)] = (bwd[static_cast<size_t>(l + 1)] *
                                   phases.coeffs(l + 1).asDiagonal()) *
                                  prop.psi[static_cast<size_t>(l + 1)];
  }

  const Evaluated ev = evaluate_links(prob, transfer);

  // d f / d x_k, including active penalty branches.
  std::vector<double> dfdx(prob.links.size(), 0.0);
  std::vector<double> term_coeff(prob.rate_terms.size(), 0.0);
  for (int t : prob.objective_terms) term_coeff[static_cast<size_t>(t)] += 1.0;
  for (const auto& fl : prob.floors) {
    double r = 0.0;
    for (int t : fl.terms) r += ev.rate[static_cast<size_t>(t)];
    if (r < fl.floor) {
      for (int t : fl.terms) term_coeff[static_cast<size_t>(t)] += prob.zeta;
    }
  }
  for (size_t t = 0; t < prob.rate_terms.size(); ++t) {
    if (term_coeff[t] == 0.0) continue;
    const PhaseRateTerm& rt = prob.rate_terms[t];
    const double x = ev.x[static_cast<size_t>(rt.link)];
    if (std::log2(1.0 + x) - rt.dispersion <= 0.0) continue;  // clamped branch
    dfdx[static_cast<size_t>(rt.link)] += term_coeff[t] * rt.weight / ((1.0 + x) * kLn2);
  }
  for (const auto& gf : prob.gain_floors) {
    double x = 0.0;
    for (int k : gf.links) x += ev.x[static_cast<size_t>(k)];
    if (x < gf.threshold) {
      for (int k : gf.links) dfdx[static_cast<size_t>(k)] += prob.zeta * gf.scale / gf.threshold;
    }
  }

  // Wirtinger accumulation: df = 2 Re tr(G^H dTheta) with
  // G[:, col] += dfdx * p_lin * (probe^H Theta_col) * probe.
  cmat g = cmat::Zero(atoms, cols);
  for (size_t k = 0; k < prob.links.size(); ++k) {
    if (dfdx[k] == 0.0) continue;
    const PhaseLink& lk = prob.links[k];
    const cplx e = lk.probe.dot(transfer.col(lk.col));
    g.col(lk.col) += (dfdx[k] * lk.p_lin) * (e * lk.probe);
  }

  // Per layer: grad theta_m = 2 Re( j phi_m * (fwd[l] G^H bwd[l])_{mm} ).
  rmat grad(layers, atoms);
  const cmat gh = g.adjoint();
  for (int l = 0; l < layers; ++l) {
    const cmat k = fwd[static_cast<size_t>(l)] * gh;  // M x M
    const cvec phi = phases.coeffs(l);
    for (int m = 0; m < atoms; ++m) {
      const cplx diag =
          k.row(m).cwiseProduct(bwd[static_cast<size_t>(l)].col(m).transpose()).sum();
      grad(l, m) = 2.0 * (cplx(0.0, 1.0) * phi[m] * diag).real();
    }
  }
  return grad;
}

SimPhases solve_phases(const PhaseProblem& prob, const PropagationMatrices& prop,
                       const SimPhases& init, double step0, int max_iters, PgaDiag* diag) {
  SimPhases cur = init;
  double f_cur = phase_objective(prob, assemble_transfer(cur, prop));
  PgaDiag local;
  local.initial_objective = f_cur;
  local.evaluations = 1;

  double step = step0;
  for (int iter = 0; iter < max_iters; ++iter) {
    const rmat grad = phase_gradient(prob, cur, prop);
    const double gmax = grad.cwiseAbs().maxCoeff();
    if (!(gmax > 1e-300)) break;  // stationary (or empty objective)

    bool accepted = false;
    while (step >= 1e-7) {
      SimPhases cand = cur;
      cand.theta += (step / gmax) * grad;
      const double f_cand = phase_objective(prob, assemble_transfer(cand, prop));
      ++local.evaluations;
      if (f_cand > f_cur) {
        cand.wrap();
        cur = std::move(cand);
        f_cur = f_cand;
        step = std::min(step * 1.5, 0.8);
        accepted = true;
        ++local.accepted;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  local.final_objective = f_cur;
  if (diag) *diag = local;
  return cur;
}

}  // namespace simisac
