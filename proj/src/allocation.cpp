// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#include "simisac/allocation.hpp"

namespace simisac {

double total_power_embb(const imat& alpha, const rmat& p_embb) {
  double total = 0.0;
  for (int i = 0; i < alpha.rows(); ++i)
    for (int c = 0; c < alpha.cols(); ++c) total += alpha(i, c) * p_embb(i, c);
  return total;
}

double total_power_urllc(const imat& beta, const imat& rho, const imat& z, const rmat& p_urllc) {
  double total = 0.0;
  for (int i = 0; i < beta.rows(); ++i)
    for (int c = 0; c < beta.cols(); ++c)
      total += (beta(i, c) + rho(i, c) - z(i, c)) * p_urllc(i, c);
  return total;
}

std::vector<std::string> check_allocation(const AllocationState& st, double p_max) {
  std::vector<std::string> v;
  auto binary = [&v](const imat& m, const std::string& name) {
    for (int i = 0; i < m.rows(); ++i)
      for (int c = 0; c < m.cols(); ++c)
        if (m(i, c) != 0 && m(i, c) != 1) v.push_back(name + " not binary");
  };
  binary(st.alpha, "alpha");
  binary(st.beta, "beta");
  binary(st.rho, "rho");
  binary(st.z, "z");

  for (int c = 0; c < st.alpha.cols(); ++c)
    if (st.alpha.col(c).sum() > 1) v.push_back("alpha column sum exceeds 1 (rb " + std::to_string(c) + ")");
  for (int c = 0; c < st.beta.cols(); ++c)
    if (st.beta.col(c).sum() > 1) v.push_back("beta column sum exceeds 1 (rb " + std::to_string(c) + ")");
  for (int c = 0; c < st.rho.cols(); ++c)
    if (st.rho.col(c).sum() > 1) v.push_back("rho column sum exceeds 1 (rb " + std::to_string(c) + ")");
  for (int i = 0; i < st.rho.rows(); ++i)
    if (st.rho.row(i).sum() > 1) v.push_back("rho row sum exceeds 1 (target " + std::to_string(i) + ")");
  for (int i = 0; i < st.z.rows(); ++i)
    for (int c = 0; c < st.z.cols(); ++c)
      if (st.z(i, c) != st.beta(i, c) * st.rho(i, c))
        v.push_back("z != beta*rho at (" + std::to_string(i) + "," + std::to_string(c) + ")");

  auto powers = [&v](const imat& active, const rmat& p, const std::string& name) {
    for (int i = 0; i < p.rows(); ++i)
      for (int c = 0; c < p.cols(); ++c) {
        if (p(i, c) < 0.0) v.push_back(name + " negative power");
        if (active(i, c) == 0 && p(i, c) != 0.0) v.push_back(name + " power on inactive entry");
      }
  };
  powers(st.alpha, st.p_embb, "p_embb");
  imat active_u = st.beta.cwiseMax(st.rho);
  powers(active_u, st.p_urllc, "p_urllc");

  const double total =
      total_power_embb(st.alpha, st.p_embb) + total_power_urllc(st.beta, st.rho, st.z, st.p_urllc);
  if (total > p_max * (1.0 + 1e-9)) v.push_back("total power exceeds p_max");
  return v;
}

}  // namespace simisac
