// SPDX-License-Identifier: Apache-2.0
// simisac -- energy-efficient scheduling for metasurface-aided ISAC downlinks.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace simisac {

template <class Scalar>
using dense_matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using dense_vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using cplx = std::complex<double>;
using cmat = dense_matrix<cplx>;
using cvec = dense_vector<cplx>;
using rmat = dense_matrix<double>;
using rvec = dense_vector<double>;
using imat = dense_matrix<int>;
using ivec = dense_vector<int>;

// Infeasible subproblem: carries the violated constraint set so callers can
// record it or fall back.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(std::string what, std::vector<std::string> violated)
      : std::runtime_error(std::move(what)), violated_(std::move(violated)) {}

  const std::vector<std::string>& violated() const { return violated_; }

 private:
  std::vector<std::string> violated_;
};

}  // namespace simisac
