#pragma once

#include <Eigen/Dense>
#include <vector>

#include "isaccoop/common.hpp"

namespace isaccoop {

/// Small dense Hermitian semidefinite program:
///   minimize    tr(C X)
///   subject to  tr(A_k X) >= b_k        (k = 0..)
///               tr(B_j X) <= d_j        (j = 0..)
///               X Hermitian PSD
/// solved with a log-barrier interior-point method.  Intended for blocks of
/// at most ~16x16; everything is dense.
struct SdpProblem {
  Eigen::MatrixXcd objective;                 // C, Hermitian
  std::vector<Eigen::MatrixXcd> lower_mats;   // A_k
  std::vector<double> lower_bounds;           // b_k
  std::vector<Eigen::MatrixXcd> upper_mats;   // B_j
  std::vector<double> upper_bounds;           // d_j
};

struct SdpOptions {
  double t_initial = 1.0;
  double t_multiplier = 20.0;
  double gap_tolerance = 1e-11;  // relative duality-measure target
  int max_newton_steps = 400;
};

struct SdpSolution {
  Eigen::MatrixXcd x;        // strictly feasible primal iterate
  double objective = 0.0;    // tr(C x)
  double gap = 0.0;          // certified suboptimality of `objective`
  int newton_steps = 0;
};

SdpSolution solve_sdp(const SdpProblem& problem, const SdpOptions& options = {});

}  // namespace isaccoop
