#pragma once

// Primal-dual interior-point method for small dense conic programs
//
//   minimize   <C, X> + c_lin' x + c_free' u
//   subject to <A_k, X> + G(k,:) x + H(k,:) u = b_k,   k = 1..K
//              X psd (m x m), x >= 0 (q), u free (r)
//
// with dual
//
//   maximize   b' y
//   subject to C - sum_k y_k A_k = Z psd,  c_lin - G' y = z >= 0,
//              H' y = c_free.
//
// Search directions use Nesterov-Todd scaling on the semidefinite block and
// a Mehrotra predictor-corrector step.

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace kstab::detail {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

struct ConicProgram {
  Index psd_dim = 0;
  std::vector<MatrixXd> A;  // symmetric psd_dim x psd_dim, one per constraint
  MatrixXd G;               // K x q
  MatrixXd H;               // K x r
  VectorXd b;
  MatrixXd C;
  VectorXd c_lin;
  VectorXd c_free;

  Index num_constraints() const { return b.size(); }
  Index lin_dim() const { return G.cols(); }
  Index free_dim() const { return H.cols(); }
};

struct IpmOptions {
  double tol = 1e-10;
  int max_iter = 200;
  double step_fraction = 0.98;
};

enum class IpmStatus { Optimal, MaxIterations, Stalled, NumericalBreakdown };

struct IpmResult {
  IpmStatus status = IpmStatus::NumericalBreakdown;
  MatrixXd X, Z;
  VectorXd x, z, u, y;
  double primal_objective = 0.0;
  double dual_objective = 0.0;
  double primal_infeasibility = 0.0;  // relative
  double dual_infeasibility = 0.0;    // relative
  double gap = 0.0;                   // relative
  int iterations = 0;
  std::string message;
};

IpmResult solve_conic(const ConicProgram& prog, const IpmOptions& opts);

}  // namespace kstab::detail
