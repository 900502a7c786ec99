#pragma once

// Small dense semidefinite programs: strict-feasibility search with a margin
// variable, scalar maximization, Farkas rays for infeasible systems, and
// interior-direction search for pencils.

#include <optional>
#include <string>
#include <vector>

#include "kstab/model.hpp"

namespace kstab::sdp {

/// <A, X> + g * nu = b
struct Constraint {
  SymMatrix A;
  double g = 0.0;
  double b = 0.0;
};

enum class Objective { MaximizeMargin, MaximizeNu };

struct SdpProblem {
  Index block_dim = 0;
  bool has_scalar = false;
  std::vector<Constraint> constraints;
  Objective objective = Objective::MaximizeMargin;
};

enum class Status { Feasible, Infeasible, Inconclusive };

std::string to_string(Status s);

/// y with sum_k y_k A_k >= tau I, tau > 0 (or tau = 0 for a purely linear
/// inconsistency), sum_k y_k b_k < 0 and sum_k y_k g_k = 0.
struct FarkasRay {
  VectorXd y;
  double tau = 0.0;
  double bty = 0.0;
};

struct SdpSolution {
  SymMatrix X;
  double nu = 0.0;
  Status status = Status::Inconclusive;
  double margin = 0.0;    // smallest eigenvalue of X
  double residual = 0.0;  // max |<A_k, X> + g_k nu - b_k|
  double lambda = 0.0;    // optimal margin variable in feasibility mode
  int iterations = 0;
  std::optional<FarkasRay> farkas;
  std::string message;
};

struct Options {
  double feas_tol = 1e-8;  // min-eigenvalue slack for Feasible
  double res_tol = 1e-8;   // relative to 1 + max |b_k|
  double ipm_tol = 1e-11;
  int max_iter = 200;
  double trace_cap = 0.0;  // 0 selects 1e3 * block_dim
};

/// Dispatches on the problem objective. Margin mode runs feasibility() with
/// opts.trace_cap.
SdpSolution solve(const SdpProblem& p, const Options& opts = {});

/// maximize lambda s.t. constraints, X >= lambda I, trace(X) <= trace_cap.
/// Feasible when the optimal lambda is >= -feas_tol; Infeasible only with a
/// verified Farkas ray attached.
SdpSolution feasibility(const SdpProblem& p, double trace_cap, const Options& opts = {});

/// Max constraint violation of (X, nu), recomputed from the problem data.
double constraint_residual(const SdpProblem& p, const SymMatrix& X, double nu);

/// Rechecks a Farkas ray against the original data. Returns the verified
/// positivity margin, or nullopt if the ray is not a certificate.
std::optional<double> verify_farkas(const SdpProblem& p, const FarkasRay& ray);

struct InteriorDirection {
  VectorXd e;
  double margin = 0.0;  // smallest eigenvalue of sum_j A_j e_j, recomputed
  Status status = Status::Inconclusive;
};

/// Maximizes the smallest eigenvalue of sum_j A_j e_j over the box
/// |e_j| <= 1. Feasible iff the margin exceeds 1e-7.
InteriorDirection find_interior_direction(const SymPencil& p, const Options& opts = {});
InteriorDirection find_interior_direction(const MatrixPencil& p, const Options& opts = {});

/// True iff no nonzero w with pencil(w) >= 0 satisfies direction' w = 0,
/// i.e. the slice {x in K : direction' x = 1} is bounded. Decided through the
/// alternative: some Y > 0 with <A_j, Y> proportional to direction_j.
bool slice_bounded(const SymPencil& p, const VectorXd& direction, const Options& opts = {});

}  // namespace kstab::sdp
