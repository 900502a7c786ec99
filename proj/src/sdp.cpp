#include "kstab/sdp.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "conic_ipm.hpp"

namespace kstab::sdp {
namespace {

using detail::ConicProgram;
using detail::IpmOptions;
using detail::IpmResult;
using detail::IpmStatus;

constexpr double kSqrt2 = 1.4142135623730950488;

Index svec_size(Index m) { return m * (m + 1) / 2; }

VectorXd svec(const MatrixXd& X) {
  const Index m = X.rows();
  VectorXd v(svec_size(m));
  Index k = 0;
  for (Index j = 0; j < m; ++j)
    for (Index i = j; i < m; ++i) v(k++) = i == j ? X(i, j) : kSqrt2 * 0.5 * (X(i, j) + X(j, i));
  return v;
}

MatrixXd smat(const VectorXd& v, Index m) {
  MatrixXd X(m, m);
  Index k = 0;
  for (Index j = 0; j < m; ++j)
    for (Index i = j; i < m; ++i) {
      const double val = i == j ? v(k) : v(k) / kSqrt2;
      X(i, j) = X(j, i) = val;
      ++k;
    }
  return X;
}

// Constraints after orthonormalization of the stacked rows [svec(A_k), g_k].
struct Reduced {
  std::vector<MatrixXd> A;
  VectorXd g;
  VectorXd b;
  MatrixXd back;  // y_original = back * y_reduced
  bool consistent = true;
  VectorXd linear_ray;  // set when !consistent
};

void check_problem(const SdpProblem& p) {
  if (p.block_dim < 1) throw DimensionError("sdp: block_dim must be positive");
  if (p.constraints.empty()) throw DimensionError("sdp: constraint list is empty");
  for (const auto& c : p.constraints)
    if (c.A.rows() != p.block_dim || c.A.cols() != p.block_dim)
      throw DimensionError("sdp: constraint matrix size differs from block_dim");
}

Reduced reduce(const SdpProblem& p) {
  const Index m = p.block_dim;
  const Index K = Index(p.constraints.size());
  const Index N = svec_size(m) + (p.has_scalar ? 1 : 0);
  MatrixXd rows(K, N);
  VectorXd b(K);
  for (Index k = 0; k < K; ++k) {
    const auto& c = p.constraints[std::size_t(k)];
    rows.row(k).head(svec_size(m)) = svec(c.A).transpose();
    if (p.has_scalar) rows(k, N - 1) = c.g;
    b(k) = c.b;
  }
  Eigen::JacobiSVD<MatrixXd> svd(rows, Eigen::ComputeFullU | Eigen::ComputeThinV);
  const VectorXd& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  Index r = 0;
  while (r < s.size() && s(r) > 1e-10 * std::max(1.0, smax)) ++r;

  Reduced red;
  const MatrixXd U = svd.matrixU();
  const MatrixXd Ur = U.leftCols(r);
  const VectorXd b_perp = b - Ur * (Ur.transpose() * b);
  if (b_perp.norm() > 1e-9 * (1.0 + b.norm())) {
    red.consistent = false;
    red.linear_ray = -b_perp;
    return red;
  }
  const MatrixXd Vr = svd.matrixV().leftCols(r);
  const VectorXd sr = s.head(r);
  red.b = (Ur.transpose() * b).cwiseQuotient(sr);
  red.back = Ur * sr.cwiseInverse().asDiagonal();
  red.g = p.has_scalar ? VectorXd(Vr.row(N - 1).transpose()) : VectorXd::Zero(r);
  for (Index k = 0; k < r; ++k) red.A.push_back(smat(Vr.col(k).head(svec_size(m)), m));
  return red;
}

IpmOptions ipm_options(const Options& o) {
  IpmOptions io;
  io.tol = o.ipm_tol;
  io.max_iter = o.max_iter;
  return io;
}

// The IPM often stops one notch short of its own tolerance on degenerate
// problems; the decisions below only need modest accuracy because every
// answer is rechecked against the original data. Non-optimal results carry
// the best iterate's metrics.
bool usable(const IpmResult& r) {
  if (r.status == IpmStatus::Optimal) return true;
  return r.primal_infeasibility <= 1e-8 && r.dual_infeasibility <= 1e-8 && r.gap <= 1e-7;
}

double max_abs_b(const SdpProblem& p) {
  double m = 0.0;
  for (const auto& c : p.constraints) m = std::max(m, std::abs(c.b));
  return m;
}

// Searches for y' with sum y'_k A'_k >= tau I, b'.y' + tau <= 0, bounded trace,
// and g'.y' = 0, maximizing tau. Returns the ray in original coordinates.
std::optional<FarkasRay> farkas_search(const SdpProblem& p, const Reduced& red,
                                       const Options& opts) {
  const Index m = p.block_dim;
  const Index r = Index(red.A.size());
  ConicProgram prog;
  prog.psd_dim = m;
  for (Index k = 0; k < r; ++k) prog.A.push_back(-red.A[std::size_t(k)]);
  prog.A.push_back(MatrixXd::Identity(m, m));
  prog.b = VectorXd::Zero(r + 1);
  prog.b(r) = 1.0;
  prog.C = MatrixXd::Zero(m, m);
  prog.G = MatrixXd::Zero(r + 1, 2);
  prog.c_lin = VectorXd::Zero(2);
  for (Index k = 0; k < r; ++k) {
    prog.G(k, 0) = red.b(k);
    prog.G(k, 1) = red.A[std::size_t(k)].trace();
  }
  prog.G(r, 0) = 1.0;
  prog.c_lin(1) = double(m);
  if (p.has_scalar) {
    prog.H = MatrixXd::Zero(r + 1, 1);
    prog.H.col(0).head(r) = red.g;
    prog.c_free = VectorXd::Zero(1);
  } else {
    prog.H = MatrixXd::Zero(r + 1, 0);
    prog.c_free = VectorXd::Zero(0);
  }
  const IpmResult res = detail::solve_conic(prog, ipm_options(opts));
  if (res.y.size() != r + 1 || !(res.y(r) > 0.0)) return std::nullopt;

  FarkasRay ray;
  ray.y = red.back * res.y.head(r);
  if (p.has_scalar) {
    VectorXd g(p.constraints.size());
    for (std::size_t k = 0; k < p.constraints.size(); ++k) g(Index(k)) = p.constraints[k].g;
    if (g.squaredNorm() > 0.0) ray.y -= (g.dot(ray.y) / g.squaredNorm()) * g;
  }
  const auto verified = verify_farkas(p, ray);
  if (!verified) return std::nullopt;
  ray.tau = *verified;
  ray.bty = 0.0;
  for (std::size_t k = 0; k < p.constraints.size(); ++k)
    ray.bty += ray.y(Index(k)) * p.constraints[k].b;
  return ray;
}

SdpSolution finish(const SdpProblem& p, SdpSolution sol) {
  sol.residual = constraint_residual(p, sol.X, sol.nu);
  sol.margin = min_eigenvalue(sol.X);
  return sol;
}

bool meets_tolerances(const SdpProblem& p, const SdpSolution& sol, const Options& opts) {
  return sol.residual <= opts.res_tol * (1.0 + max_abs_b(p)) && sol.margin >= -opts.feas_tol;
}

SdpSolution linear_infeasible(const SdpProblem& p, const Reduced& red) {
  SdpSolution sol;
  sol.X = MatrixXd::Zero(p.block_dim, p.block_dim);
  FarkasRay ray;
  ray.y = red.linear_ray;
  ray.tau = 0.0;
  VectorXd b(p.constraints.size());
  for (std::size_t k = 0; k < p.constraints.size(); ++k) b(Index(k)) = p.constraints[k].b;
  ray.bty = b.dot(ray.y);
  sol.farkas = ray;
  sol.status = Status::Infeasible;
  sol.message = "equality constraints are inconsistent";
  return sol;
}

SdpSolution maximize_nu(const SdpProblem& p, const Options& opts) {
  if (!p.has_scalar) throw DimensionError("sdp: MaximizeNu requires has_scalar");
  const Reduced red = reduce(p);
  if (!red.consistent) return linear_infeasible(p, red);
  const Index m = p.block_dim;
  const Index r = Index(red.A.size());
  ConicProgram prog;
  prog.psd_dim = m;
  prog.A = red.A;
  prog.b = red.b;
  prog.C = MatrixXd::Zero(m, m);
  prog.G = MatrixXd::Zero(r, 0);
  prog.c_lin = VectorXd::Zero(0);
  prog.H = red.g;
  prog.c_free = VectorXd::Constant(1, -1.0);
  const IpmResult res = detail::solve_conic(prog, ipm_options(opts));

  SdpSolution sol;
  sol.iterations = res.iterations;
  sol.X = res.X;
  sol.nu = res.u.size() ? res.u(0) : 0.0;
  sol = finish(p, sol);
  sol.message = res.message;
  if (usable(res) && meets_tolerances(p, sol, opts)) {
    sol.status = Status::Feasible;
  } else if (res.X.norm() > 1e12 || std::abs(sol.nu) > 1e12) {
    sol.status = Status::Inconclusive;
    sol.message = "nu appears unbounded";
  } else {
    sol.status = Status::Inconclusive;
    if (sol.message.empty()) sol.message = "solver did not reach the requested accuracy";
  }
  return sol;
}

}  // namespace

std::string to_string(Status s) {
  switch (s) {
    case Status::Feasible: return "feasible";
    case Status::Infeasible: return "infeasible";
    case Status::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

double constraint_residual(const SdpProblem& p, const SymMatrix& X, double nu) {
  double worst = 0.0;
  for (const auto& c : p.constraints) {
    const double lhs = c.A.cwiseProduct(X).sum() + (p.has_scalar ? c.g * nu : 0.0);
    worst = std::max(worst, std::abs(lhs - c.b));
  }
  return worst;
}

std::optional<double> verify_farkas(const SdpProblem& p, const FarkasRay& ray) {
  if (ray.y.size() != Index(p.constraints.size())) return std::nullopt;
  MatrixXd S = MatrixXd::Zero(p.block_dim, p.block_dim);
  double bty = 0.0, gty = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < p.constraints.size(); ++k) {
    const auto& c = p.constraints[k];
    const double yk = ray.y(Index(k));
    S += yk * c.A;
    bty += yk * c.b;
    gty += yk * c.g;
    scale += std::abs(yk) * (c.A.norm() + std::abs(c.g));
  }
  const double tau = min_eigenvalue(S);
  if (!(bty < 0.0)) return std::nullopt;
  if (p.has_scalar && std::abs(gty) > 1e-12 * (1.0 + scale)) return std::nullopt;
  if (tau < -1e-12 * (1.0 + scale)) return std::nullopt;
  return std::max(tau, 0.0);
}

SdpSolution feasibility(const SdpProblem& p, double trace_cap, const Options& opts) {
  check_problem(p);
  if (!(trace_cap > 0.0)) throw DimensionError("sdp: trace_cap must be positive");
  const Reduced red = reduce(p);
  if (!red.consistent) return linear_infeasible(p, red);

  // X = Y + lambda I with Y psd, trace(X) + s = cap, s >= 0; minimize -lambda.
  const Index m = p.block_dim;
  const Index r = Index(red.A.size());
  const Index nfree = p.has_scalar ? 2 : 1;
  ConicProgram prog;
  prog.psd_dim = m;
  prog.A = red.A;
  prog.A.push_back(MatrixXd::Identity(m, m));
  prog.b.resize(r + 1);
  prog.b.head(r) = red.b;
  prog.b(r) = trace_cap;
  prog.C = MatrixXd::Zero(m, m);
  prog.G = MatrixXd::Zero(r + 1, 1);
  prog.G(r, 0) = 1.0;
  prog.c_lin = VectorXd::Zero(1);
  prog.H = MatrixXd::Zero(r + 1, nfree);
  for (Index k = 0; k < r; ++k) prog.H(k, 0) = red.A[std::size_t(k)].trace();
  prog.H(r, 0) = double(m);
  if (p.has_scalar) prog.H.col(1).head(r) = red.g;
  prog.c_free = VectorXd::Zero(nfree);
  prog.c_free(0) = -1.0;

  const IpmResult res = detail::solve_conic(prog, ipm_options(opts));
  SdpSolution sol;
  sol.iterations = res.iterations;
  sol.message = res.message;
  sol.lambda = res.u.size() ? res.u(0) : 0.0;
  sol.X = res.X + sol.lambda * MatrixXd::Identity(m, m);
  sol.nu = p.has_scalar ? res.u(1) : 0.0;
  sol = finish(p, sol);

  if (usable(res) && sol.lambda >= -opts.feas_tol) {
    if (meets_tolerances(p, sol, opts)) {
      sol.status = Status::Feasible;
      return sol;
    }
    sol.status = Status::Inconclusive;
    sol.message = "solution failed independent re-verification";
    return sol;
  }
  if (usable(res) && sol.lambda < -opts.feas_tol) {
    if (auto ray = farkas_search(p, red, opts)) {
      sol.farkas = ray;
      sol.status = Status::Infeasible;
      return sol;
    }
    sol.status = Status::Inconclusive;
    sol.message = "negative margin but no verified Farkas ray (weak infeasibility?)";
    return sol;
  }
  // A stalled run may still leave an iterate that passes the re-check.
  if (sol.X.size() > 0 && sol.lambda >= -opts.feas_tol && meets_tolerances(p, sol, opts)) {
    sol.status = Status::Feasible;
    sol.message = "accepted last iterate after early stop: " + sol.message;
    return sol;
  }
  if (auto ray = farkas_search(p, red, opts)) {
    sol.farkas = ray;
    sol.status = Status::Infeasible;
    return sol;
  }
  sol.status = Status::Inconclusive;
  if (sol.message.empty()) sol.message = "solver did not reach the requested accuracy";
  return sol;
}

SdpSolution solve(const SdpProblem& p, const Options& opts) {
  check_problem(p);
  if (p.objective == Objective::MaximizeNu) return maximize_nu(p, opts);
  const double cap = opts.trace_cap > 0.0 ? opts.trace_cap : 1e3 * double(p.block_dim);
  return feasibility(p, cap, opts);
}

InteriorDirection find_interior_direction(const SymPencil& p, const Options& opts) {
  validate(p);
  const Index n = p.num_vars();
  const Index m = p.size();
  if (n == 0) throw DimensionError("find_interior_direction: pencil has no variables");
  // Dual form: y = (e, t), maximize t with sum e_j A_j - t I psd, |e_j| <= 1.
  ConicProgram prog;
  prog.psd_dim = m;
  for (const auto& a : p.coeffs) prog.A.push_back(-a);
  prog.A.push_back(MatrixXd::Identity(m, m));
  prog.b = VectorXd::Zero(n + 1);
  prog.b(n) = 1.0;
  prog.C = MatrixXd::Zero(m, m);
  prog.G = MatrixXd::Zero(n + 1, 2 * n);
  for (Index j = 0; j < n; ++j) {
    prog.G(j, j) = 1.0;
    prog.G(j, n + j) = -1.0;
  }
  prog.c_lin = VectorXd::Ones(2 * n);
  prog.H = MatrixXd::Zero(n + 1, 0);
  prog.c_free = VectorXd::Zero(0);

  const IpmResult res = detail::solve_conic(prog, ipm_options(opts));
  InteriorDirection out;
  out.e = res.y.size() == n + 1 ? VectorXd(res.y.head(n)) : VectorXd::Zero(n);
  out.e = out.e.cwiseMax(-1.0).cwiseMin(1.0);
  out.margin = min_eigenvalue(p(out.e));
  out.status = out.margin > 1e-7 ? Status::Feasible : Status::Inconclusive;
  return out;
}

InteriorDirection find_interior_direction(const MatrixPencil& p, const Options& opts) {
  if (real_symmetric(p)) return find_interior_direction(to_real(p), opts);
  return find_interior_direction(embed(p), opts);
}

bool slice_bounded(const SymPencil& p, const VectorXd& direction, const Options& opts) {
  validate(p);
  const Index n = p.num_vars();
  if (direction.size() != n) throw DimensionError("slice_bounded: direction has wrong length");
  // Y > 0 with <A_j, Y> - s d_j = 0 and trace Y = size.
  SdpProblem prob;
  prob.block_dim = p.size();
  prob.has_scalar = true;
  for (Index j = 0; j < n; ++j)
    prob.constraints.push_back({p.coeffs[std::size_t(j)], -direction(j), 0.0});
  prob.constraints.push_back({MatrixXd::Identity(p.size(), p.size()), 0.0, double(p.size())});
  const double cap = opts.trace_cap > 0.0 ? opts.trace_cap : 1e3 * double(p.size());
  const SdpSolution sol = feasibility(prob, cap, opts);
  return sol.status == Status::Feasible && sol.lambda > 1e-7;
}

}  // namespace kstab::sdp
