#include "conic_ipm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace kstab::detail {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MatrixXd sym(const MatrixXd& m) { return 0.5 * (m + m.transpose()); }

double inner(const MatrixXd& a, const MatrixXd& b) { return a.cwiseProduct(b).sum(); }

// Largest alpha with X + alpha dX psd, given the Cholesky factor of X.
double max_step_psd(const MatrixXd& L, const MatrixXd& dX) {
  if (dX.size() == 0) return kInf;
  const auto tri = L.triangularView<Eigen::Lower>();
  MatrixXd s = tri.solve(dX);
  s = tri.solve(s.transpose()).transpose();
  const double lmin = Eigen::SelfAdjointEigenSolver<MatrixXd>(sym(s), Eigen::EigenvaluesOnly)
                          .eigenvalues()
                          .minCoeff();
  return lmin >= 0.0 ? kInf : -1.0 / lmin;
}

double max_step_lin(const VectorXd& x, const VectorXd& dx) {
  double a = kInf;
  for (Index i = 0; i < x.size(); ++i)
    if (dx(i) < 0.0) a = std::min(a, -x(i) / dx(i));
  return a;
}

struct Direction {
  MatrixXd dX, dZ;
  VectorXd dx, dz, du, dy;
};

class Solver {
 public:
  Solver(const ConicProgram& p, const IpmOptions& o) : prog_(p), opts_(o) {
    m_ = p.psd_dim;
    K_ = p.num_constraints();
    q_ = p.lin_dim();
    r_ = p.free_dim();
  }

  IpmResult run();

 private:
  VectorXd apply_A(const MatrixXd& X) const {
    VectorXd out(K_);
    for (Index k = 0; k < K_; ++k) out(k) = inner(prog_.A[std::size_t(k)], X);
    return out;
  }
  MatrixXd apply_At(const VectorXd& y) const {
    MatrixXd out = MatrixXd::Zero(m_, m_);
    for (Index k = 0; k < K_; ++k)
      if (y(k) != 0.0) out += y(k) * prog_.A[std::size_t(k)];
    return out;
  }

  bool factor();
  Direction direction(const MatrixXd& Rc, const VectorXd& rcx) const;

  const ConicProgram& prog_;
  IpmOptions opts_;
  Index m_ = 0, K_ = 0, q_ = 0, r_ = 0;

  // iterate
  MatrixXd X_, Z_;
  VectorXd x_, z_, u_, y_;
  // residuals
  VectorXd rp_, rdx_, rdu_;
  MatrixXd Rd_;
  // scaling
  MatrixXd LX_, G_, Ginv_, W_;
  VectorXd lambda_;
  Eigen::PartialPivLU<MatrixXd> kkt_;
};

bool Solver::factor() {
  Eigen::LLT<MatrixXd> llx(X_), llz(Z_);
  if (llx.info() != Eigen::Success || llz.info() != Eigen::Success) return false;
  LX_ = llx.matrixL();
  const MatrixXd LZ = llz.matrixL();
  Eigen::JacobiSVD<MatrixXd> svd(LZ.transpose() * LX_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  lambda_ = svd.singularValues();
  if (lambda_.size() > 0 && lambda_.minCoeff() <= 0.0) return false;
  const VectorXd s_half = lambda_.cwiseSqrt();
  G_ = LX_ * svd.matrixV() * s_half.cwiseInverse().asDiagonal();
  const MatrixXd LXinv = LX_.triangularView<Eigen::Lower>().solve(MatrixXd::Identity(m_, m_));
  Ginv_ = s_half.asDiagonal() * svd.matrixV().transpose() * LXinv;
  W_ = sym(G_ * G_.transpose());

  const Index n = K_ + r_;
  MatrixXd kkt = MatrixXd::Zero(n, n);
  std::vector<MatrixXd> waw(static_cast<std::size_t>(K_));
  for (Index j = 0; j < K_; ++j) waw[std::size_t(j)] = W_ * prog_.A[std::size_t(j)] * W_;
  for (Index i = 0; i < K_; ++i)
    for (Index j = i; j < K_; ++j)
      kkt(i, j) = kkt(j, i) = inner(prog_.A[std::size_t(i)], waw[std::size_t(j)]);
  if (q_ > 0) {
    const VectorXd d = x_.cwiseQuotient(z_);
    kkt.topLeftCorner(K_, K_) += prog_.G * d.asDiagonal() * prog_.G.transpose();
  }
  if (r_ > 0) {
    kkt.topRightCorner(K_, r_) = prog_.H;
    kkt.bottomLeftCorner(r_, K_) = prog_.H.transpose();
  }
  kkt_.compute(kkt);
  const double det_abs = kkt_.matrixLU().diagonal().cwiseAbs().minCoeff();
  return std::isfinite(det_abs) && det_abs > 0.0;
}

Direction Solver::direction(const MatrixXd& Rc, const VectorXd& rcx) const {
  VectorXd rhs(K_ + r_);
  VectorXd lin_part = VectorXd::Zero(q_);
  if (q_ > 0) lin_part = (rcx - x_.cwiseProduct(rdx_)).cwiseQuotient(z_);
  rhs.head(K_) = rp_ - apply_A(Rc - W_ * Rd_ * W_);
  if (q_ > 0) rhs.head(K_) -= prog_.G * lin_part;
  if (r_ > 0) rhs.tail(r_) = rdu_;
  const VectorXd sol = kkt_.solve(rhs);

  Direction d;
  d.dy = sol.head(K_);
  d.du = sol.tail(r_);
  d.dZ = sym(Rd_ - apply_At(d.dy));
  d.dX = sym(Rc - W_ * d.dZ * W_);
  if (q_ > 0) {
    d.dz = rdx_ - prog_.G.transpose() * d.dy;
    d.dx = (rcx - x_.cwiseProduct(d.dz)).cwiseQuotient(z_);
  } else {
    d.dz.resize(0);
    d.dx.resize(0);
  }
  return d;
}

IpmResult Solver::run() {
  IpmResult res;
  const double bnorm = prog_.b.norm();
  const double cnorm = prog_.C.norm() + prog_.c_lin.norm() + prog_.c_free.norm();

  double xi = std::max(10.0, std::sqrt(double(m_)));
  double eta = std::max(10.0, std::sqrt(double(m_)));
  eta = std::max(eta, prog_.C.norm());
  for (Index k = 0; k < K_; ++k) {
    double an = prog_.A[std::size_t(k)].norm();
    if (q_ > 0) an = std::hypot(an, prog_.G.row(k).norm());
    if (r_ > 0) an = std::hypot(an, prog_.H.row(k).norm());
    xi = std::max(xi, (1.0 + std::abs(prog_.b(k))) / (1.0 + an));
    eta = std::max(eta, an);
  }
  X_ = xi * MatrixXd::Identity(m_, m_);
  Z_ = eta * MatrixXd::Identity(m_, m_);
  x_ = VectorXd::Constant(q_, xi);
  z_ = VectorXd::Constant(q_, eta);
  u_ = VectorXd::Zero(r_);
  y_ = VectorXd::Zero(K_);

  const double nu = double(m_ + q_);
  int stall = 0;
  // Iterates can degrade near a degenerate optimum before the run stops;
  // non-optimal exits report the best iterate seen.
  IpmResult best;
  double best_merit = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    rp_ = prog_.b - apply_A(X_);
    if (q_ > 0) rp_ -= prog_.G * x_;
    if (r_ > 0) rp_ -= prog_.H * u_;
    Rd_ = sym(prog_.C - apply_At(y_) - Z_);
    rdx_ = q_ > 0 ? VectorXd(prog_.c_lin - prog_.G.transpose() * y_ - z_) : VectorXd();
    rdu_ = r_ > 0 ? VectorXd(prog_.c_free - prog_.H.transpose() * y_) : VectorXd();

    const double pobj = inner(prog_.C, X_) + (q_ > 0 ? prog_.c_lin.dot(x_) : 0.0) +
                        (r_ > 0 ? prog_.c_free.dot(u_) : 0.0);
    const double dobj = prog_.b.dot(y_);
    const double compl_gap = inner(X_, Z_) + (q_ > 0 ? x_.dot(z_) : 0.0);
    const double mu = compl_gap / nu;

    res.primal_objective = pobj;
    res.dual_objective = dobj;
    res.primal_infeasibility = rp_.norm() / (1.0 + bnorm);
    res.dual_infeasibility =
        (Rd_.norm() + rdx_.norm() + rdu_.norm()) / (1.0 + cnorm);
    res.gap = std::max(std::abs(pobj - dobj), std::abs(compl_gap)) /
              (1.0 + std::abs(pobj) + std::abs(dobj));
    res.iterations = it;
    const double merit = std::max({res.primal_infeasibility, res.dual_infeasibility, res.gap});
    if (merit < best_merit) {
      best_merit = merit;
      best = res;
      best.X = X_;
      best.Z = Z_;
      best.x = x_;
      best.z = z_;
      best.u = u_;
      best.y = y_;
    }

    if (res.primal_infeasibility <= opts_.tol && res.dual_infeasibility <= opts_.tol &&
        res.gap <= opts_.tol) {
      res.status = IpmStatus::Optimal;
      break;
    }
    if (it >= opts_.max_iter) {
      res.status = IpmStatus::MaxIterations;
      break;
    }
    if (X_.norm() > 1e14 || Z_.norm() > 1e14) {
      res.status = IpmStatus::Stalled;
      res.message = "iterates diverging";
      break;
    }
    if (!factor()) {
      res.status = IpmStatus::NumericalBreakdown;
      res.message = "factorization failed";
      break;
    }

    // Predictor.
    const MatrixXd Rc_aff = -X_;
    const VectorXd rcx_aff = q_ > 0 ? VectorXd(-x_.cwiseProduct(z_)) : VectorXd();
    const Direction aff = direction(Rc_aff, rcx_aff);
    const double ap_aff = std::min({1.0, max_step_psd(LX_, aff.dX), max_step_lin(x_, aff.dx)});
    const Eigen::LLT<MatrixXd> llz(Z_);
    const MatrixXd LZ = llz.matrixL();
    const double ad_aff = std::min({1.0, max_step_psd(LZ, aff.dZ), max_step_lin(z_, aff.dz)});
    double mu_aff = inner(X_ + ap_aff * aff.dX, Z_ + ad_aff * aff.dZ);
    if (q_ > 0) mu_aff += (x_ + ap_aff * aff.dx).dot(z_ + ad_aff * aff.dz);
    mu_aff /= nu;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector in the scaled space, where the scaled point is diag(lambda).
    const MatrixXd dXs = Ginv_ * aff.dX * Ginv_.transpose();
    const MatrixXd dZs = G_.transpose() * aff.dZ * G_;
    MatrixXd R = -(dXs * dZs + dZs * dXs);
    for (Index i = 0; i < m_; ++i) R(i, i) += 2.0 * sigma * mu - 2.0 * lambda_(i) * lambda_(i);
    MatrixXd Dm(m_, m_);
    for (Index i = 0; i < m_; ++i)
      for (Index j = 0; j < m_; ++j) Dm(i, j) = R(i, j) / (lambda_(i) + lambda_(j));
    const MatrixXd Rc = sym(G_ * Dm * G_.transpose());
    VectorXd rcx;
    if (q_ > 0)
      rcx = VectorXd::Constant(q_, sigma * mu) - x_.cwiseProduct(z_) -
            aff.dx.cwiseProduct(aff.dz);
    const Direction d = direction(Rc, rcx);

    const double gamma = opts_.step_fraction;
    const double ap = std::min({1.0, gamma * max_step_psd(LX_, d.dX), gamma * max_step_lin(x_, d.dx)});
    const double ad = std::min({1.0, gamma * max_step_psd(LZ, d.dZ), gamma * max_step_lin(z_, d.dz)});

    X_ = sym(X_ + ap * d.dX);
    if (q_ > 0) x_ += ap * d.dx;
    if (r_ > 0) u_ += ap * d.du;
    Z_ = sym(Z_ + ad * d.dZ);
    if (q_ > 0) z_ += ad * d.dz;
    y_ += ad * d.dy;

    if (ap < 1e-10 && ad < 1e-10) {
      if (++stall >= 3) {
        res.status = IpmStatus::Stalled;
        res.message = "step lengths vanished";
        break;
      }
    } else {
      stall = 0;
    }
  }
  if (res.status != IpmStatus::Optimal && best_merit < std::numeric_limits<double>::infinity()) {
    const IpmStatus status = res.status;
    const std::string message = res.message;
    const int iterations = res.iterations;
    res = best;
    res.status = status;
    res.message = message;
    res.iterations = iterations;
    return res;
  }
  res.X = X_;
  res.Z = Z_;
  res.x = x_;
  res.z = z_;
  res.u = u_;
  res.y = y_;
  return res;
}

}  // namespace

IpmResult solve_conic(const ConicProgram& prog, const IpmOptions& opts) {
  return Solver(prog, opts).run();
}

}  // namespace kstab::detail
