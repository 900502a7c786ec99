#include "kstab/quadratic.hpp"

#include <random>

#include <Eigen/QR>

namespace kstab {
namespace {

double real_value(const QuadPoly& f, const VectorXd& z) {
  return z.dot(f.A * z) + f.b.dot(z) + f.c;
}

void check_transform(const QuadPoly& f, const QuadClassification& c) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  const Index n = f.num_vars();
  for (int k = 0; k < 5; ++k) {
    VectorXd w(n);
    for (Index j = 0; j < n; ++j) w(j) = normal(rng);
    const VectorXd z = c.S * w + c.t;
    const double lhs = real_value(f, z);
    const double rhs = c.kappa * normal_form_value(c, w);
    const double scale = 1.0 + std::abs(lhs) + std::abs(rhs) + f.A.norm() * z.squaredNorm();
    if (std::abs(lhs - rhs) > 1e-8 * scale)
      throw PrecisionError("classify: normal-form transform failed its self-check");
  }
}

// Orders eigenpairs with positive (after multiplying by sign) values first,
// then negative, then null; returns the permutation.
std::vector<Index> sign_order(const VectorXd& values, double sign, double tau) {
  std::vector<Index> pos, neg, zero;
  for (Index k = 0; k < values.size(); ++k) {
    const double v = sign * values(k);
    if (v > tau)
      pos.push_back(k);
    else if (v < -tau)
      neg.push_back(k);
    else
      zero.push_back(k);
  }
  pos.insert(pos.end(), neg.begin(), neg.end());
  pos.insert(pos.end(), zero.begin(), zero.end());
  return pos;
}

}  // namespace

std::string to_string(QuadType t) {
  switch (t) {
    case QuadType::I: return "I";
    case QuadType::II: return "II";
    case QuadType::III: return "III";
  }
  return "?";
}

double normal_form_value(const QuadClassification& c, const VectorXd& w) {
  double v = 0.0;
  for (Index j = 0; j < c.r; ++j) v += (j < c.p ? 1.0 : -1.0) * w(j) * w(j);
  if (c.q_type == QuadType::II) v += 1.0;
  if (c.q_type == QuadType::III) v += w(c.r);
  return v;
}

QuadClassification classify(const QuadPoly& f) {
  const Index n = f.num_vars();
  if (f.b.size() != n || f.A.cols() != n)
    throw DimensionError("classify: coefficient shapes disagree");
  if (f.A.cwiseAbs().maxCoeff() == 0.0 && f.b.cwiseAbs().maxCoeff() == 0.0 && f.c == 0.0)
    throw ZeroPolynomialError("classify: polynomial is identically zero");

  const auto eig = sym_eigen(f.A);
  const double anorm = std::max(std::abs(eig.values(0)), std::abs(eig.values(n - 1)));
  const double tau = 1e-9 * (1.0 + anorm);
  if (anorm <= tau) throw UnsupportedQuadricError("classify: quadratic part vanishes");

  std::vector<Index> range, null;
  for (Index k = 0; k < n; ++k) (std::abs(eig.values(k)) > tau ? range : null).push_back(k);
  const Index r = Index(range.size());

  // Split b into its parts inside and outside the range of A.
  VectorXd b_range = VectorXd::Zero(n);
  VectorXd x0 = VectorXd::Zero(n);  // -A^+ b / 2
  for (Index k : range) {
    const double coef = eig.vectors.col(k).dot(f.b);
    b_range += coef * eig.vectors.col(k);
    x0 -= 0.5 * coef / eig.values(k) * eig.vectors.col(k);
  }
  const VectorXd u = f.b - b_range;
  const double c_shift = f.c + 0.5 * b_range.dot(x0);  // f(x0) when u = 0

  QuadClassification out;
  out.r = r;
  out.S = MatrixXd::Zero(n, n);
  const double btol = 1e-9 * (1.0 + f.b.norm() + anorm);

  Index npos = 0;
  for (Index k : range) npos += eig.values(k) > 0.0 ? 1 : 0;

  if (u.norm() > btol) {
    out.q_type = QuadType::III;
    out.negated = 2 * npos < r;
    out.kappa = out.negated ? -1.0 : 1.0;
    out.p = out.negated ? r - npos : npos;
    const auto order = sign_order(eig.values, out.kappa, tau);
    for (Index j = 0; j < r; ++j) {
      const Index k = order[std::size_t(j)];
      out.S.col(j) = eig.vectors.col(k) / std::sqrt(std::abs(eig.values(k)));
    }
    out.S.col(r) = out.kappa * u / u.squaredNorm();
    // Remaining columns: null-space directions orthogonal to u.
    const Index nn = Index(null.size());
    MatrixXd V0(n, nn);
    for (Index j = 0; j < nn; ++j) V0.col(j) = eig.vectors.col(null[std::size_t(j)]);
    const VectorXd cu = V0.transpose() * u;
    const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(cu).householderQ();
    for (Index j = 1; j < nn; ++j) out.S.col(r + j) = V0 * Q.col(j);
    out.t = x0 - (c_shift / u.squaredNorm()) * u;
  } else if (std::abs(c_shift) <= 1e-9 * (1.0 + std::abs(f.c) + f.b.norm() * (1.0 + x0.norm()))) {
    out.q_type = QuadType::I;
    out.negated = 2 * npos < r;
    out.kappa = out.negated ? -1.0 : 1.0;
    out.p = out.negated ? r - npos : npos;
    const auto order = sign_order(eig.values, out.kappa, tau);
    for (Index j = 0; j < n; ++j) {
      const Index k = order[std::size_t(j)];
      out.S.col(j) = j < r ? VectorXd(eig.vectors.col(k) / std::sqrt(std::abs(eig.values(k))))
                           : VectorXd(eig.vectors.col(k));
    }
    out.t = x0;
  } else {
    out.q_type = QuadType::II;
    out.kappa = c_shift;
    out.negated = c_shift < 0.0;
    const double sgn = c_shift > 0.0 ? 1.0 : -1.0;
    out.p = sgn > 0 ? npos : r - npos;
    const auto order = sign_order(eig.values, sgn, tau);
    for (Index j = 0; j < n; ++j) {
      const Index k = order[std::size_t(j)];
      out.S.col(j) =
          j < r ? VectorXd(eig.vectors.col(k) * std::sqrt(std::abs(c_shift) / std::abs(eig.values(k))))
                : VectorXd(eig.vectors.col(k));
    }
    out.t = x0;
  }
  check_transform(f, out);
  return out;
}

bool improj_contains(const QuadPoly& f, const VectorXd& y) {
  const Index n = f.num_vars();
  if (y.size() != n) throw DimensionError("improj_contains: point has wrong length");
  const QuadClassification c = classify(f);
  const double ynorm = y.norm();

  if (c.q_type == QuadType::I) {
    const auto eig = sym_eigen(f.A);
    const Inertia in = inertia(f.A);
    const double tol = 1e-9 * (1.0 + ynorm);
    if (in.positive + in.negative == 1) {
      const Index k = in.negative == 1 ? 0 : n - 1;
      return std::abs(eig.vectors.col(k).dot(y)) <= tol;
    }
    if (in.positive == 1 && in.negative == 1) {
      const VectorXd vp = std::sqrt(eig.values(n - 1)) * eig.vectors.col(n - 1);
      const VectorXd vn = std::sqrt(-eig.values(0)) * eig.vectors.col(0);
      const VectorXd a = vp + vn, b = vp - vn;
      return std::abs(a.dot(y)) <= tol * a.norm() || std::abs(b.dot(y)) <= tol * b.norm();
    }
    if (in == Inertia{n - 1, 1, 0} || in == Inertia{1, n - 1, 0}) {
      const double sgn = in.negative == 1 ? 1.0 : -1.0;
      return sgn * y.dot(f.A * y) >= -1e-12 * (1.0 + f.A.norm()) * ynorm * ynorm;
    }
    throw UnsupportedQuadricError("improj_contains: type I quadric outside the supported cases");
  }
  if (c.q_type == QuadType::II && c.r == n && n >= 3 && (c.p == 1 || c.p == n - 1)) {
    const VectorXd w = c.S.fullPivLu().solve(y);
    const double tol = 1e-12 * (1.0 + w.squaredNorm());
    if (c.p == 1) {
      const double v = w(0) * w(0) - w.tail(n - 1).squaredNorm();
      return v <= 1.0 + tol;
    }
    if (ynorm == 0.0) return true;
    return w.head(n - 1).squaredNorm() > w(n - 1) * w(n - 1);
  }
  throw UnsupportedQuadricError("improj_contains: quadric type " + to_string(c.q_type) +
                                " with p = " + std::to_string(c.p) + ", r = " +
                                std::to_string(c.r) + " is not supported");
}

LorentzPencil f_pencil(const SymMatrix& A) {
  const Index n = A.rows();
  LorentzPencil out;
  out.T = congruence_to_lorentz(A);
  out.F = change_of_variables(lorentz_pencil(n).pencil, out.T);
  out.ell = out.T.row(n - 1).transpose();

  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 5; ++k) {
    VectorXd z(n);
    for (Index j = 0; j < n; ++j) z(j) = normal(rng);
    const double det = out.F(z).determinant();
    const double rhs = -std::pow(out.ell.dot(z), double(n - 2)) * z.dot(A * z);
    if (std::abs(det - rhs) > 1e-7 * (1.0 + std::abs(rhs)))
      throw IdentityCheckError("f_pencil: determinant identity failed");
  }
  return out;
}

bool real_zero_check(const QuadPoly& f) {
  if (!(f.c > 0.0)) throw NormalizationError("real_zero_check: requires f(0) > 0");
  const MatrixXd A = f.A / f.c;
  const VectorXd b = f.b / f.c;
  return max_eigenvalue(MatrixXd(A - 0.25 * b * b.transpose())) <= 1e-9;
}

}  // namespace kstab
