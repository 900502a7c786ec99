#pragma once

// Dense symmetric / Hermitian linear algebra: cyclic Jacobi eigensolver,
// inertia, Lorentz congruence, Khatri-Rao products, the Hermitian-to-real
// embedding and Durand-Kerner root finding.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Jacobi>

#include "kstab/errors.hpp"

namespace kstab {

using Eigen::Index;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

using Complex = std::complex<double>;

/// Real symmetric matrix. Only the lower triangle is read by the routines here.
using SymMatrix = MatrixXd;
/// Complex Hermitian matrix. Only the lower triangle is read.
using HermMatrix = MatrixXcd;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct EigenDecomp {
  VectorX<Scalar> values;   // ascending
  MatrixX<Scalar> vectors;  // orthonormal columns
};

struct Inertia {
  Index positive = 0;
  Index negative = 0;
  Index zero = 0;

  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Spectral decomposition of a real symmetric matrix by cyclic Jacobi
/// rotations. Eigenvalues come back ascending; each eigenvector is signed so
/// that its largest-magnitude entry is positive, which makes the output
/// deterministic.
template <typename Derived>
EigenDecomp<typename Derived::Scalar> sym_eigen(
    const Eigen::MatrixBase<Derived>& A, int max_sweeps = 100) {
  using Scalar = typename Derived::Scalar;
  static_assert(!Eigen::NumTraits<Scalar>::IsComplex,
                "sym_eigen expects a real matrix; embed Hermitian input first");
  if (A.rows() != A.cols()) throw DimensionError("sym_eigen: matrix not square");
  const Index n = A.rows();
  MatrixX<Scalar> a = A.template selfadjointView<Eigen::Lower>();
  MatrixX<Scalar> v = MatrixX<Scalar>::Identity(n, n);

  const Scalar eps = std::numeric_limits<Scalar>::epsilon();
  const Scalar tiny = std::numeric_limits<Scalar>::min();
  bool converged = n <= 1;
  for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
    bool rotated = false;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Scalar apq = std::abs(a(q, p));
        if (apq <= tiny) continue;
        if (apq <= eps * std::sqrt(std::abs(a(p, p)) * std::abs(a(q, q))) &&
            sweep > 3) {
          a(q, p) = a(p, q) = Scalar(0);
          continue;
        }
        Eigen::JacobiRotation<Scalar> rot;
        rot.makeJacobi(a, p, q);
        a.applyOnTheLeft(p, q, rot.adjoint());
        a.applyOnTheRight(p, q, rot);
        v.applyOnTheRight(p, q, rot);
        a(q, p) = a(p, q) = Scalar(0);
        rotated = true;
      }
    }
    if (!rotated) converged = true;
  }
  if (!converged) throw NoConvergence("sym_eigen: no convergence");

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return a(i, i) < a(j, j); });

  EigenDecomp<Scalar> out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    const Index src = order[static_cast<std::size_t>(k)];
    out.values(k) = a(src, src);
    auto col = v.col(src);
    Index imax = 0;
    col.cwiseAbs().maxCoeff(&imax);
    out.vectors.col(k) = col(imax) < Scalar(0) ? VectorX<Scalar>(-col)
                                               : VectorX<Scalar>(col);
  }
  return out;
}

/// Real symmetric matrix [[X, -Y], [Y, X]] of size 2d for Z = X + iY.
template <typename Derived>
MatrixX<typename Derived::RealScalar> herm_to_real_embed(
    const Eigen::MatrixBase<Derived>& Z) {
  using Real = typename Derived::RealScalar;
  if (Z.rows() != Z.cols())
    throw DimensionError("herm_to_real_embed: matrix not square");
  const Index d = Z.rows();
  const MatrixX<std::complex<Real>> full =
      Z.template cast<std::complex<Real>>()
          .template selfadjointView<Eigen::Lower>();
  MatrixX<Real> out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = full.real();
  out.bottomRightCorner(d, d) = full.real();
  out.topRightCorner(d, d) = -full.imag();
  out.bottomLeftCorner(d, d) = full.imag();
  return out;
}

/// Inverse of herm_to_real_embed. Averages the two copies, so it also
/// projects a general real symmetric 2d matrix onto the embedded structure.
template <typename Derived>
MatrixX<std::complex<typename Derived::Scalar>> real_to_herm(
    const Eigen::MatrixBase<Derived>& E) {
  using Real = typename Derived::Scalar;
  if (E.rows() != E.cols() || E.rows() % 2 != 0)
    throw DimensionError("real_to_herm: expected an even square matrix");
  const Index d = E.rows() / 2;
  MatrixX<Real> re = (E.topLeftCorner(d, d) + E.bottomRightCorner(d, d)) / 2;
  MatrixX<Real> im = (E.bottomLeftCorner(d, d) - E.topRightCorner(d, d)) / 2;
  MatrixX<std::complex<Real>> out(d, d);
  out.real() = re;
  out.imag() = im;
  return out;
}

/// Eigenvalues of a Hermitian matrix, ascending. Computed through the real
/// embedding; every eigenvalue appears twice there and is reported once.
template <typename Derived>
VectorX<typename Derived::RealScalar> herm_eigenvalues(
    const Eigen::MatrixBase<Derived>& Z) {
  const auto doubled = sym_eigen(herm_to_real_embed(Z)).values;
  VectorX<typename Derived::RealScalar> out(Z.rows());
  for (Index k = 0; k < Z.rows(); ++k) out(k) = doubled(2 * k);
  return out;
}

/// Smallest eigenvalue of a real symmetric or complex Hermitian matrix.
template <typename Derived>
typename Derived::RealScalar min_eigenvalue(const Eigen::MatrixBase<Derived>& A) {
  if (A.size() == 0) return 0;
  if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
    return herm_eigenvalues(A)(0);
  } else {
    return sym_eigen(A).values(0);
  }
}

template <typename Derived>
typename Derived::RealScalar max_eigenvalue(const Eigen::MatrixBase<Derived>& A) {
  if (A.size() == 0) return 0;
  if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
    const auto v = herm_eigenvalues(A);
    return v(v.size() - 1);
  } else {
    const auto v = sym_eigen(A).values;
    return v(v.size() - 1);
  }
}

/// Spectral norm of a symmetric matrix, max |eigenvalue|.
template <typename Derived>
typename Derived::RealScalar sym_norm(const Eigen::MatrixBase<Derived>& A) {
  if (A.size() == 0) return 0;
  const auto v = sym_eigen(A).values;
  return std::max(std::abs(v(0)), std::abs(v(v.size() - 1)));
}

/// Counts eigenvalues above, below and inside [-tau, tau] with
/// tau = rel_tol * (1 + ||A||).
template <typename Derived>
Inertia inertia(const Eigen::MatrixBase<Derived>& A, double rel_tol = 1e-9) {
  const auto values = sym_eigen(A).values;
  if (values.size() == 0) return {};
  const double norm = std::max(std::abs(double(values(0))),
                               std::abs(double(values(values.size() - 1))));
  const double tau = rel_tol * (1.0 + norm);
  Inertia out;
  for (Index k = 0; k < values.size(); ++k) {
    if (values(k) > tau)
      ++out.positive;
    else if (values(k) < -tau)
      ++out.negative;
    else
      ++out.zero;
  }
  return out;
}

/// Returns an invertible T with T^T diag(1,...,1,-1) T = A. Built from the
/// eigendecomposition as T = P |Lambda|^{1/2} V^T, where P moves the single
/// negative eigenvalue to the last coordinate and keeps the positive ones in
/// their original order.
template <typename Derived>
MatrixX<typename Derived::Scalar> congruence_to_lorentz(
    const Eigen::MatrixBase<Derived>& A, double rel_tol = 1e-9) {
  using Scalar = typename Derived::Scalar;
  const Index n = A.rows();
  const Inertia in = inertia(A, rel_tol);
  if (!(in == Inertia{n - 1, 1, 0}))
    throw SignatureError("congruence_to_lorentz: inertia is not (n-1, 1, 0)");
  const auto eig = sym_eigen(A);
  // values(0) is the negative one; the positives follow in ascending order.
  MatrixX<Scalar> T(n, n);
  for (Index k = 1; k < n; ++k)
    T.row(k - 1) = std::sqrt(eig.values(k)) * eig.vectors.col(k).transpose();
  T.row(n - 1) = std::sqrt(-eig.values(0)) * eig.vectors.col(0).transpose();
  return T;
}

/// Block (i,j) of the result is M(i,j) * C_ij, where C is an l x l grid of
/// square blocks of size block_size.
template <typename DerivedM, typename DerivedC>
MatrixX<typename DerivedC::Scalar> khatri_rao(
    const Eigen::MatrixBase<DerivedM>& M, const Eigen::MatrixBase<DerivedC>& C,
    Index block_size) {
  const Index l = M.rows();
  if (M.cols() != l || block_size <= 0 || C.rows() != l * block_size ||
      C.cols() != l * block_size)
    throw DimensionError("khatri_rao: block grid does not match M");
  MatrixX<typename DerivedC::Scalar> out(C.rows(), C.cols());
  for (Index i = 0; i < l; ++i)
    for (Index j = 0; j < l; ++j)
      out.block(i * block_size, j * block_size, block_size, block_size) =
          C.block(i * block_size, j * block_size, block_size, block_size) *
          typename DerivedC::Scalar(M(i, j));
  return out;
}

/// Sum over (i,j) of M(i,j) * C_ij: the compression (I ... I)(M * C)(I ... I)^T.
template <typename DerivedM, typename DerivedC>
MatrixX<typename DerivedC::Scalar> compress_blocks(
    const Eigen::MatrixBase<DerivedM>& M, const Eigen::MatrixBase<DerivedC>& C,
    Index block_size) {
  const Index l = M.rows();
  if (M.cols() != l || block_size <= 0 || C.rows() != l * block_size ||
      C.cols() != l * block_size)
    throw DimensionError("compress_blocks: block grid does not match M");
  MatrixX<typename DerivedC::Scalar> out =
      MatrixX<typename DerivedC::Scalar>::Zero(block_size, block_size);
  for (Index i = 0; i < l; ++i)
    for (Index j = 0; j < l; ++j)
      if (M(i, j) != 0)
        out += typename DerivedC::Scalar(M(i, j)) *
               C.block(i * block_size, j * block_size, block_size, block_size);
  return out;
}

/// Roots of sum_k coeffs[k] t^k by Durand-Kerner simultaneous iteration.
/// Throws DegreeDropError when the leading coefficient is below
/// 1e-12 * max |coeff|, NoConvergence when the iteration cap is hit and the
/// roots do not reproduce the coefficients.
std::vector<Complex> poly_roots(const std::vector<Complex>& coeffs,
                                int max_iter = 5000);

/// Horner evaluation of an ascending coefficient list and its derivative.
Complex poly_eval(const std::vector<Complex>& coeffs, Complex t);
Complex poly_derivative(const std::vector<Complex>& coeffs, Complex t);

/// Expands lead * prod (t - r_k) into ascending coefficients.
std::vector<Complex> poly_from_roots(const std::vector<Complex>& roots,
                                     Complex lead = 1.0);

}  // namespace kstab
