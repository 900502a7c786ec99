#pragma once

// Polynomials, pencils and cones.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kstab/linalg.hpp"

namespace kstab {

/// Affine matrix pencil A_0 + sum_j A_j z_j with Hermitian (Scalar complex)
/// or real symmetric (Scalar real) coefficients.
template <typename Scalar>
struct Pencil {
  std::optional<MatrixX<Scalar>> constant;
  std::vector<MatrixX<Scalar>> coeffs;

  Index num_vars() const { return static_cast<Index>(coeffs.size()); }
  Index size() const {
    if (!coeffs.empty()) return coeffs.front().rows();
    return constant ? constant->rows() : 0;
  }
  bool homogeneous() const { return !constant.has_value(); }

  /// Evaluates the pencil at z; the result scalar follows z.
  template <typename Derived>
  MatrixX<std::common_type_t<Scalar, typename Derived::Scalar>> operator()(
      const Eigen::MatrixBase<Derived>& z) const {
    using Out = std::common_type_t<Scalar, typename Derived::Scalar>;
    if (z.size() != num_vars())
      throw DimensionError("pencil evaluation: point has wrong length");
    MatrixX<Out> out = constant ? MatrixX<Out>(constant->template cast<Out>())
                                : MatrixX<Out>::Zero(size(), size());
    for (Index j = 0; j < num_vars(); ++j)
      out += coeffs[static_cast<std::size_t>(j)].template cast<Out>() * Out(z(j));
    return out;
  }
};

/// General Hermitian pencil; real_symmetric() tells whether every entry is real.
using MatrixPencil = Pencil<Complex>;
/// Real symmetric pencil, used for cones.
using SymPencil = Pencil<double>;

bool real_symmetric(const MatrixPencil& p, double tol = 0.0);
MatrixPencil to_complex(const SymPencil& p);
/// Drops imaginary parts; throws DimensionError if any exceeds tol.
SymPencil to_real(const MatrixPencil& p, double tol = 1e-14);
/// Replaces every coefficient by its real embedding (size doubles).
SymPencil embed(const MatrixPencil& p);
/// Throws DimensionError unless all matrices are square of a common size.
template <typename Scalar>
void validate(const Pencil<Scalar>& p);

/// f(z) = det(pencil(z)).
struct DetPoly {
  MatrixPencil pencil;

  Index num_vars() const { return pencil.num_vars(); }
  Index degree_bound() const { return pencil.size(); }
};

/// f(z) = z^T A z + b^T z + c.
struct QuadPoly {
  SymMatrix A;
  VectorXd b;
  double c = 0.0;

  Index num_vars() const { return A.rows(); }
  bool homogeneous(double tol = 0.0) const;
  Complex operator()(const VectorXcd& z) const;
};

enum class ConeKind { Orthant, Psd, Lorentz, Custom };

/// Proper cone {x : pencil(x) >= 0} with a known interior direction.
struct ConeSpec {
  ConeKind kind = ConeKind::Custom;
  Index size = 0;  // m for psd(m), n for orthant(n) and lorentz(n)
  SymPencil pencil;
  VectorXd interior_direction;
  std::vector<std::pair<int, int>> variable_labels;  // psd cones only, 1-based

  Index num_vars() const { return pencil.num_vars(); }
  Index block_size() const { return pencil.size(); }
  /// Smallest eigenvalue of pencil(x).
  double margin(const VectorXd& x) const;
};

std::string to_string(ConeKind kind);

ConeSpec orthant_pencil(Index n);
/// Variables x_ij, i <= j, row-major over the upper triangle. The coefficient
/// of x_ii is E_ii and of x_ij (i < j) is E_ij + E_ji, so pencil(x) is the
/// symmetric matrix with entries x_ij.
ConeSpec psd_pencil(Index m);
/// Upper-left (n-1) block z_n I, last row and column z_1..z_{n-1}, corner z_n.
ConeSpec lorentz_pencil(Index n);
/// Validates a user cone: homogeneous, symmetric, interior direction strictly
/// inside.
ConeSpec custom_cone(SymPencil pencil, VectorXd interior_direction);

/// Label vector of a symmetric m x m matrix in psd_pencil variable order.
VectorXd psd_labels(const MatrixXd& X);

/// Complex determinant by LU with partial pivoting. Only an exactly zero
/// pivot column yields 0; small pivots are kept so near-zero values stay
/// meaningful for witness checks.
Complex complex_det(const MatrixXcd& M);

template <typename Scalar>
Complex pencil_eval_det(const Pencil<Scalar>& p, const VectorXcd& z) {
  if (z.size() != p.num_vars())
    throw DimensionError("pencil_eval_det: point has wrong length");
  return complex_det(p(z));
}

inline Complex evaluate(const DetPoly& f, const VectorXcd& z) {
  return pencil_eval_det(f.pencil, z);
}
inline Complex evaluate(const QuadPoly& f, const VectorXcd& z) { return f(z); }

/// Constant-free pencil of a determinantal polynomial whose coefficients
/// combine to a positive definite matrix along e. Throws PrecisionError if the
/// smallest eigenvalue of sum_j A_j e_j is at most 1e-9 (1 + norm).
MatrixPencil init_form(const DetPoly& f, const VectorXd& e);

/// Pencil q with q(z) = p(T z): coefficient j of q is sum_k A_k T_kj.
template <typename Scalar>
Pencil<Scalar> change_of_variables(const Pencil<Scalar>& p, const MatrixXd& T) {
  const Index n = p.num_vars();
  if (T.rows() != n || T.cols() != n)
    throw DimensionError("change_of_variables: transform has wrong shape");
  Eigen::FullPivLU<MatrixXd> lu(T);
  if (!lu.isInvertible())
    throw SingularMatrixError("change_of_variables: transform is singular");
  Pencil<Scalar> q;
  q.constant = p.constant;
  for (Index j = 0; j < n; ++j) {
    MatrixX<Scalar> acc = MatrixX<Scalar>::Zero(p.size(), p.size());
    for (Index k = 0; k < n; ++k)
      acc += Scalar(T(k, j)) * p.coeffs[static_cast<std::size_t>(k)];
    q.coeffs.push_back(std::move(acc));
  }
  return q;
}

/// Ascending coefficients of t -> f(x + t y), degree <= d, by interpolation
/// at d+1 Chebyshev nodes scaled to [-R, R], R = 1 + |x| + |y|.
std::vector<Complex> univariate_restriction(const DetPoly& f, const VectorXd& x,
                                            const VectorXd& y);
/// Exact coefficients for a quadratic.
std::vector<Complex> univariate_restriction(const QuadPoly& f, const VectorXd& x,
                                            const VectorXd& y);

}  // namespace kstab
