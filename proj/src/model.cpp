#include "kstab/model.hpp"

#include <numbers>

namespace kstab {

bool real_symmetric(const MatrixPencil& p, double tol) {
  auto is_real = [tol](const MatrixXcd& m) {
    return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() <= tol;
  };
  if (p.constant && !is_real(*p.constant)) return false;
  for (const auto& a : p.coeffs)
    if (!is_real(a)) return false;
  return true;
}

MatrixPencil to_complex(const SymPencil& p) {
  MatrixPencil out;
  if (p.constant) out.constant = p.constant->cast<Complex>();
  for (const auto& a : p.coeffs) out.coeffs.push_back(a.cast<Complex>());
  return out;
}

SymPencil to_real(const MatrixPencil& p, double tol) {
  if (!real_symmetric(p, tol))
    throw DimensionError("to_real: pencil has non-real entries");
  SymPencil out;
  if (p.constant) out.constant = p.constant->real();
  for (const auto& a : p.coeffs) out.coeffs.push_back(a.real());
  return out;
}

SymPencil embed(const MatrixPencil& p) {
  SymPencil out;
  if (p.constant) out.constant = herm_to_real_embed(*p.constant);
  for (const auto& a : p.coeffs) out.coeffs.push_back(herm_to_real_embed(a));
  return out;
}

template <typename Scalar>
void validate(const Pencil<Scalar>& p) {
  const Index d = p.size();
  auto check = [d](const MatrixX<Scalar>& m) {
    if (m.rows() != d || m.cols() != d)
      throw DimensionError("pencil: coefficient matrices differ in size");
    if ((m - m.adjoint()).cwiseAbs().maxCoeff() >
        1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
      throw DimensionError("pencil: coefficient matrix is not Hermitian");
  };
  if (d == 0) throw DimensionError("pencil: empty matrices");
  if (p.constant) check(*p.constant);
  for (const auto& a : p.coeffs) check(a);
}

template void validate(const Pencil<double>&);
template void validate(const Pencil<Complex>&);

bool QuadPoly::homogeneous(double tol) const {
  const double scale = 1.0 + A.cwiseAbs().maxCoeff();
  return b.cwiseAbs().maxCoeff() <= tol * scale && std::abs(c) <= tol * scale;
}

Complex QuadPoly::operator()(const VectorXcd& z) const {
  if (z.size() != A.rows()) throw DimensionError("QuadPoly: point has wrong length");
  const VectorXcd Az = A.cast<Complex>() * z;
  return z.cwiseProduct(Az).sum() + b.cast<Complex>().cwiseProduct(z).sum() + c;
}

double ConeSpec::margin(const VectorXd& x) const {
  return min_eigenvalue(pencil(x));
}

std::string to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::Orthant: return "orthant";
    case ConeKind::Psd: return "psd";
    case ConeKind::Lorentz: return "lorentz";
    case ConeKind::Custom: return "custom";
  }
  return "custom";
}

ConeSpec orthant_pencil(Index n) {
  if (n < 1) throw DimensionError("orthant_pencil: n must be positive");
  ConeSpec k;
  k.kind = ConeKind::Orthant;
  k.size = n;
  for (Index j = 0; j < n; ++j) {
    MatrixXd m = MatrixXd::Zero(n, n);
    m(j, j) = 1.0;
    k.pencil.coeffs.push_back(m);
  }
  k.interior_direction = VectorXd::Ones(n);
  return k;
}

ConeSpec psd_pencil(Index m) {
  if (m < 1) throw DimensionError("psd_pencil: m must be positive");
  ConeSpec k;
  k.kind = ConeKind::Psd;
  k.size = m;
  for (Index i = 0; i < m; ++i) {
    for (Index j = i; j < m; ++j) {
      MatrixXd e = MatrixXd::Zero(m, m);
      e(i, j) = 1.0;
      e(j, i) = 1.0;
      k.pencil.coeffs.push_back(e);
      k.variable_labels.emplace_back(int(i + 1), int(j + 1));
    }
  }
  k.interior_direction = psd_labels(MatrixXd::Identity(m, m));
  return k;
}

ConeSpec lorentz_pencil(Index n) {
  if (n < 2) throw DimensionError("lorentz_pencil: n must be at least 2");
  ConeSpec k;
  k.kind = ConeKind::Lorentz;
  k.size = n;
  for (Index j = 0; j + 1 < n; ++j) {
    MatrixXd e = MatrixXd::Zero(n, n);
    e(j, n - 1) = 1.0;
    e(n - 1, j) = 1.0;
    k.pencil.coeffs.push_back(e);
  }
  k.pencil.coeffs.push_back(MatrixXd::Identity(n, n));
  k.interior_direction = VectorXd::Zero(n);
  k.interior_direction(n - 1) = 1.0;
  return k;
}

ConeSpec custom_cone(SymPencil pencil, VectorXd interior_direction) {
  validate(pencil);
  if (!pencil.homogeneous())
    throw DimensionError("custom cone: pencil must not have a constant term");
  if (interior_direction.size() != pencil.num_vars())
    throw DimensionError("custom cone: interior direction has wrong length");
  ConeSpec k;
  k.kind = ConeKind::Custom;
  k.size = pencil.size();
  k.pencil = std::move(pencil);
  k.interior_direction = std::move(interior_direction);
  if (!(k.margin(k.interior_direction) > 0.0))
    throw DimensionError("custom cone: interior direction is not interior");
  return k;
}

VectorXd psd_labels(const MatrixXd& X) {
  const Index m = X.rows();
  VectorXd out(m * (m + 1) / 2);
  Index k = 0;
  for (Index i = 0; i < m; ++i)
    for (Index j = i; j < m; ++j) out(k++) = X(i, j);
  return out;
}

Complex complex_det(const MatrixXcd& M) {
  if (M.rows() != M.cols()) throw DimensionError("complex_det: matrix not square");
  MatrixXcd a = M;
  const Index n = a.rows();
  Complex det = 1.0;
  for (Index k = 0; k < n; ++k) {
    Index piv = k;
    a.col(k).tail(n - k).cwiseAbs().maxCoeff(&piv);
    piv += k;
    if (a(piv, k) == Complex(0.0)) return 0.0;
    if (piv != k) {
      a.row(k).swap(a.row(piv));
      det = -det;
    }
    det *= a(k, k);
    if (k + 1 < n) {
      a.col(k).tail(n - k - 1) /= a(k, k);
      a.bottomRightCorner(n - k - 1, n - k - 1).noalias() -=
          a.col(k).tail(n - k - 1) * a.row(k).tail(n - k - 1);
    }
  }
  return det;
}

MatrixPencil init_form(const DetPoly& f, const VectorXd& e) {
  const MatrixXcd lead = MatrixPencil{std::nullopt, f.pencil.coeffs}(e);
  const auto values = herm_eigenvalues(lead);
  const double norm = std::max(std::abs(values(0)), std::abs(values(values.size() - 1)));
  if (values(0) <= 1e-9 * (1.0 + norm))
    throw PrecisionError("init_form: coefficients do not combine to a positive definite matrix");
  return MatrixPencil{std::nullopt, f.pencil.coeffs};
}

std::vector<Complex> univariate_restriction(const DetPoly& f, const VectorXd& x,
                                            const VectorXd& y) {
  const Index n = f.num_vars();
  if (x.size() != n || y.size() != n)
    throw DimensionError("univariate_restriction: point has wrong length");
  const Index d = f.degree_bound();
  const double radius = 1.0 + x.norm() + y.norm();
  MatrixXcd vander(d + 1, d + 1);
  VectorXcd values(d + 1);
  for (Index k = 0; k <= d; ++k) {
    const double s = std::cos((2.0 * double(k) + 1.0) * std::numbers::pi / (2.0 * double(d + 1)));
    const double t = radius * s;
    double pw = 1.0;
    for (Index j = 0; j <= d; ++j) {
      vander(k, j) = pw;
      pw *= s;
    }
    values(k) = evaluate(f, (x + t * y).cast<Complex>());
  }
  const VectorXcd scaled = vander.colPivHouseholderQr().solve(values);
  std::vector<Complex> out(static_cast<std::size_t>(d + 1));
  double rpow = 1.0;
  for (Index j = 0; j <= d; ++j) {
    out[static_cast<std::size_t>(j)] = scaled(j) / rpow;
    rpow *= radius;
  }
  return out;
}

std::vector<Complex> univariate_restriction(const QuadPoly& f, const VectorXd& x,
                                            const VectorXd& y) {
  if (x.size() != f.num_vars() || y.size() != f.num_vars())
    throw DimensionError("univariate_restriction: point has wrong length");
  const double c0 = x.dot(f.A * x) + f.b.dot(x) + f.c;
  const double c1 = 2.0 * x.dot(f.A * y) + f.b.dot(y);
  const double c2 = y.dot(f.A * y);
  return {c0, c1, c2};
}

}  // namespace kstab
