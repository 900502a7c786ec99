#pragma once

// Affine classification of real quadrics, imaginary-projection membership,
// Lorentz-type determinantal pencils and the real-zero test.

#include "kstab/model.hpp"

namespace kstab {

enum class QuadType { I, II, III };

std::string to_string(QuadType t);

/// f(S w + t) = kappa * N(w), where N is the normal form
///   I:   sum_{j<=p} w_j^2 - sum_{p<j<=r} w_j^2
///   II:  sum_{j<=p} w_j^2 - sum_{p<j<=r} w_j^2 + 1
///   III: sum_{j<=p} w_j^2 - sum_{p<j<=r} w_j^2 + w_{r+1}
/// Types I and III are sign-normalized to p >= r/2 (negated = kappa < 0).
/// Type II keeps its constant at +1, so p may be any value in [0, r].
struct QuadClassification {
  QuadType q_type = QuadType::I;
  Index p = 0;
  Index r = 0;
  bool negated = false;
  double kappa = 1.0;
  MatrixXd S;
  VectorXd t;
};

/// Throws ZeroPolynomialError for f = 0, UnsupportedQuadricError when A = 0.
QuadClassification classify(const QuadPoly& f);

/// The normal form N(w) of a classification.
double normal_form_value(const QuadClassification& c, const VectorXd& w);

/// Whether y lies in the imaginary projection of f. Supported: type I with
/// rank <= 2 factoring into real linear forms, type I with A (or -A) of
/// inertia (n-1, 1, 0), and type II with r = n >= 3 and p in {1, n-1}.
bool improj_contains(const QuadPoly& f, const VectorXd& y);

struct LorentzPencil {
  MatrixXd T;    // A = T' J T
  SymPencil F;   // F(z) = lorentz_pencil(n)(T z)
  VectorXd ell;  // last row of T
};

/// det F(z) = -ell(z)^{n-2} z' A z. Throws SignatureError unless inertia(A)
/// is (n-1, 1, 0).
LorentzPencil f_pencil(const SymMatrix& A);

/// For f with f(0) > 0: after dividing by f(0), whether A - b b'/4 is
/// negative semidefinite (max eigenvalue <= 1e-9). NormalizationError if
/// f(0) <= 0.
bool real_zero_check(const QuadPoly& f);

}  // namespace kstab
