#include <gtest/gtest.h>

#include "support.hpp"

using namespace kstab;

namespace {

QuadPoly quad(const MatrixXd& a, const VectorXd& b, double c) { return QuadPoly{a, b, c}; }

MatrixXd diag(std::initializer_list<double> v) {
  VectorXd d(Index(v.size()));
  Index k = 0;
  for (double x : v) d(k++) = x;
  return d.asDiagonal();
}

// Checks f(S w + t) = kappa N(w) at random points.
void expect_normal_form(const QuadPoly& f, const QuadClassification& c) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 5; ++k) {
    VectorXd w(f.num_vars());
    for (Index j = 0; j < w.size(); ++j) w(j) = normal(rng);
    const VectorXd z = c.S * w + c.t;
    EXPECT_NEAR(f(z.cast<Complex>()).real(), c.kappa * normal_form_value(c, w), 1e-9);
  }
}

}  // namespace

TEST(Classify, TypeI) {
  const QuadPoly f = quad(diag({1, 1, -1}), VectorXd::Zero(3), 0.0);
  const auto c = classify(f);
  EXPECT_EQ(c.q_type, QuadType::I);
  EXPECT_EQ(c.p, 2);
  EXPECT_EQ(c.r, 3);
  expect_normal_form(f, c);
}

TEST(Classify, TypeIINegatedConstant) {
  const QuadPoly f = quad(diag({1, 1, -1}), VectorXd::Zero(3), -2.0);
  const auto c = classify(f);
  EXPECT_EQ(c.q_type, QuadType::II);
  expect_normal_form(f, c);
}

TEST(Classify, TypeIIIWithLinearPart) {
  VectorXd b = VectorXd::Zero(3);
  b(2) = 1.0;
  const QuadPoly f = quad(diag({1, -1, 0}), b, 0.3);
  const auto c = classify(f);
  EXPECT_EQ(c.q_type, QuadType::III);
  EXPECT_EQ(c.r, 2);
  expect_normal_form(f, c);
}

TEST(Classify, ShiftedTypeI) {
  // (z1 - 1)^2 + (z2 + 2)^2 - z3^2
  VectorXd b(3);
  b << -2, 4, 0;
  const QuadPoly f = quad(diag({1, 1, -1}), b, 5.0);
  const auto c = classify(f);
  EXPECT_EQ(c.q_type, QuadType::I);
  expect_normal_form(f, c);
}

TEST(Classify, Errors) {
  EXPECT_THROW(classify(quad(MatrixXd::Zero(3, 3), VectorXd::Zero(3), 0.0)), ZeroPolynomialError);
  EXPECT_THROW(classify(quad(MatrixXd::Zero(3, 3), VectorXd::Ones(3), 0.0)), UnsupportedQuadricError);
}

TEST(ImprojContains, FactoringTypeI) {
  // (z1 + z3)^2 - z2^2: imaginary projection is y1 + y3 = +-y2.
  MatrixXd a(3, 3);
  a << 1, 0, 1, 0, -1, 0, 1, 0, 1;
  const QuadPoly f = quad(a, VectorXd::Zero(3), 0.0);
  VectorXd y(3);
  y << 1, 2, 1;
  EXPECT_TRUE(improj_contains(f, y));
  y << 1, 1, 1;
  EXPECT_FALSE(improj_contains(f, y));
}

TEST(ImprojContains, LorentzTypeI) {
  // z1^2 + z2^2 - z3^2: zeros have Im z outside the open cone.
  const QuadPoly f = quad(diag({1, 1, -1}), VectorXd::Zero(3), 0.0);
  VectorXd inside(3), outside(3);
  inside << 0.1, 0.2, 1.0;
  outside << 1.0, 0.5, 0.2;
  EXPECT_FALSE(improj_contains(f, inside));
  EXPECT_TRUE(improj_contains(f, outside));
}

TEST(ImprojContains, TypeIIMatchesExplicitZero) {
  // z1^2 + z2^2 - z3^2 + 1
  const QuadPoly f = quad(diag({1, 1, -1}), VectorXd::Zero(3), 1.0);
  VectorXd y(3);
  // Im f = 0 forces x3 = 0, then Re f = |x'|^2 + 1.25 > 0.
  y << 0.0, 0.0, 0.5;
  EXPECT_FALSE(improj_contains(f, y));
  y << 2.0, 0.0, 0.0;
  VectorXcd z(3);
  z << Complex(0, 2), std::sqrt(3.0), 0.0;
  ASSERT_LT(std::abs(f(z)), 1e-12);
  EXPECT_TRUE(improj_contains(f, y));
}

TEST(ImprojContains, UnsupportedThrows) {
  const QuadPoly f = quad(diag({1, 1, -1, -1}), VectorXd::Zero(4), 1.0);
  EXPECT_THROW(improj_contains(f, VectorXd::Ones(4)), UnsupportedQuadricError);
}

TEST(FPencil, FourVariableIdentity) {
  MatrixXd a(4, 4);
  a << -15, 0, 0, -6, 0, 1, 0, 0, 0, 0, 1, 0, -6, 0, 0, 0;
  const LorentzPencil lp = f_pencil(a);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  for (int k = 0; k < 7; ++k) {
    VectorXd z(4);
    for (Index j = 0; j < 4; ++j) z(j) = normal(rng);
    const double lhs = lp.F(z).determinant();
    const double rhs = -std::pow(lp.ell.dot(z), 2) * z.dot(a * z);
    EXPECT_LT(std::abs(lhs - rhs), 1e-9 * (1 + std::abs(rhs)));
  }
}

TEST(FPencil, RejectsNonLorentzian) {
  EXPECT_THROW(f_pencil(MatrixXd::Identity(3, 3)), SignatureError);
}

TEST(RealZero, Lorentzian) {
  // 1 - z1^2 - z2^2 is real zero; 1 + z1^2 is not.
  EXPECT_TRUE(real_zero_check(quad(diag({-1, -1}), VectorXd::Zero(2), 1.0)));
  EXPECT_FALSE(real_zero_check(quad(diag({1, -1}), VectorXd::Zero(2), 1.0)));
  EXPECT_THROW(real_zero_check(quad(diag({1, -1}), VectorXd::Zero(2), -1.0)), NormalizationError);
}
