#include <gtest/gtest.h>

#include "support.hpp"

using namespace kstab;
using kstab::testing::m2;

TEST(Cones, PsdPencilReproducesLabelMatrix) {
  const ConeSpec k = psd_pencil(3);
  ASSERT_EQ(k.num_vars(), 6);
  MatrixXd x(3, 3);
  x << 2, 1, -1, 1, 3, 0.5, -1, 0.5, 4;
  EXPECT_LT((k.pencil(psd_labels(x)) - x).norm(), 1e-15);
  EXPECT_NEAR(k.margin(k.interior_direction), 1.0, 1e-12);
}

TEST(Cones, OrthantIsDiagonal) {
  const ConeSpec k = orthant_pencil(3);
  VectorXd x(3);
  x << 1, -2, 3;
  EXPECT_NEAR(k.margin(x), -2.0, 1e-15);
}

TEST(Cones, LorentzMembership) {
  const ConeSpec k = lorentz_pencil(3);
  VectorXd inside(3), outside(3);
  inside << 0.3, 0.4, 1.0;
  outside << 1.0, 1.0, 1.0;
  EXPECT_GT(k.margin(inside), 0.0);
  EXPECT_LT(k.margin(outside), 0.0);
}

TEST(Cones, CustomRejectsNonInteriorDirection) {
  SymPencil p{std::nullopt, {MatrixXd::Identity(2, 2), -MatrixXd::Identity(2, 2)}};
  VectorXd bad(2);
  bad << 0, 1;
  EXPECT_THROW(custom_cone(p, bad), DimensionError);
}

TEST(Pencil, ValidateRejectsNonHermitian) {
  MatrixPencil p{std::nullopt, {m2(1, 2, 0, 1)}};
  EXPECT_THROW(validate(p), DimensionError);
}

TEST(Pencil, ChangeOfVariables) {
  SymPencil p{std::nullopt, {MatrixXd::Identity(1, 1), 2 * MatrixXd::Identity(1, 1)}};
  MatrixXd t(2, 2);
  t << 1, 1, 0, 1;
  const SymPencil q = change_of_variables(p, t);
  VectorXd z(2);
  z << 0.7, -1.3;
  EXPECT_NEAR(q(z)(0, 0), p(VectorXd(t * z))(0, 0), 1e-15);
  EXPECT_THROW(change_of_variables(p, MatrixXd::Zero(2, 2)), SingularMatrixError);
}

TEST(Determinant, ComplexDetMatchesEigen) {
  MatrixXcd a(3, 3);
  a << Complex(1, 1), 2, 0, Complex(0, -1), 3, 1, 4, Complex(2, 2), -1;
  EXPECT_LT(std::abs(complex_det(a) - a.determinant()), 1e-12);
}

TEST(InitForm, RejectsIndefiniteDirection) {
  DetPoly f{MatrixPencil{std::nullopt, {m2(1, 0, 0, -1), m2(0, 1, 1, 0)}}};
  VectorXd e(2);
  e << 1, 0;
  EXPECT_THROW(init_form(f, e), PrecisionError);
}

TEST(UnivariateRestriction, MatchesDirectEvaluation) {
  DetPoly f{MatrixPencil{m2(1, 0.5, 0.5, 2), {m2(4, 1, 1, 8), m2(0, 4, 4, 0), m2(2, 0, 0, 4)}}};
  VectorXd x(3), y(3);
  x << 0.2, -0.4, 1.1;
  y << 1, 0.1, 1;
  const auto c = univariate_restriction(f, x, y);
  for (double t : {-1.5, 0.0, 0.8, 2.5}) {
    const Complex direct = evaluate(f, VectorXd(x + t * y).cast<Complex>());
    EXPECT_LT(std::abs(poly_eval(c, Complex(t)) - direct), 1e-9 * (1 + std::abs(direct)));
  }
}

TEST(QuadPoly, EvaluatesAffineQuadratic) {
  QuadPoly q{MatrixXd::Identity(2, 2), VectorXd::Ones(2), -1.0};
  VectorXcd z(2);
  z << Complex(0, 1), 1.0;
  // -1 + 1 + i + 1 - 1
  EXPECT_LT(std::abs(q(z) - Complex(0, 1)), 1e-15);
}
