#include <gtest/gtest.h>

#include "support.hpp"

using namespace kstab;
using kstab::testing::m2;

namespace {

sdp::SdpProblem scalar_problem(double rhs) {
  sdp::SdpProblem p;
  p.block_dim = 1;
  p.constraints.push_back({MatrixXd::Identity(1, 1), 0.0, rhs});
  return p;
}

}  // namespace

TEST(SdpFeasibility, PositiveScalar) {
  const auto sol = sdp::solve(scalar_problem(1.0));
  EXPECT_EQ(sol.status, sdp::Status::Feasible);
  EXPECT_NEAR(sol.X(0, 0), 1.0, 1e-8);
}

TEST(SdpFeasibility, NegativeScalarHasVerifiedRay) {
  const auto p = scalar_problem(-1.0);
  const auto sol = sdp::solve(p);
  ASSERT_EQ(sol.status, sdp::Status::Infeasible);
  ASSERT_TRUE(sol.farkas.has_value());
  EXPECT_LT(sol.farkas->bty, 0.0);
  EXPECT_TRUE(sdp::verify_farkas(p, *sol.farkas).has_value());
}

TEST(SdpFeasibility, BoundaryPointIsFeasible) {
  const auto sol = sdp::solve(scalar_problem(0.0));
  EXPECT_EQ(sol.status, sdp::Status::Feasible);
  EXPECT_NEAR(sol.lambda, 0.0, 1e-7);
}

TEST(SdpFeasibility, InconsistentLinearSystem) {
  sdp::SdpProblem p;
  p.block_dim = 2;
  p.constraints.push_back({MatrixXd::Identity(2, 2), 0.0, 1.0});
  p.constraints.push_back({MatrixXd::Identity(2, 2), 0.0, 2.0});
  const auto sol = sdp::solve(p);
  ASSERT_EQ(sol.status, sdp::Status::Infeasible);
  ASSERT_TRUE(sol.farkas);
  EXPECT_TRUE(sdp::verify_farkas(p, *sol.farkas));
}

TEST(SdpFeasibility, RejectsBogusRay) {
  const auto p = scalar_problem(1.0);
  sdp::FarkasRay ray;
  ray.y = VectorXd::Ones(1);
  EXPECT_FALSE(sdp::verify_farkas(p, ray).has_value());
}

TEST(SdpMaximizeNu, SimpleBound) {
  // X = 1 - nu with X >= 0: nu* = 1.
  sdp::SdpProblem p;
  p.block_dim = 1;
  p.has_scalar = true;
  p.objective = sdp::Objective::MaximizeNu;
  p.constraints.push_back({MatrixXd::Identity(1, 1), 1.0, 1.0});
  const auto sol = sdp::solve(p);
  ASSERT_EQ(sol.status, sdp::Status::Feasible);
  EXPECT_NEAR(sol.nu, 1.0, 1e-6);
  EXPECT_LT(sdp::constraint_residual(p, sol.X, sol.nu), 1e-8);
}

TEST(InteriorDirection, PsdCone) {
  const auto dir = sdp::find_interior_direction(psd_pencil(2).pencil);
  ASSERT_EQ(dir.status, sdp::Status::Feasible);
  EXPECT_GT(dir.margin, 0.5);
  EXPECT_GT(psd_pencil(2).margin(dir.e), 0.0);
}

TEST(InteriorDirection, IndefinitePencilHasNone) {
  MatrixPencil p{std::nullopt, {m2(1, 0, 0, -1), m2(-1, 0, 0, 1)}};
  EXPECT_NE(sdp::find_interior_direction(p).status, sdp::Status::Feasible);
}

TEST(InteriorDirection, HermitianPencil) {
  MatrixXcd a(2, 2);
  a << 1, Complex(0, 0.5), Complex(0, -0.5), 1;
  MatrixPencil p{std::nullopt, {a}};
  EXPECT_EQ(sdp::find_interior_direction(p).status, sdp::Status::Feasible);
}

TEST(SliceBounded, LorentzAlongAxis) {
  VectorXd e = VectorXd::Zero(3);
  e(2) = 1.0;
  EXPECT_TRUE(sdp::slice_bounded(lorentz_pencil(3).pencil, e));
}

TEST(SliceBounded, OrthantAlongCoordinateIsUnbounded) {
  VectorXd e = VectorXd::Zero(3);
  e(0) = 1.0;
  EXPECT_FALSE(sdp::slice_bounded(orthant_pencil(3).pencil, e));
}

TEST(SliceBounded, OrthantAlongOnesIsBounded) {
  EXPECT_TRUE(sdp::slice_bounded(orthant_pencil(3).pencil, VectorXd::Ones(3)));
}
