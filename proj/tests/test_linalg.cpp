#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include "support.hpp"

using namespace kstab;
using kstab::testing::random_hermitian;
using kstab::testing::random_symmetric;

TEST(SymEigen, MatchesReferenceSolver) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd a = random_symmetric(2 + trial % 6, rng);
    const auto ours = sym_eigen(a);
    Eigen::SelfAdjointEigenSolver<MatrixXd> ref(a);
    EXPECT_LT((ours.values - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
    const MatrixXd rebuilt = ours.vectors * ours.values.asDiagonal() * ours.vectors.transpose();
    EXPECT_LT((rebuilt - a).norm(), 1e-12);
  }
}

TEST(SymEigen, RejectsNonSquare) {
  EXPECT_THROW(sym_eigen(MatrixXd::Zero(2, 3)), DimensionError);
}

TEST(HermitianEmbedding, RoundTripsAndDoublesSpectrum) {
  std::mt19937_64 rng(2);
  const MatrixXcd h = random_hermitian(4, rng);
  const MatrixXd e = herm_to_real_embed(h);
  EXPECT_LT((e - e.transpose()).norm(), 1e-15);
  EXPECT_LT((real_to_herm(e) - h).norm(), 1e-14);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> ref(h);
  EXPECT_LT((herm_eigenvalues(h) - ref.eigenvalues()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Inertia, CountsSigns) {
  MatrixXd a = MatrixXd::Zero(4, 4);
  a.diagonal() << 3, -2, 0, 5;
  EXPECT_EQ(inertia(a), (Inertia{2, 1, 1}));
}

TEST(CongruenceToLorentz, ReproducesA) {
  MatrixXd a(4, 4);
  a << -15, 0, 0, -6, 0, 1, 0, 0, 0, 0, 1, 0, -6, 0, 0, 0;
  const MatrixXd t = congruence_to_lorentz(a);
  MatrixXd j = MatrixXd::Identity(4, 4);
  j(3, 3) = -1;
  EXPECT_LT((t.transpose() * j * t - a).norm(), 1e-12);
}

TEST(CongruenceToLorentz, RejectsWrongSignature) {
  EXPECT_THROW(congruence_to_lorentz(MatrixXd::Identity(3, 3)), SignatureError);
}

TEST(KhatriRao, ScalesBlocks) {
  MatrixXd m(2, 2);
  m << 1, 2, 2, 3;
  const MatrixXd c = MatrixXd::Ones(4, 4);
  const MatrixXd k = khatri_rao(m, c, 2);
  EXPECT_DOUBLE_EQ(k(0, 3), 2.0);
  EXPECT_DOUBLE_EQ(k(3, 3), 3.0);
  EXPECT_THROW(khatri_rao(m, MatrixXd::Ones(3, 3), 2), DimensionError);
}

TEST(CompressBlocks, SumsWeightedBlocks) {
  MatrixXd m(2, 2);
  m << 0, 1, 1, 0;
  MatrixXd c = MatrixXd::Zero(4, 4);
  c.block(0, 2, 2, 2) << 0, 1, 0, 0;
  c.block(2, 0, 2, 2) << 0, 0, 1, 0;
  MatrixXd expected(2, 2);
  expected << 0, 1, 1, 0;
  EXPECT_LT((compress_blocks(m, c, 2) - expected).norm(), 1e-15);
}

TEST(PolyRoots, RecoversKnownRoots) {
  const std::vector<Complex> roots{Complex(1, 0), Complex(-2, 0), Complex(0.5, 3), Complex(0.5, -3)};
  const auto coeffs = poly_from_roots(roots, Complex(2.0, 0.0));
  auto found = poly_roots(coeffs);
  ASSERT_EQ(found.size(), roots.size());
  for (const auto& r : roots) {
    double best = 1e9;
    for (const auto& f : found) best = std::min(best, std::abs(f - r));
    EXPECT_LT(best, 1e-10);
  }
}

TEST(PolyRoots, DegreeDropThrows) {
  EXPECT_THROW(poly_roots({Complex(1.0), Complex(2.0), Complex(0.0)}), DegreeDropError);
  EXPECT_THROW(poly_roots({Complex(0.0), Complex(0.0)}), DegreeDropError);
}

TEST(PolyEval, HornerAndDerivative) {
  const std::vector<Complex> c{Complex(1), Complex(-3), Complex(2)};  // 2t^2 - 3t + 1
  EXPECT_NEAR(std::abs(poly_eval(c, Complex(1.0))), 0.0, 1e-15);
  EXPECT_NEAR(poly_derivative(c, Complex(2.0)).real(), 5.0, 1e-15);
}
