#include <gtest/gtest.h>

#include <random>

#include "oracles/oracles.hpp"
#include "qcar/dense_eigen.hpp"
#include "qcar/vehicle_model.hpp"

using namespace qcar;

namespace {

Eigen::MatrixXd random_matrix(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  Eigen::MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = g(rng);
  return A;
}

}  // namespace

TEST(DenseEigen, Diagonal) {
  Eigen::MatrixXd A = Eigen::Vector2d(-1, -2).asDiagonal();
  const auto ev = eigenvalues(A);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_EQ(ev[0], Complex(-2, 0));
  EXPECT_EQ(ev[1], Complex(-1, 0));
}

TEST(DenseEigen, UndampedOscillator) {
  Eigen::MatrixXd A(2, 2);
  A << 0, 1, -4, 0;
  const auto ev = eigenvalues(A);
  ASSERT_EQ(ev.size(), 2u);
  EXPECT_NEAR(ev[0].real(), 0.0, 1e-14);
  EXPECT_NEAR(ev[1].real(), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(ev[0].imag()), 2.0, 1e-14);
  EXPECT_EQ(ev[0], std::conj(ev[1]));
}

TEST(DenseEigen, ClosedFormTwoByTwo) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd A = random_matrix(2, rng);
    const double tr = A.trace(), det = A.determinant();
    const Complex disc = std::sqrt(Complex(tr * tr / 4 - det, 0));
    const std::vector<Complex> want = {tr / 2 + disc, tr / 2 - disc};
    EXPECT_LT(oracle::match_error(eigenvalues(A), want), 1e-12);
  }
}

TEST(DenseEigen, CompanionMatrixRoots) {
  // (s + 1)(s + 2)(s^2 + 2 s + 10)
  const oracle::Poly p = oracle::poly_mul(oracle::poly_mul({1, 1}, {2, 1}), {10, 2, 1});
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(4, 4);
  for (int i = 1; i < 4; ++i) C(i, i - 1) = 1.0;
  for (int i = 0; i < 4; ++i) C(i, 3) = -p[static_cast<std::size_t>(i)];
  const std::vector<Complex> want = {-1.0, -2.0, Complex(-1, 3), Complex(-1, -3)};
  EXPECT_LT(oracle::match_error(eigenvalues(C), want), 1e-12);
}

TEST(DenseEigen, RandomMatricesAgainstCharPolyRoots) {
  std::mt19937_64 rng(11);
  for (int n : {3, 4, 5, 6}) {
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::MatrixXd A = random_matrix(n, rng);
      const auto want = oracle::roots(oracle::char_poly(A));
      EXPECT_LT(oracle::match_error(eigenvalues(A), want), 1e-8) << "n=" << n;
    }
  }
}

TEST(DenseEigen, ConjugatePairsAndSorting) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto ev = eigenvalues(random_matrix(8, rng));
    for (std::size_t i = 0; i < ev.size(); ++i) {
      if (ev[i].imag() == 0.0) continue;
      int partners = 0;
      for (const auto& z : ev) partners += z == std::conj(ev[i]);
      EXPECT_GE(partners, 1);
    }
    for (std::size_t i = 1; i < ev.size(); ++i) EXPECT_LE(ev[i - 1].real(), ev[i].real());
  }
}

TEST(DenseEigen, TraceAndDeterminantPreserved) {
  std::mt19937_64 rng(5);
  for (int n = 1; n <= 12; ++n) {
    const Eigen::MatrixXd A = random_matrix(n, rng);
    Complex sum = 0, prod = 1;
    for (const auto& z : eigenvalues(A)) {
      sum += z;
      prod *= z;
    }
    EXPECT_NEAR(sum.real(), A.trace(), 1e-10 * (1 + A.norm()));
    EXPECT_NEAR(prod.real(), A.determinant(), 1e-9 * (1 + std::abs(A.determinant())));
    EXPECT_NEAR(prod.imag(), 0.0, 1e-9 * (1 + std::abs(A.determinant())));
  }
}

TEST(DenseEigen, BadlyScaledPlantSpectrum) {
  const StateSpace ss = assemble_state_space({});
  const Eigen::MatrixXd A = ss.A;
  const auto want = oracle::roots(oracle::char_poly(A));
  EXPECT_LT(oracle::match_error(eigenvalues(A), want), 1e-10);
}

TEST(DenseEigen, BalancingIsASimilarity) {
  Eigen::MatrixXd A(3, 3);
  A << 1, 1e6, 0, 1e-6, 2, 1e4, 0, 1e-4, 3;
  Eigen::MatrixXd B = A;
  const Eigen::VectorXd d = balance(B);
  const Eigen::MatrixXd back = d.asDiagonal() * B * d.cwiseInverse().asDiagonal();
  EXPECT_TRUE(back.isApprox(A, 1e-14));
  for (int i = 0; i < 3; ++i) EXPECT_EQ(std::exp2(std::round(std::log2(d[i]))), d[i]);
  EXPECT_LT(B.norm(), A.norm());
}

TEST(DenseEigen, HessenbergFactorization) {
  std::mt19937_64 rng(9);
  const Eigen::MatrixXd A = random_matrix(7, rng);
  Eigen::MatrixXd Q;
  const Eigen::MatrixXd H = hessenberg(A, &Q);
  for (int i = 2; i < 7; ++i)
    for (int j = 0; j < i - 1; ++j) EXPECT_EQ(H(i, j), 0.0);
  EXPECT_TRUE((Q * H * Q.transpose()).isApprox(A, 1e-12));
  EXPECT_TRUE((Q.transpose() * Q).isIdentity(1e-12));
}

TEST(DenseEigen, ComplexSchurAndReordering) {
  std::mt19937_64 rng(13);
  const Eigen::MatrixXd A = random_matrix(8, rng);
  ComplexSchur s = complex_schur(A.cast<Complex>());
  const auto check = [&](const ComplexSchur& cs) {
    EXPECT_TRUE((cs.Z * cs.T * cs.Z.adjoint()).isApprox(A.cast<Complex>(), 1e-11));
    EXPECT_TRUE((cs.Z.adjoint() * cs.Z).isIdentity(1e-12));
    for (int i = 1; i < 8; ++i)
      for (int j = 0; j < i; ++j) EXPECT_LT(std::abs(cs.T(i, j)), 1e-12 * A.norm());
  };
  check(s);
  const int k = reorder_schur(s, [](Complex z) { return z.real() < 0; });
  check(s);
  int stable = 0;
  for (const auto& z : eigenvalues(A)) stable += z.real() < 0;
  EXPECT_EQ(k, stable);
  for (int i = 0; i < 8; ++i) EXPECT_EQ(s.T(i, i).real() < 0, i < k) << i;
}

TEST(DenseEigen, RejectsNonFiniteAndNonSquare) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
  A(1, 1) = std::nan("");
  EXPECT_THROW(eigenvalues(A), std::invalid_argument);
  EXPECT_THROW(eigenvalues(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
  EXPECT_TRUE(eigenvalues(Eigen::MatrixXd(0, 0)).empty());
}
