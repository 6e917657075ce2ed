#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rieffel/algebra.hpp"
#include "rieffel/rng.hpp"

namespace rieffel {
namespace {

MatrixElement random_matrix(int k, Rng& rng) {
  Eigen::MatrixXcd m(k, k);
  for (int r = 0; r < k; ++r)
    for (int c = 0; c < k; ++c) m(r, c) = rng.normal_complex();
  return MatrixElement(m);
}

TEST(Algebra, NormOfIdentityAndZero) {
  for (int k : {1, 2, 3, 8}) {
    EXPECT_NEAR(cstar_norm(MatrixElement::identity(k)), 1.0, 1e-15);
    EXPECT_EQ(cstar_norm(MatrixElement::zero(k)), 0.0);
  }
}

TEST(Algebra, NilpotentNormMatchesSvdOracle) {
  Eigen::MatrixXcd m(2, 2);
  m << 0, 2, 0, 0;
  MatrixElement a(m);
  EXPECT_NEAR(cstar_norm(a), 2.0, 1e-14);
  EXPECT_NEAR(cstar_norm(a), oracles::svd_norm(a), 1e-13);
}

TEST(Algebra, NormMatchesSvdOracleOnRandomEnsemble) {
  Rng rng(31);
  for (int k : {1, 2, 4, 8}) {
    for (int t = 0; t < 20; ++t) {
      MatrixElement a = random_matrix(k, rng);
      EXPECT_NEAR(cstar_norm(a), oracles::svd_norm(a), 1e-12 * (1.0 + oracles::svd_norm(a)));
    }
  }
}

TEST(Algebra, AdjointExamples) {
  EXPECT_NEAR(cstar_norm(adjoint(MatrixElement::identity(3)) - MatrixElement::identity(3)), 0.0,
              1e-15);
  MatrixElement i1 = MatrixElement::scalar(1, Complex(0, 1));
  EXPECT_NEAR(std::abs(adjoint(i1)(0, 0) - Complex(0, -1)), 0.0, 1e-15);
}

TEST(Algebra, AdjointIsAnInvolution) {
  Rng rng(32);
  for (int t = 0; t < 10; ++t) {
    MatrixElement a = random_matrix(3, rng);
    EXPECT_NEAR(cstar_norm(adjoint(adjoint(a)) - a), 0.0, 1e-15);
  }
}

TEST(Algebra, CStarIdentity) {
  Rng rng(33);
  for (int k : {1, 2, 5}) {
    for (int t = 0; t < 20; ++t) {
      MatrixElement a = random_matrix(k, rng);
      double lhs = cstar_norm(adjoint(a) * a);
      double rhs = cstar_norm(a) * cstar_norm(a);
      EXPECT_NEAR(lhs, rhs, 1e-12 * rhs);
    }
  }
}

TEST(Algebra, Submultiplicativity) {
  Rng rng(34);
  for (int t = 0; t < 50; ++t) {
    MatrixElement a = random_matrix(4, rng);
    MatrixElement b = random_matrix(4, rng);
    EXPECT_LE(cstar_norm(a * b), cstar_norm(a) * cstar_norm(b) * (1.0 + 1e-12));
  }
}

TEST(Algebra, PositiveMatrixNormIsTopEigenvalue) {
  Rng rng(35);
  for (int t = 0; t < 10; ++t) {
    MatrixElement a = random_matrix(3, rng);
    MatrixElement pos = adjoint(a) * a;
    EXPECT_NEAR(cstar_norm(pos), oracles::top_eigenvalue(pos),
                1e-12 * (1.0 + oracles::top_eigenvalue(pos)));
  }
}

TEST(Algebra, RejectsNonSquare) {
  EXPECT_THROW(MatrixElement(Eigen::MatrixXcd::Zero(2, 3)), std::invalid_argument);
}

}  // namespace
}  // namespace rieffel
