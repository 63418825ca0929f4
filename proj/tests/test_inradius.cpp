#include "oracles.hpp"
#include "ssc/inradius.hpp"
#include "ssc/random_model.hpp"

#include <gtest/gtest.h>

using namespace ssc;

namespace {

Matrix random_circle_points(int count, Rng& rng) {
  Matrix y(2, count);
  for (int k = 0; k < count; ++k) y.col(k) = random_unit_vector(2, rng);
  return y;
}

}  // namespace

TEST(Inradius, CrossPolytope) {
  const Matrix y = Matrix::Identity(2, 2);
  EXPECT_NEAR(inradius(y, InradiusMethod::Exact2D).value, 1.0 / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(inradius(y, InradiusMethod::Polytope).value, 1.0 / std::sqrt(2.0), 1e-9);
  const Matrix y3 = Matrix::Identity(3, 3);
  EXPECT_NEAR(inradius(y3, InradiusMethod::Polytope).value, 1.0 / std::sqrt(3.0), 1e-9);
}

TEST(Inradius, SinglePointIsSegment) {
  Vector y(3);
  y << 0.0, 0.6, 0.8;
  const auto r = inradius(y, InradiusMethod::Exact2D);
  EXPECT_EQ(r.intrinsic_dim, 1);
  EXPECT_NEAR(r.value, 1.0, 1e-14);
  EXPECT_TRUE(r.certified);
}

TEST(Inradius, EmbeddedPlaneInHigherAmbient) {
  Rng rng(1);
  const Matrix b = random_basis(9, 2, rng);
  const Matrix y = b * Matrix::Identity(2, 2);
  EXPECT_NEAR(inradius(y, InradiusMethod::Exact2D).value, 1.0 / std::sqrt(2.0), 1e-9);
}

TEST(Inradius, ExactAndPolytopeAgree) {
  Rng rng(2);
  for (int t = 0; t < 40; ++t) {
    const Matrix y = random_circle_points(7, rng);
    const double a = inradius(y, InradiusMethod::Exact2D).value;
    const double b = inradius(y, InradiusMethod::Polytope).value;
    EXPECT_NEAR(a, b, 1e-6);
  }
}

TEST(Inradius, ExactBelowAngleGrid) {
  Rng rng(3);
  for (int t = 0; t < 10; ++t) {
    const Matrix y = random_circle_points(9, rng);
    const double exact = inradius(y, InradiusMethod::Exact2D).value;
    const double grid = oracle::inradius_angle_grid(y, 200000);
    EXPECT_LE(exact, grid + 1e-12);
    EXPECT_GE(exact, grid - 2e-5);
  }
}

TEST(Inradius, SignInvariance) {
  Rng rng(4);
  Matrix y = random_circle_points(6, rng);
  const double r = inradius(y, InradiusMethod::Exact2D).value;
  y.col(2) *= -1;
  y.col(4) *= -1;
  EXPECT_NEAR(inradius(y, InradiusMethod::Exact2D).value, r, 1e-12);
}

TEST(Inradius, MonotoneUnderAddingPoints) {
  Rng rng(5);
  Matrix y = random_circle_points(5, rng);
  double prev = inradius(y, InradiusMethod::Polytope).value;
  for (int k = 0; k < 5; ++k) {
    y.conservativeResize(Eigen::NoChange, y.cols() + 1);
    y.col(y.cols() - 1) = random_unit_vector(2, rng);
    const double r = inradius(y, InradiusMethod::Polytope).value;
    EXPECT_GE(r, prev - 1e-12);
    prev = r;
  }
}

TEST(Inradius, SampledIsAnUpperBound) {
  Rng rng(6);
  const Matrix b = random_basis(6, 3, rng);
  Matrix y = b * gaussian_matrix(3, 10, rng);
  for (Index k = 0; k < y.cols(); ++k) y.col(k).normalize();
  const auto exact = inradius(y, InradiusMethod::Polytope);
  const auto sampled = inradius(y, InradiusMethod::Sampled, {.seed = 3});
  EXPECT_FALSE(sampled.certified);
  EXPECT_GE(sampled.value, exact.value - 1e-12);
}

TEST(Inradius, ErrorPaths) {
  Rng rng(7);
  const Matrix y3 = gaussian_matrix(3, 5, rng);
  try {
    inradius(y3, InradiusMethod::Exact2D);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionTooHigh);
  }
  const Matrix big = gaussian_matrix(6, 40, rng);
  try {
    inradius(big, InradiusMethod::Polytope, {.vertex_cap = 1000});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::VertexBlowup);
  }
}

TEST(Inradius, AutoPicksCertifiedRoute) {
  Rng rng(8);
  EXPECT_EQ(inradius_auto(random_circle_points(5, rng)).method, InradiusMethod::Exact2D);
  EXPECT_EQ(inradius_auto(gaussian_matrix(3, 8, rng)).method, InradiusMethod::Polytope);
  const auto big = inradius_auto(gaussian_matrix(6, 40, rng), {.vertex_cap = 1000});
  EXPECT_EQ(big.method, InradiusMethod::Sampled);
  EXPECT_FALSE(big.certified);
}
