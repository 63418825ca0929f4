#include "oracles.hpp"
#include "ssc/lasso.hpp"
#include "ssc/random_model.hpp"

#include <gtest/gtest.h>

using namespace ssc;

TEST(Lasso, SingleAtomSoftThreshold) {
  Matrix y_dict = Matrix::Identity(2, 2);
  Vector y(2);
  y << 1, 0;
  const LassoSolution s = solve_lasso(y_dict, y, 2.0);
  EXPECT_TRUE(s.converged);
  EXPECT_NEAR(s.coeffs(0), 0.5, 1e-12);
  EXPECT_EQ(s.coeffs(1), 0.0);
  EXPECT_NEAR(s.residual(0), 0.5, 1e-12);
  const DualSolution d = recover_dual(s, y_dict, y);
  EXPECT_NEAR(d.v(0), 1.0, 1e-12);
  EXPECT_NEAR(d.feasibility, 1.0, 1e-12);
}

TEST(Lasso, ZeroSolutionLaw) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const Matrix y_dict = gaussian_matrix(6, 4, rng);
    const Vector y = gaussian_matrix(6, 1, rng).col(0);
    const double thresh = 1.0 / (y_dict.transpose() * y).cwiseAbs().maxCoeff();
    const LassoSolution below = solve_lasso(y_dict, y, thresh * 0.999);
    EXPECT_TRUE(below.is_zero());
    EXPECT_EQ(below.residual, y);
    const LassoSolution at = solve_lasso(y_dict, y, thresh);
    EXPECT_TRUE(at.is_zero());
    const LassoSolution above = solve_lasso(y_dict, y, thresh * 1.01);
    EXPECT_FALSE(above.is_zero());
    // c = 0: v = lambda y, feasible iff lambda ||Y^T y||_inf <= 1.
    const DualSolution d = recover_dual(below, y_dict, y);
    EXPECT_LE(d.feasibility, 1.0);
  }
}

TEST(Lasso, MatchesSignPatternOracle) {
  Rng rng(2);
  for (int t = 0; t < 60; ++t) {
    const Index dim = 3 + t % 8, l = 1 + t % 5;
    Matrix y_dict = gaussian_matrix(dim, l, rng);
    for (Index k = 0; k < l; ++k) y_dict.col(k).normalize();
    const Vector y = random_unit_vector(dim, rng);
    const double lambda = 0.5 + 5.0 * std::uniform_real_distribution<double>(0, 1)(rng);
    const LassoSolution s = solve_lasso(y_dict, y, lambda);
    const auto o = oracle::lasso_by_sign_patterns(y_dict, y, lambda);
    EXPECT_TRUE(s.converged);
    EXPECT_NEAR(s.objective, o.objective, 1e-8) << "trial " << t;
    EXPECT_LE(s.gap, 1e-10);
    EXPECT_GE(s.gap, -1e-10);
  }
}

TEST(Lasso, EightByFiveAtLambdaThree) {
  Rng rng(3);
  const Matrix y_dict = gaussian_matrix(8, 5, rng);
  const Vector y = gaussian_matrix(8, 1, rng).col(0);
  const LassoSolution s = solve_lasso(y_dict, y, 3.0);
  const auto o = oracle::lasso_by_sign_patterns(y_dict, y, 3.0);
  EXPECT_NEAR(s.objective, o.objective, 1e-8);
  EXPECT_LE((s.coeffs - o.coeffs).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Lasso, ResidualAndDualInvariants) {
  Rng rng(4);
  for (int t = 0; t < 100; ++t) {
    const Matrix y_dict = gaussian_matrix(10, 15, rng);
    const Vector y = gaussian_matrix(10, 1, rng).col(0);
    const LassoSolution s = solve_lasso(y_dict, y, 2.0);
    EXPECT_LE((s.residual - (y - y_dict * s.coeffs)).cwiseAbs().maxCoeff(), 1e-10);
    const DualSolution d = recover_dual(s, y_dict, y);
    EXPECT_LE(d.feasibility, 1.0 + 1e-8);
    EXPECT_LE((d.v - s.lambda * s.residual).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(d.gap, 0.0, 1e-9 * std::max(1.0, s.objective));
  }
}

TEST(Lasso, DualStaysInSpanWhenDictionarySpansTarget) {
  Rng rng(5);
  const Matrix b = random_basis(12, 3, rng);
  const Matrix y_dict = b * gaussian_matrix(3, 8, rng);
  const Vector y = b * gaussian_matrix(3, 1, rng).col(0);
  const LassoSolution s = solve_lasso(y_dict, y, 4.0);
  const DualSolution d = recover_dual(s, y_dict, y);
  EXPECT_LE((d.v - b * (b.transpose() * d.v)).norm(), 1e-10);
}

TEST(Lasso, InvalidInputs) {
  const Matrix y_dict = Matrix::Identity(2, 2);
  const Vector y = Vector::Ones(2);
  EXPECT_THROW(solve_lasso(y_dict, y, 0.0), Error);
  EXPECT_THROW(solve_lasso(y_dict, Vector::Ones(3), 1.0), Error);
  EXPECT_THROW(solve_lasso(Matrix(2, 0), y, 1.0), Error);
}

TEST(Lasso, InfeasibleDualIsReported) {
  const Matrix y_dict = Matrix::Identity(2, 2);
  Vector y(2);
  y << 1, 0;
  LassoSolution fake;
  fake.lambda = 10.0;
  fake.coeffs = Vector::Zero(2);
  fake.residual = y;
  try {
    recover_dual(fake, y_dict, y);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InfeasibleDual);
  }
}

TEST(Lemma1, SingleAtom) {
  Matrix y_dict(2, 1);
  y_dict << 1, 0;
  Vector y(2);
  y << 1, 0;
  const LassoSolution s = solve_lasso(y_dict, y, 2.0);
  const DualSolution d = recover_dual(s, y_dict, y);
  const Lemma1Report r = check_lemma1_bounds(d, 1.0, 1.0, 2.0);
  EXPECT_NEAR(r.lower, 1.0, 1e-15);
  EXPECT_NEAR(r.upper, 3.0, 1e-15);
  EXPECT_NEAR(r.norm, 1.0, 1e-12);
  EXPECT_TRUE(r.holds);
}

TEST(Lemma1, NotApplicableAtOrBelowThreshold) {
  DualSolution d;
  d.v = Vector::Ones(2);
  try {
    check_lemma1_bounds(d, 0.5, 1.0, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotApplicable);
  }
}

TEST(Lemma1, BoundaryLambda) {
  Rng rng(6);
  const Matrix b = random_basis(8, 3, rng);
  Matrix comp = b * gaussian_matrix(3, 6, rng);
  for (Index k = 0; k < comp.cols(); ++k) comp.col(k).normalize();
  Vector y = b * gaussian_matrix(3, 1, rng).col(0);
  y.normalize();
  const double zeta = (comp.transpose() * y).cwiseAbs().maxCoeff();
  const double lambda = 1.0 / zeta + 1e-12;
  const LassoSolution s = solve_lasso(comp, y, lambda);
  const Lemma1Report r = check_lemma1_bounds(recover_dual(s, comp, y), zeta, 1.0, lambda);
  EXPECT_TRUE(r.holds) << r.lower_slack << " " << r.upper_slack;
}

TEST(Lemma1, RandomReducedProblems) {
  long violations = 0;
  for (int t = 0; t < 100; ++t) {
    RandomModelParams p{.n = 1, .d = 4, .D = 30, .rho = 3, .seed = static_cast<std::uint64_t>(t), .m = 5};
    const auto inst = generate(p);
    const Matrix x = inst.data.zero_filled();
    const Vector y = x.col(0);
    const Matrix comp = x.rightCols(x.cols() - 1);
    const double zeta = (comp.transpose() * y).cwiseAbs().maxCoeff();
    const double lambda = 2.0 / zeta;
    const LassoSolution s = solve_lasso(comp, y, lambda);
    violations += !check_lemma1_bounds(recover_dual(s, comp, y), zeta, y.norm(), lambda).holds;
  }
  EXPECT_EQ(violations, 0);
}
