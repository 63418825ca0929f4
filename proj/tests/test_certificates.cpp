#include "oracles.hpp"
#include "ssc/certificates.hpp"
#include "ssc/inradius.hpp"
#include "ssc/pipeline.hpp"
#include "ssc/random_model.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace ssc;

namespace {

double quadratic_pzf(double l, double z, double e, double mu, double g) {
  const double a = mu / (g * e);
  return l * l + (a - 1 / (2 * z)) * l - (1 / (2 * e * e * g) + 1 / (2 * z * z) + a / (2 * z));
}

double quadratic_zf(double l, double z, double e, double mu, double g) {
  const double a = mu / (g * e);
  return l * l + (a + 1 / (2 * e * e) - 1 / (2 * z)) * l - (1 / (2 * e * e * g) + 1 / (2 * z * z) + a / (2 * z));
}

}  // namespace

TEST(T1, Examples) {
  const auto ok = certify_t1(0.1, 0.3, 0.4, 5.0);
  EXPECT_TRUE(ok.certified());
  EXPECT_NEAR(ok.margin, 0.2, 1e-15);
  EXPECT_EQ(ok.lambda_interval->lower, 2.5);
  EXPECT_FALSE(certify_t1(0.3, 0.3, 0.4, 5.0).certified());
  EXPECT_FALSE(certify_t1(0.1, 0.3, 0.4, 2.5).certified());
  const auto sampled = certify_t1(0.1, 0.3, 0.4, 5.0, false);
  EXPECT_EQ(sampled.verdict, Verdict::UncertifiableR);
  EXPECT_TRUE(sampled.has_flag("SAMPLED_R"));
}

TEST(T8, Examples) {
  const auto rep = certify_t8(0.2, 0.5, 3.0);
  EXPECT_TRUE(rep.certified());
  EXPECT_DOUBLE_EQ(rep.lambda_interval->lower, 2.0);
  EXPECT_DOUBLE_EQ(rep.lambda_interval->upper, 3.5);
  EXPECT_FALSE(certify_t8(0.2, 0.5, 3.5).certified());
  EXPECT_FALSE(certify_t8(0.5, 0.5, 2.1).certified());
  EXPECT_TRUE(std::isinf(lambda_max_complete(0.5, 0.0)));
  EXPECT_TRUE(certify_t8(0.0, 0.5, 1e6).certified());
}

TEST(T8, IntervalNonemptyIffGap) {
  Rng rng(1);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const double mu = u(rng), zeta = u(rng);
    const auto rep = certify_t8(mu, zeta, 1.0);
    EXPECT_EQ(!rep.lambda_interval->empty(), rep.gap_condition);
  }
}

TEST(LambdaMax, ProbeMatchesClosedFormAndQuadratic) {
  const double z = 0.5, e = 0.8, mu = 0.1, g = 0.05;
  const double pzf = lambda_max_pzf(z, e, mu, g).value;
  EXPECT_NEAR(pzf, oracle::lambda_max_pzf_closed(z, e, mu, g), 1e-12);
  EXPECT_NEAR(pzf, oracle::lambda_max_pzf_bisect(z, e, mu, g), 1e-9);
  EXPECT_LE(std::abs(quadratic_pzf(pzf, z, e, mu, g)), 1e-9);
  const double zf = lambda_max_zf(z, e, mu, g).value;
  EXPECT_NEAR(zf, oracle::lambda_max_zf_closed(z, e, mu, g), 1e-12);
  EXPECT_LE(std::abs(quadratic_zf(zf, z, e, mu, g)), 1e-9);
  EXPECT_LT(zf, pzf);
}

TEST(LambdaMax, RandomPointsAgreeWithOracles) {
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int t = 0; t < 500; ++t) {
    const double z = u(rng), e = u(rng), mu = u(rng), g = u(rng);
    const double pzf = lambda_max_pzf(z, e, mu, g).value;
    const double zf = lambda_max_zf(z, e, mu, g).value;
    EXPECT_NEAR(pzf, oracle::lambda_max_pzf_closed(z, e, mu, g), 1e-10 * std::max(1.0, pzf));
    EXPECT_NEAR(pzf, oracle::lambda_max_pzf_bisect(z, e, mu, g), 1e-8 * std::max(1.0, pzf));
    EXPECT_NEAR(zf, oracle::lambda_max_zf_closed(z, e, mu, g), 1e-10 * std::max(1.0, zf));
    EXPECT_GT(pzf, 0.0);
    EXPECT_LE(zf, pzf + 1e-12);
  }
}

TEST(LambdaMax, GammaToZeroLimit) {
  const double z = 0.5, e = 0.9, mu = 0.2;
  const LambdaMax lim = lambda_max_pzf(z, e, mu, 0.0);
  EXPECT_TRUE(lim.degenerate_gamma);
  EXPECT_DOUBLE_EQ(lim.value, 0.5 * (1 / z + 1 / (e * mu)));
  EXPECT_NEAR(lambda_max_pzf(z, e, mu, 1e-9).value, lim.value, 1e-6);
  EXPECT_NEAR(lambda_max_zf(z, e, mu, 1e-9).value, lim.value, 1e-6);
  // eta = 1 reproduces the complete-data endpoint.
  EXPECT_DOUBLE_EQ(lambda_max_pzf(z, 1.0, mu, 0.0).value, lambda_max_complete(z, mu));
  const auto rep = certify_t3_pzf(z, e, mu, 0.0, 3.0);
  EXPECT_TRUE(rep.has_flag("DEGENERATE_GAMMA"));
}

TEST(T3T5, Margins) {
  const auto t3 = certify_t3_pzf(0.5, 0.9, 0.1, 0.02, 2.5);
  EXPECT_NEAR(t3.margin, 0.41, 1e-15);
  EXPECT_TRUE(t3.gap_condition);
  EXPECT_FALSE(t3.lambda_interval->empty());
  EXPECT_TRUE(t3.certified());
  const auto t5 = certify_t5_zf(0.5, 1.0, 0.2, 0.35, 2.5);
  EXPECT_NEAR(t5.margin, -0.05, 1e-15);
  EXPECT_EQ(t5.verdict, Verdict::NotCertified);
}

TEST(T3T5, DegenerateToT8WithoutMissingEntries) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int t = 0; t < 200; ++t) {
    const double z = u(rng), mu = u(rng) * z, lambda = 1 / z + u(rng);
    const auto t8 = certify_t8(mu, z, lambda);
    const auto t3 = certify_t3_pzf(z, 1.0, mu, 0.0, lambda);
    const auto t5 = certify_t5_zf(z, 1.0, mu, 0.0, lambda);
    EXPECT_EQ(t3.lambda_interval->upper, t8.lambda_interval->upper);
    EXPECT_EQ(t5.lambda_interval->upper, t8.lambda_interval->upper);
    EXPECT_EQ(t3.verdict, t8.verdict);
    EXPECT_EQ(t5.verdict, t8.verdict);
  }
}

TEST(RandomModelMargins, ZeroFilledDecomposition) {
  Rng rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const double w = u(rng), a = u(rng), b = u(rng), e = 0.1 * u(rng);
    const double s = std::sqrt(e + b / 3);
    const double expect = f_pzf(w, a, b, e) - std::sqrt(w * (1 - w)) - s * (std::sqrt(w) + std::sqrt(1 - w) + s);
    EXPECT_NEAR(f_zf(w, a, b, e), expect, 1e-14);
    EXPECT_GE(f_pzf(w, a, b, e), f_zf(w, a, b, e));
  }
}

TEST(RandomModelMargins, KnownValues) {
  EXPECT_NEAR(f_pzf(0, 0.9, 0.01, 0.001), 0.9 - 0.01 - 1.01 * std::sqrt(0.001 + 0.01 / 3), 1e-15);
  EXPECT_NEAR(f_pzf(0, 0.9, 0.01, 0.001), 0.8235, 1e-4);
  for (double w : {0.0, 0.3, 0.7, 1.0}) EXPECT_NEAR(f_pzf(w, 0, 0, 0), -std::sqrt(2 * w), 1e-15);
  EXPECT_NEAR(f_pzf(1.0, 0.4, 0.0, 0.01), 0.4 - std::sqrt(2.0) - 0.1, 1e-15);
  EXPECT_TRUE(certify_t4(0.1, 0.9, 0.01, 0.001).certified());
  EXPECT_TRUE(certify_t4(0.1, 0.9, 0.01, 0.001).has_flag("EXISTENCE_ONLY"));
  EXPECT_FALSE(certify_t6(0.9, 0.9, 0.01, 0.001).certified());
}

TEST(RandomModelMargins, FigureOneOrdering) {
  for (int k = 1; k <= 1000; ++k) {
    const double w = k / 1001.0;
    EXPECT_GT(f_pzf(w, 0.9, 0.01, 0.001), f_zf(w, 0.9, 0.01, 0.001));
  }
}

TEST(RateBounds, RatioAndValue) {
  const double expect = (1 + std::numbers::sqrt2) * (1 + std::numbers::sqrt2) / 2;
  for (double rho : {1.5, 10.0, 100.0})
    for (int d : {1, 5, 20}) EXPECT_NEAR(rate_bounds(rho, d).ratio(), expect, 1e-12);
  EXPECT_NEAR(rate_bounds(10, 5).pzf_max_ratio, 0.5 * std::log(10.0) / 80, 1e-16);
  EXPECT_NEAR(rate_bounds(10, 5).pzf_max_ratio, 0.0143912, 1e-7);
  EXPECT_LT(rate_bounds(1 + 1e-12, 5).pzf_max_ratio, 1e-12);
  EXPECT_THROW(rate_bounds(1.0, 5), Error);
}

TEST(T7, Bounds) {
  const NoiseBounds b = noise_bounds(0.9, 0.0);
  EXPECT_NEAR(b.simplified, 0.15, 1e-15);
  EXPECT_NEAR(b.exact, 0.9 - std::sqrt(0.81 - 0.27), 1e-14);
  EXPECT_NEAR(b.exact, 0.16515, 1e-5);
  EXPECT_NEAR(b.exact, oracle::noise_bound_root(0.9, 0.0), 1e-14);
  const NoiseBounds edge = noise_bounds(0.4, 0.4);
  EXPECT_NEAR(edge.exact, 0.0, 1e-15);
  EXPECT_EQ(edge.simplified, 0.0);
  EXPECT_FALSE(certify_t7_noise(0.4, 0.4, 0.0).certified());
  EXPECT_FALSE(certify_t7_noise(0.3, 0.4, 0.0).certified());
  EXPECT_TRUE(certify_t7_noise(0.9, 0.0, 0.16).certified());
  EXPECT_FALSE(certify_t7_noise(0.9, 0.0, 0.17).certified());
  EXPECT_EQ(certify_t7_noise(0.9, 0.0, 0.1, false).verdict, Verdict::UncertifiableR);
}

TEST(T7, OrderingOnGrid) {
  for (int i = 1; i <= 100; ++i)
    for (int j = 0; j < i; ++j) {
      const double r = i / 100.0, mu = j / 100.0;
      const NoiseBounds b = noise_bounds(r, mu);
      EXPECT_GE(b.exact, b.simplified - 1e-15);
      EXPECT_GE(b.simplified, b.prior - 1e-15);
      EXPECT_NEAR(b.exact, oracle::noise_bound_root(r, mu), 1e-12);
    }
}

TEST(T8, CertifiesWhereT1CannotAndSolutionIsPreserving) {
  // Two companions close to the anchor make the inradius small while zeta
  // stays near 1; the other-cluster point sits in between.
  const double th = 5.0 * std::numbers::pi / 180.0;
  Matrix x = Matrix::Zero(4, 4);
  x(0, 0) = 1;
  x(0, 1) = std::cos(th);
  x(1, 1) = std::sin(th);
  x(0, 2) = std::cos(th);
  x(1, 2) = -std::sin(th);
  x(0, 3) = 0.5;
  x(2, 3) = std::sqrt(0.75);
  Matrix b1 = Matrix::Zero(4, 2);
  b1(0, 0) = 1;
  b1(1, 1) = 1;
  AnchorProblem p{x, Matrix::Zero(4, 4), {0, 0, 0, 1}, 0, b1};
  const double zeta = compute_zeta(p);
  const double r = inradius(x.middleCols(1, 2), InradiusMethod::Exact2D).value;
  const double lambda = 1.2;
  const MuResult mu = compute_mu(p, lambda);
  ASSERT_LT(r, mu.mu);
  ASSERT_LT(mu.mu, zeta);
  EXPECT_FALSE(certify_t1(mu.mu, r, zeta, lambda).certified());
  ASSERT_TRUE(certify_t8(mu.mu, zeta, lambda).certified());
  const LassoSolution s = solve_lasso(x.rightCols(3), x.col(0), lambda);
  EXPECT_FALSE(s.is_zero());
  EXPECT_EQ(s.coeffs(2), 0.0);
}

TEST(Soundness, CertifiedIncompleteColumnsArePreserving) {
  long certified = 0, violated = 0;
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    RandomModelParams p{.n = 3, .d = 3, .D = 60, .rho = 3, .seed = seed, .m = 6};
    const auto inst = generate(p);
    for (Index a = 0; a < inst.data.size(); a += 3) {
      for (Variant v : {Variant::ZeroFilled, Variant::ProjectedZeroFilled}) {
        const auto prob = make_anchor_problem(inst.data, inst.arrangement, a, v);
        const double zeta = compute_zeta(prob);
        const double lambda = 1.5 / zeta;
        const Matrix comp = select_columns(inst.data.points(), inst.data.companions(a));
        const auto g = analyze_anchor(prob, view_of(v), lambda, comp);
        const auto rep = certify_variant(v, g, lambda);
        if (!rep.certified()) continue;
        ++certified;
        const auto others = detail::all_but(inst.data.size(), a);
        const LassoSolution s = solve_lasso(select_columns(prob.view, others), prob.target(), lambda);
        bool ok = !s.is_zero();
        for (std::size_t k = 0; k < others.size(); ++k)
          if (inst.data.label(others[k]) != inst.data.label(a) && s.coeffs(static_cast<Index>(k)) != 0.0) ok = false;
        violated += !ok;
      }
    }
  }
  EXPECT_GT(certified, 0);
  EXPECT_EQ(violated, 0);
}
