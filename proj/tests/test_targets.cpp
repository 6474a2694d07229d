#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "mpcn/targets.hpp"
#include "stats_util.hpp"

using namespace mpcn;

TEST(GaussianTarget, ClosedFormValues) {
  const auto t1 = target_gaussian(2, 1.0);
  EXPECT_EQ(t1.log_density_unnorm(std::vector<double>{0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(t1.log_density_unnorm(std::vector<double>{3.0, 4.0}), -12.5);
  EXPECT_FALSE(t1.mixing.has_value());
}

TEST(GaussianTarget, ScaleEquivariance) {
  // Doubling both x and sigma leaves the value unchanged, exactly.
  const auto t1 = target_gaussian(3, 1.25);
  const auto t2 = target_gaussian(3, 2.5);
  const std::vector<double> x{0.3, -1.7, 2.2}, x2{0.6, -3.4, 4.4};
  EXPECT_EQ(t1.log_density_unnorm(x), t2.log_density_unnorm(x2));
}

TEST(StudentTTarget, PeakAndMixingDerivative) {
  const auto t = target_student_t(20, 2.0, 5.0);
  EXPECT_EQ(t.log_density_unnorm(std::vector<double>(20, 0.0)), 0.0);
  ASSERT_TRUE(t.mixing.has_value());
  // Q = InvGamma(1, 25): dlog_q(y) = -2/y + 25/y^2, so dlog_q(5) = 0.6.
  EXPECT_NEAR(t.mixing->dlog_q(5.0), 0.6, 1e-14);
}

TEST(StudentTTarget, MixingDerivativeMatchesFiniteDifference) {
  for (const auto& m :
       {inverse_gamma_mixing(1.0, 25.0), inverse_gamma_mixing(3.0, 2.0)}) {
    for (double y = 0.1; y <= 10.0; y += 0.37) {
      const double h = 1e-5 * std::max(1.0, y);
      const double fd = (m.log_q(y + h) - m.log_q(y - h)) / (2.0 * h);
      const double dq = m.dlog_q(y);
      EXPECT_NEAR(dq, fd, 1e-6 * std::max(1.0, std::abs(dq))) << "y=" << y;
    }
  }
}

TEST(StudentTTarget, QtildeDerivativeIdentity) {
  const auto m = inverse_gamma_mixing(1.0, 25.0);
  for (double y : {0.1, 0.9, 5.0, 36.0, 400.0})
    EXPECT_EQ(m.dlog_qtilde(y), 1.0 / y + m.dlog_q(y));
}

TEST(StudentTTarget, ScaleMixtureRepresentationAtDOne) {
  // X = sqrt(Z) W with Z ~ InvGamma(1, 25) has the same law as 5 t_2.
  const std::size_t n = 100000;
  RngStream rng(21, 0);
  const auto m = inverse_gamma_mixing(1.0, 25.0);
  std::vector<double> mix(n), direct(n);
  for (auto& v : mix) v = std::sqrt(m.sample(rng)) * rng.normal();
  for (auto& v : direct) v = 5.0 * sample_t_scalar(2.0, rng);
  EXPECT_LT(testutil::ks_statistic(std::move(mix), std::move(direct)),
            testutil::ks_critical_1pct(n, n));
}

TEST(StudentTTarget, FiniteForHugeInputs) {
  const auto t = target_student_t(4, 2.0, 5.0);
  const std::vector<double> x{1e200, -1e200, 1e199, 0.0};
  EXPECT_TRUE(std::isfinite(t.log_density_unnorm(x)));
  const std::vector<double> y{1e150, 0.0, 0.0, 0.0};
  EXPECT_TRUE(std::isfinite(t.log_density_unnorm(y)));
}

TEST(PerturbedTTarget, FormulaValueAtOnes) {
  const auto t = target_perturbed_t();
  const std::vector<double> ones(20, 1.0);
  const double expected = -12.0 * std::log(1.0 + 1.0 + 0.5 * std::sin(1.0));
  EXPECT_NEAR(t.log_density_unnorm(ones), expected, 1e-13);
  EXPECT_FALSE(t.mixing.has_value());
  EXPECT_FALSE(static_cast<bool>(t.sample_exact));
}

TEST(PerturbedTTarget, FiniteAndContinuousAtKink) {
  const auto t = target_perturbed_t();
  // Push sin(x_2) to its minimum: the inner expression stays above 1/2.
  std::vector<double> x(20, 1.0);
  x[0] = 0.0;
  x[1] = -std::numbers::pi / 2.0;
  EXPECT_TRUE(std::isfinite(t.log_density_unnorm(x)));
  EXPECT_TRUE(std::isfinite(t.log_density_unnorm(std::vector<double>(20, 1e150))));
  std::vector<double> lo(20, 1.0), hi(20, 1.0);
  lo[0] = -1e-9;
  hi[0] = 1e-9;
  EXPECT_NEAR(t.log_density_unnorm(lo), t.log_density_unnorm(hi), 1e-7);
}

TEST(ShiftedTarget, IdentityAndInverseComposition) {
  const auto base = target_student_t(5, 2.0, 5.0);
  const auto same = target_shifted(base, 0.0);
  const auto round_trip = target_shifted(target_shifted(base, 2.0), -2.0);
  // Binary-fraction grid points keep the +-2 shifts exact.
  const std::vector<std::vector<double>> grid{
      {0.5, -1.25, 3.0, 0.0, 7.5}, {1.0, 2.0, -4.5, 0.25, -0.75}};
  for (const auto& x : grid) {
    EXPECT_EQ(same.log_density_unnorm(x), base.log_density_unnorm(x));
    EXPECT_EQ(round_trip.log_density_unnorm(x), base.log_density_unnorm(x));
  }
}

TEST(ShiftedTarget, GaussianShiftedPeak) {
  const auto t = target_shifted(target_gaussian(2, 1.0), 3.0);
  EXPECT_EQ(t.log_density_unnorm(std::vector<double>{3.0, 3.0}), 0.0);
  EXPECT_FALSE(t.mixing.has_value());
}

TEST(ScaleMixtureTarget, ConjugateClosedFormMatchesStudentT) {
  // InvGamma(1, 25) mixing at d = 20 is the t(nu=2, sigma=5) target up to an
  // additive constant; check the closed-form path and the quadrature path.
  const int d = 20;
  const auto t_ref = target_student_t(d, 2.0, 5.0);
  const auto closed = target_scale_mixture(d, inverse_gamma_mixing(1.0, 25.0));
  auto generic_mixing = make_mixing(
      closed.mixing->log_q, closed.mixing->dlog_q, closed.mixing->sample);
  const auto quad = target_scale_mixture(d, generic_mixing);

  RngStream rng(22, 0);
  double lo_c = 1e300, hi_c = -1e300, lo_q = 1e300, hi_q = -1e300;
  for (int i = 0; i < 100; ++i) {
    std::vector<double> x(d);
    for (auto& v : x) v = 6.0 * rng.normal();
    const double ref = t_ref.log_density_unnorm(x);
    const double dc = closed.log_density_unnorm(x) - ref;
    const double dq = quad.log_density_unnorm(x) - ref;
    lo_c = std::min(lo_c, dc);
    hi_c = std::max(hi_c, dc);
    lo_q = std::min(lo_q, dq);
    hi_q = std::max(hi_q, dq);
  }
  EXPECT_LT(hi_c - lo_c, 1e-6);
  EXPECT_LT(hi_q - lo_q, 1e-6);
}

TEST(ScaleMixtureTarget, SphericalSymmetry) {
  const auto t = target_scale_mixture(4, inverse_gamma_mixing(1.0, 25.0));
  const std::vector<double> x{1.5, -0.25, 3.0, 0.5};
  const std::vector<double> permuted{3.0, 1.5, 0.5, -0.25};
  const std::vector<double> reflected{-1.5, 0.25, -3.0, -0.5};
  const double v = t.log_density_unnorm(x);
  EXPECT_NEAR(t.log_density_unnorm(permuted), v, 1e-12);
  EXPECT_EQ(t.log_density_unnorm(reflected), v);
}

TEST(ScaleMixtureTarget, NearDeltaMixingApproachesStandardNormal) {
  // InvGamma(50, 49) concentrates near 1; at d=1 the mixture density is close
  // to the standard normal density.
  auto mixing = inverse_gamma_mixing(50.0, 49.0);
  auto generic = make_mixing(mixing.log_q, mixing.dlog_q, mixing.sample);
  const auto t = target_scale_mixture(1, generic);
  const double at = t.log_density_unnorm(std::vector<double>{0.5});
  const double ref = -0.5 * std::log(2.0 * std::numbers::pi) - 0.125;
  EXPECT_NEAR(at, ref, 0.05);
}

TEST(ScaleMixtureTarget, RadialStatisticConvergesToMixingLaw) {
  // ||X||^2/d over exact draws at d = 200 against direct Q draws.
  const int d = 200;
  const std::size_t n = 100000;
  const auto t = target_student_t(d, 2.0, 5.0);
  RngStream rng(23, 0);
  std::vector<double> radial(n), direct(n);
  std::vector<double> x(d);
  for (std::size_t i = 0; i < n; ++i) {
    t.sample_exact(rng, x);
    radial[i] = norm_sq(x) / d;
  }
  for (std::size_t i = 0; i < n; ++i) direct[i] = t.mixing->sample(rng);
  EXPECT_LT(testutil::ks_statistic(std::move(radial), std::move(direct)),
            testutil::ks_critical_1pct(n, n));
}
