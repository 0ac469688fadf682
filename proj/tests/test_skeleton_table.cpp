#include <cmath>
#include <random>
#include <stdexcept>

#include <gtest/gtest.h>

#include <deepcurves/quadrature.hpp>
#include <deepcurves/skeleton_table.hpp>

using namespace deepcurves;

TEST(SkeletonTable, TooFewKnots) {
  EXPECT_THROW(SkeletonTable::build({4, 2.0}, 63), std::invalid_argument);
  EXPECT_NO_THROW(SkeletonTable::build({4, 2.0}, 64));
}

TEST(SkeletonTable, ExactAtKnotsSmallDepth) {
  const KernelParams kp{4, 2.0};
  const auto tab = SkeletonTable::build(kp, 64);
  const auto t = tab.knots();
  const auto v = tab.values();
  ASSERT_EQ(t.size(), 64u);
  EXPECT_EQ(t.back(), pi);
  EXPECT_EQ(v.back(), 0.0);
  EXPECT_EQ(tab(pi), 0.0);
  for (std::size_t k = 0; k < t.size(); ++k) {
    EXPECT_NEAR(tab(t[k]), skeleton_dc(t[k], kp), 1e-13);
    EXPECT_GE(v[k], 0.0);
    if (k) {
      EXPECT_GT(t[k], t[k - 1]);
      EXPECT_LE(v[k], v[k - 1]);
    }
  }
  EXPECT_NEAR(tab.psi_at_pi(), skeleton_at_pi(kp), 1e-15);
  EXPECT_NEAR(tab.skeleton(0.0), kp.width * kp.depth / 2, 1e-13);
}

TEST(SkeletonTable, InterpolationErrorModerateDepth) {
  const KernelParams kp{3000, 2.0};
  const auto tab = SkeletonTable::build(kp);
  const double scale = tab.psi_dc_at_zero();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, pi);
  for (int i = 0; i < 100; ++i) {
    const double t = u(rng);
    EXPECT_NEAR(tab(t), skeleton_dc(t, kp), 1e-8 * scale) << t;
  }
  EXPECT_LE(tab.max_midpoint_error(), 1e-8 * scale);
}

TEST(SkeletonTable, InterpolationErrorDeep) {
  const KernelParams kp{100000, 2.0};
  const auto tab = SkeletonTable::build(kp);
  const double scale = tab.psi_dc_at_zero();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, pi);
  for (int i = 0; i < 100; ++i) {
    // half the probes inside the peak
    const double t = i % 2 ? u(rng) : u(rng) * 1e-3;
    EXPECT_NEAR(tab(t), skeleton_dc(t, kp), 1e-8 * scale) << t;
  }
}

TEST(SkeletonTable, DerivativeAndAntiderivative) {
  const KernelParams kp{200, 2.0};
  const auto tab = SkeletonTable::build(kp);
  for (double t : {0.001, 0.05, 0.5, 2.0, 3.0}) {
    const double d = skeleton_derivative(t, 1, kp).value;
    EXPECT_NEAR(tab.derivative(t), d, 1e-5 * std::abs(d)) << t;
    const double ref = adaptive_integrate([&](double x) { return skeleton_dc(x, kp); }, 0.0, t, 1e-12);
    EXPECT_NEAR(tab.antiderivative(t), ref, 1e-9 * std::max(1.0, ref)) << t;
  }
  EXPECT_NEAR(tab.total_integral(), tab.antiderivative(pi), 1e-12);
  EXPECT_EQ(tab.antiderivative(0.0), 0.0);
}
