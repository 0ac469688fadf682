#include <cmath>
#include <stdexcept>

#include <gtest/gtest.h>

#include <deepcurves/angle.hpp>

using namespace deepcurves;

namespace {

// textbook formula, fine away from t = 0
double phi_naive(double t) { return std::acos((1.0 - t / pi) * std::cos(t) + std::sin(t) / pi); }

}  // namespace

TEST(AngleEvolution, Endpoints) {
  EXPECT_EQ(angle_evolution(0.0), 0.0);
  EXPECT_NEAR(angle_evolution(pi), pi / 2, 1e-15);
}

TEST(AngleEvolution, HalfPiIsArccosOfOneOverPi) {
  // 60-digit evaluation of acos(1/pi)
  EXPECT_NEAR(angle_evolution(pi / 2), 1.2468502198629158993, 1e-14);
}

TEST(AngleEvolution, HighPrecisionValues) {
  const std::pair<double, double> cases[] = {
      {1e-3, 0.00099989389106798099862}, {0.05, 0.049733990517471047627}, {0.19999, 0.19568929641677924641},
      {0.20001, 0.19570842931822153613},   {0.5, 0.47231636389529967261},   {2.5, 1.543907269453693913},
  };
  for (auto [t, v] : cases) EXPECT_NEAR(angle_evolution(t), v, 2e-15 * v) << t;
}

TEST(AngleEvolution, MatchesNaiveFormulaAwayFromZero) {
  for (double t = 0.3; t < pi; t += 0.01) EXPECT_NEAR(angle_evolution(t), phi_naive(t), 1e-9);
}

TEST(AngleEvolution, RangeAndMonotone) {
  double prev = -1.0;
  for (int k = 0; k <= 4000; ++k) {
    const double t = pi * k / 4000;
    const double p = angle_evolution(t);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, pi / 2 + 1e-15);
    EXPECT_LE(p, t);
    if (k > 0) EXPECT_GT(p, prev) << t;
    prev = p;
  }
}

TEST(AngleEvolution, DomainErrors) {
  EXPECT_THROW(angle_evolution(-1e-9), std::domain_error);
  EXPECT_THROW(angle_evolution(pi + 1e-9), std::domain_error);
  EXPECT_THROW(angle_evolution(std::nan("")), std::domain_error);
  EXPECT_THROW(iterated_angle_evolution(0.5, -1), std::domain_error);
}

TEST(AngleEvolution, CoefficientsMatchFiniteDifferences) {
  for (double t : {0.01, 0.1, 0.19, 0.21, 0.7, 1.5, 2.9}) {
    const auto c = angle_evolution_coefficients<3>(t);
    const double h = 1e-4;
    const double f0 = angle_evolution(t), fp = angle_evolution(t + h), fm = angle_evolution(t - h);
    const double fp2 = angle_evolution(t + 2 * h), fm2 = angle_evolution(t - 2 * h);
    EXPECT_NEAR(c[0], f0, 1e-15);
    EXPECT_NEAR(c[1], (fp - fm) / (2 * h), 1e-7) << t;
    EXPECT_NEAR(2 * c[2], (fp - 2 * f0 + fm) / (h * h), 1e-5) << t;
    EXPECT_NEAR(6 * c[3], (fp2 - 2 * fp + 2 * fm - fm2) / (2 * h * h * h), 1e-3) << t;
  }
}

TEST(AngleEvolution, SeriesBranchIsContinuousAtCutoff) {
  const double t = detail::kSeriesCutoff;
  const auto below = angle_evolution_coefficients<3>(std::nextafter(t, 0.0));
  const auto above = angle_evolution_coefficients<3>(t);
  for (int k = 0; k <= 3; ++k) EXPECT_NEAR(below[k], above[k], 1e-12 * std::max(1.0, std::abs(above[k]))) << k;
}

TEST(IteratedAngle, IdentityAndOneStep) {
  EXPECT_EQ(iterated_angle_evolution(0.7, 0), 0.7);
  EXPECT_NEAR(iterated_angle_evolution(pi, 1), pi / 2, 1e-15);
}

TEST(IteratedAngle, TenLayersAtOne) {
  const double v = iterated_angle_evolution(1.0, 10);
  EXPECT_GE(v, 1.0 / (1.0 + 10.0 / pi));
  EXPECT_LE(v, 1.0 / (1.0 + 10.0 / (3.0 * pi)));
  EXPECT_NEAR(v, 0.44868441109444421301, 1e-14);
}

TEST(IteratedAngle, FluidBracket) {
  for (int k = 1; k <= 64; ++k) {
    const double t = pi * k / 64;
    double p = t;
    for (int l = 1; l <= 256; ++l) {
      p = angle_evolution(p);
      EXPECT_LE(fluid_lower_bound(t, l), p + 1e-12);
      EXPECT_LE(p, hat_iterated_angle(t, l) + 1e-12);
    }
  }
}

TEST(IteratedAngle, JetMatchesComposition) {
  for (double t : {0.05, 0.8, 2.0}) {
    const auto jet = iterated_angle_evolution_jet<3>(t, 7);
    EXPECT_NEAR(jet.value(), iterated_angle_evolution(t, 7), 1e-15);
    const double h = 1e-5;
    const double fd = (iterated_angle_evolution(t + h, 7) - iterated_angle_evolution(t - h, 7)) / (2 * h);
    EXPECT_NEAR(jet.derivative(1), fd, 1e-8);
  }
}
