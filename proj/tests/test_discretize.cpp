#include <cmath>

#include <gtest/gtest.h>

#include <deepcurves/builtin.hpp>
#include <deepcurves/discretize.hpp>

using namespace deepcurves;

namespace {

const TwoCurveInstance& circles() {
  static const TwoCurveInstance inst = [] {
    BuiltinOptions o;
    o.samples = 512;
    return builtin_geometry("two_circles", o);
  }();
  return inst;
}

}  // namespace

TEST(Discretize, PaperSchemeSizes) {
  const auto g = discretize(circles(), 900, Weighting::paper_uniform_t);
  EXPECT_EQ(g.size(), 1800);
  EXPECT_EQ(g.per_component, 900);
  EXPECT_NEAR(g.weights.sum(), 1.0, 1e-12);
  EXPECT_NEAR(g.measure().sum(), 1.0, 1e-12);
  for (int i = 0; i < g.size(); ++i) {
    EXPECT_EQ(g.weights[i], 1.0 / 1800);
    EXPECT_EQ(g.t[i], (i % 900) / 900.0);
    EXPECT_NEAR(g.points.row(i).norm(), 1.0, 1e-12);
    EXPECT_EQ(g.labels[i], i < 900 ? 1.0 : -1.0);
  }
  // constant-speed circles: s = len * t
  for (int i = 0; i < 900; i += 37) EXPECT_NEAR(g.s[i], g.length[0] * g.t[i], 1e-10);
}

TEST(Discretize, RiemannianSpacing) {
  BuiltinOptions o;
  o.samples = 256;
  const auto inst = builtin_geometry("fig1_like", o);
  const auto g = discretize(inst, 128, Weighting::riemannian);
  EXPECT_NEAR(g.measure().sum(), 1.0, 1e-12);
  for (int c = 0; c < 2; ++c) {
    const double h = g.length[static_cast<std::size_t>(c)] / 128;
    for (int i = 0; i < 128; ++i) {
      const int k = c * 128 + i;
      EXPECT_NEAR(g.weights[k], h, 1e-15);
      EXPECT_NEAR(g.density[k], 0.5 / g.length[static_cast<std::size_t>(c)], 1e-15);
      EXPECT_NEAR(g.s[k], i * h, 1e-12);
      if (i) {
        // consecutive nodes are one arc-length step apart (chord slightly shorter)
        const double chord = (g.points.row(k) - g.points.row(k - 1)).norm();
        EXPECT_NEAR(chord, h, 1e-3 * h);
      }
    }
  }
}

TEST(Discretize, TooCoarse) { EXPECT_THROW(discretize(circles(), 15, Weighting::riemannian), resolution_error); }

TEST(WeightedNorm, Examples) {
  const auto g = discretize(circles(), 64, Weighting::paper_uniform_t);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(g.size());
  EXPECT_NEAR(weighted_norm(one, g), 1.0, 1e-14);
  EXPECT_NEAR(weighted_norm(g.labels, g), 1.0, 1e-14);
  const Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(g.size(), -1.0, 3.0);
  EXPECT_NEAR(weighted_norm(Eigen::VectorXd(2 * v), g), 2 * weighted_norm(v, g), 1e-14);
  EXPECT_THROW(weighted_norm(Eigen::VectorXd::Ones(3), g), std::invalid_argument);
  const auto r = discretize(circles(), 64, Weighting::riemannian);
  EXPECT_NEAR(weighted_norm(Eigen::VectorXd::Ones(r.size()), r), 1.0, 1e-14);
  EXPECT_NEAR(lebesgue_norm(Eigen::VectorXd::Ones(r.size()), r), std::sqrt(circles().length()), 1e-12);
}
