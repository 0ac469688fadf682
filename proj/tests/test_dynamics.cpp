#include <cmath>

#include <gtest/gtest.h>

#include <deepcurves/builtin.hpp>
#include <deepcurves/dynamics.hpp>

using namespace deepcurves;

namespace {

struct Problem {
  DiscretizedManifold grid;
  KernelMatrix K;
};

Problem circles_setup(int L, int M) {
  BuiltinOptions o;
  o.samples = 1024;
  Problem s;
  s.grid = discretize(builtin_geometry("two_circles", o), M, Weighting::paper_uniform_t);
  s.K = assemble_kernel(s.grid, KernelParams{L, 2.0});
  return s;
}

}  // namespace

TEST(Separation, Examples) {
  const Eigen::Vector3d labels(1, -1, 1);
  auto s = separation_check(Eigen::Vector3d(0.5, -0.2, 3), labels);
  EXPECT_TRUE(s.separated);
  EXPECT_DOUBLE_EQ(s.margin, 0.2);
  s = separation_check(Eigen::Vector3d(0.5, 0.1, 3), labels);
  EXPECT_FALSE(s.separated);
  EXPECT_DOUBLE_EQ(s.margin, -0.1);
  s = separation_check(Eigen::Vector3d(0.0, -1, 1), labels);
  EXPECT_FALSE(s.separated);
  EXPECT_THROW(separation_check(Eigen::Vector2d(1, 1), labels), std::invalid_argument);
}

TEST(Schedule, Values) {
  EXPECT_EQ(theorem_schedule(1, 2, 0.1), 5);
  EXPECT_EQ(theorem_schedule(1, 1, 0.25), 4);
  EXPECT_EQ(theorem_schedule(std::ldexp(1.0, 44), 1, 1), 1LL << 39);
  EXPECT_EQ(theorem_schedule(1e5, 2, 1e-3), 13514132);
  EXPECT_EQ(theorem_schedule(100, 2, 0.01), 2962);
  EXPECT_EQ(theorem_schedule(7, 3, 0.5), 3);
  EXPECT_THROW(theorem_schedule(0, 1, 1), config_error);
  EXPECT_THROW(theorem_schedule(1, 1, 0), config_error);
}

class DynamicsTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { s_ = new Problem(circles_setup(50, 200)); }
  static void TearDownTestSuite() { delete s_; }
  static Problem* s_;
};
Problem* DynamicsTest::s_ = nullptr;

TEST_F(DynamicsTest, SpectrumOfWeightedOperator) {
  const NominalDynamics d(s_->K, s_->grid);
  const Eigen::MatrixXd A = s_->K.values * s_->grid.measure().asDiagonal();
  const Eigen::MatrixXd V = d.eigenvectors();
  for (int i : {0, 17, int(V.cols()) - 1}) {
    const Eigen::VectorXd v = V.col(i);
    EXPECT_LE((A * v - d.eigenvalues()[i] * v).norm(), 1e-9 * d.lambda_max() * v.norm());
  }
  EXPECT_GE(d.eigenvalues().minCoeff(), -1e-9 * d.lambda_max());
  // K diag(mu) has the eigenvalues of diag(mu) K
  const Eigen::VectorXd ev = Eigen::EigenSolver<Eigen::MatrixXd>(A).eigenvalues().real();
  EXPECT_NEAR(ev.maxCoeff(), d.lambda_max(), 1e-8 * d.lambda_max());
}

TEST_F(DynamicsTest, ZeroStepIsConstant) {
  const auto tr = nominal_evolve(s_->grid, s_->K, -s_->grid.labels, DynamicsConfig{0.0, 20});
  ASSERT_EQ(tr.error_norm.size(), 21u);
  for (double e : tr.error_norm) EXPECT_NEAR(e, tr.error_norm[0], 1e-12);
  EXPECT_LE((tr.final_error + s_->grid.labels).norm(), 1e-10);
}

TEST_F(DynamicsTest, EigenvectorDecaysGeometrically) {
  const NominalDynamics d(s_->K, s_->grid);
  const double tau = 0.5 / d.lambda_max();
  const int idx = int(d.eigenvalues().size()) - 3;
  const double lam = d.eigenvalues()[idx];
  const Eigen::VectorXd v = d.eigenvectors().col(idx);
  DynamicsConfig cfg{tau, 30};
  const auto tr = d.evolve(v, s_->grid.labels, cfg, s_->grid);
  for (int k = 0; k <= 30; ++k)
    EXPECT_NEAR(tr.error_norm[static_cast<std::size_t>(k)], std::pow(1 - tau * lam, k) * tr.error_norm[0], 1e-10 * tr.error_norm[0]);
  EXPECT_LE((d.power(v, tau, 30) - std::pow(1 - tau * lam, 30) * v).norm(), 1e-9 * v.norm());
}

TEST_F(DynamicsTest, MonotoneBelowInverseLambda) {
  const NominalDynamics d(s_->K, s_->grid);
  for (double f : {0.1, 0.5, 0.99}) {
    const auto tr = d.evolve(-s_->grid.labels, s_->grid.labels, DynamicsConfig{f / d.lambda_max(), 200}, s_->grid);
    for (std::size_t k = 1; k < tr.error_norm.size(); ++k) EXPECT_LE(tr.error_norm[k], tr.error_norm[k - 1] * (1 + 1e-12));
  }
}

TEST_F(DynamicsTest, EigenMatchesExplicit) {
  const NominalDynamics d(s_->K, s_->grid);
  Eigen::VectorXd z0 = -s_->grid.labels;
  for (int i = 0; i < z0.size(); ++i) z0[i] += 0.3 * std::sin(0.7 * i);
  const double tau = 0.9 / d.lambda_max();
  DynamicsConfig a{tau, 1000};
  DynamicsConfig b = a;
  b.method = EvolveMethod::explicit_iteration;
  const auto ta = d.evolve(z0, s_->grid.labels, a, s_->grid);
  const auto tb = d.evolve(z0, s_->grid.labels, b, s_->grid);
  const double scale = weighted_norm(z0, s_->grid);
  for (std::size_t k = 0; k < ta.error_norm.size(); ++k) EXPECT_NEAR(ta.error_norm[k], tb.error_norm[k], 1e-8 * scale);
  EXPECT_LE(weighted_norm(Eigen::VectorXd(ta.final_error - tb.final_error), s_->grid), 1e-8 * scale);
  EXPECT_LE((d.power(z0, tau, 1000) - ta.final_error).norm(), 1e-8 * z0.norm());
}

TEST_F(DynamicsTest, StepLimit) {
  const NominalDynamics d(s_->K, s_->grid);
  EXPECT_THROW(d.evolve(-s_->grid.labels, s_->grid.labels, DynamicsConfig{2.0 / d.lambda_max(), 5}, s_->grid), config_error);
  DynamicsConfig loose{2.5 / d.lambda_max(), 5, false};
  EXPECT_NO_THROW(d.evolve(-s_->grid.labels, s_->grid.labels, loose, s_->grid));
  EXPECT_THROW(d.evolve(-s_->grid.labels, s_->grid.labels, DynamicsConfig{-1.0, 5}, s_->grid), config_error);
}

TEST_F(DynamicsTest, ResidualFloorAndSeparation) {
  // the error settles at the least-squares residual of the kernel system
  const NominalDynamics d(s_->K, s_->grid);
  const Eigen::VectorXd z0 = -s_->grid.labels;
  const auto tr = d.evolve(z0, s_->grid.labels, DynamicsConfig{0.5 / d.lambda_max(), 1000}, s_->grid);
  const auto& lam = d.eigenvalues();
  const Eigen::MatrixXd V = d.eigenvectors();
  // modal prediction: component i shrinks by (1 - tau lambda_i)^k
  Eigen::VectorXd c = V.transpose() * s_->grid.measure().cwiseProduct(z0);
  double floor2 = 0;
  for (int i = 0; i < c.size(); ++i) floor2 += std::pow(c[i] * std::pow(1 - 0.5 * lam[i] / d.lambda_max(), 1000), 2);
  EXPECT_LE(tr.error_norm.back(), 1.1 * (std::sqrt(floor2) + 1e-8 * weighted_norm(z0, s_->grid)));
  EXPECT_LT(tr.error_norm.back(), tr.error_norm.front());
  int first = -1;
  for (std::size_t k = 0; k < tr.separated.size(); ++k)
    if (tr.separated[k]) {
      first = int(k);
      break;
    }
  EXPECT_GE(first, 1);
  EXPECT_TRUE(tr.separated.back());
  EXPECT_GT(tr.margin.back(), 0.0);
}
