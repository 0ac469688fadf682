#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include <Eigen/Dense>

#include "skeleton.hpp"
#include "skeleton_table.hpp"

namespace deepcurves {

// acos of the clamped inner product; near-parallel and near-antipodal pairs use chords
inline double clamped_angle(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y) {
  const double c = std::clamp(x.dot(y), -1.0, 1.0);
  if (c > 0.9) return 2.0 * std::asin(std::min(1.0, 0.5 * (x - y).norm()));
  if (c < -0.9) return pi - 2.0 * std::asin(std::min(1.0, 0.5 * (x + y).norm()));
  return std::acos(c);
}

inline void require_unit(const Eigen::Ref<const Eigen::VectorXd>& x, const char* what) {
  if (std::abs(x.norm() - 1.0) > 1e-9) throw std::domain_error(std::string(what) + ": input is not a unit vector");
}

// Theta(x, x') = psi(angle(x, x')), or psi° when dc is set.
inline double ntk(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                  const KernelParams& kp, bool dc = false) {
  if (x.size() != y.size()) throw std::domain_error("ntk: dimension mismatch");
  require_unit(x, "ntk");
  require_unit(y, "ntk");
  const double t = clamped_angle(x, y);
  return dc ? skeleton_dc(t, kp) : skeleton(t, kp);
}

// Skeleton evaluator: direct recursion for moderate depth, shared table beyond.
class SkeletonEvaluator {
 public:
  static constexpr int kTableDepthThreshold = 1000;

  explicit SkeletonEvaluator(const KernelParams& kp, int table_knots = SkeletonTable::kDefaultKnots) : params_(kp) {
    kp.validate();
    if (kp.depth > kTableDepthThreshold)
      table_ = std::make_shared<const SkeletonTable>(SkeletonTable::build(kp, table_knots));
    psi_pi_ = table_ ? table_->psi_at_pi() : skeleton_at_pi(kp);
  }

  explicit SkeletonEvaluator(std::shared_ptr<const SkeletonTable> table)
      : params_(table->params()), table_(std::move(table)), psi_pi_(table_->psi_at_pi()) {}

  const KernelParams& params() const { return params_; }
  bool tabulated() const { return static_cast<bool>(table_); }
  const std::shared_ptr<const SkeletonTable>& table() const { return table_; }
  double psi_at_pi() const { return psi_pi_; }

  double dc(double t) const {
    if (table_) return (*table_)(t);
    return t >= pi ? 0.0 : skeleton(t, params_) - psi_pi_;
  }
  double operator()(double t) const { return table_ ? table_->skeleton(t) : skeleton(t, params_); }

 private:
  KernelParams params_;
  std::shared_ptr<const SkeletonTable> table_;
  double psi_pi_ = 0.0;
};

}  // namespace deepcurves
