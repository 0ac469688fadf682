#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "quadrature.hpp"
#include "skeleton.hpp"

namespace deepcurves {

// Monotone cubic Hermite table of the DC-subtracted skeleton.
// Knots are uniform in s = log(1 + c t), c = L/(3 pi), which resolves the O(1/L) peak at t = 0.
class SkeletonTable {
 public:
  static constexpr int kDefaultKnots = 4096;

  static SkeletonTable build(const KernelParams& kp, int grid_size = kDefaultKnots, bool verify = true) {
    kp.validate();
    if (grid_size < 64) throw std::invalid_argument("SkeletonTable: grid_size must be >= 64");
    SkeletonTable tab;
    tab.params_ = kp;
    tab.scale_ = kp.depth / (3.0 * pi);
    tab.s_max_ = std::log1p(tab.scale_ * pi);
    tab.step_ = tab.s_max_ / (grid_size - 1);
    tab.psi_pi_ = skeleton_at_pi(kp);

    const auto n = static_cast<std::size_t>(grid_size);
    tab.t_.resize(n);
    tab.value_.resize(n);
    tab.slope_.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = k + 1 == n ? pi : std::min(pi, tab.t_of_s(k * tab.step_));
      const auto jet = skeleton_jet<1>(t, kp);
      tab.t_[k] = t;
      tab.value_[k] = k + 1 == n ? 0.0 : jet.value() - tab.psi_pi_;
      tab.slope_[k] = jet.c[1] * (1.0 + tab.scale_ * t) / tab.scale_;  // d/ds
    }
    tab.limit_slopes();
    tab.build_antiderivative();
    if (verify) tab.verify_midpoints();
    return tab;
  }

  const KernelParams& params() const { return params_; }
  double psi_at_pi() const { return psi_pi_; }
  double psi_dc_at_zero() const { return value_.front(); }
  std::span<const double> knots() const { return t_; }
  std::span<const double> values() const { return value_; }
  double max_midpoint_error() const { return max_mid_error_; }

  // psi°(t), t clamped to [0, pi]
  double operator()(double t) const {
    const double s = s_of_t(t);
    const auto [k, u] = locate(s);
    return hermite(k, u);
  }

  double skeleton(double t) const { return (*this)(t) + psi_pi_; }

  // d psi°/dt
  double derivative(double t) const {
    t = std::clamp(t, 0.0, pi);
    const double s = s_of_t(t);
    const auto [k, u] = locate(s);
    const double y0 = value_[k], y1 = value_[k + 1], m0 = slope_[k] * step_, m1 = slope_[k + 1] * step_;
    const double d = (6 * u * u - 6 * u) * y0 + (3 * u * u - 4 * u + 1) * m0 + (-6 * u * u + 6 * u) * y1 +
                     (3 * u * u - 2 * u) * m1;
    return d / step_ * scale_ / (1.0 + scale_ * t);
  }

  // Integral of psi° over [0, t].
  double antiderivative(double t) const {
    t = std::clamp(t, 0.0, pi);
    const double s = s_of_t(t);
    const auto [k, u] = locate(s);
    const double s0 = k * step_;
    return cumulative_[k] + gauss_legendre([&](double x) { return integrand(x); }, s0, s);
  }

  double total_integral() const { return cumulative_.back(); }

 private:
  KernelParams params_;
  double scale_ = 1.0, s_max_ = 0.0, step_ = 0.0, psi_pi_ = 0.0, max_mid_error_ = 0.0;
  std::vector<double> t_, value_, slope_, cumulative_;

  double t_of_s(double s) const { return std::expm1(s) / scale_; }
  double s_of_t(double t) const { return std::log1p(scale_ * std::clamp(t, 0.0, pi)); }

  std::pair<std::size_t, double> locate(double s) const {
    const auto last = t_.size() - 2;
    auto k = static_cast<std::size_t>(std::max(0.0, std::floor(s / step_)));
    k = std::min(k, last);
    return {k, std::clamp((s - k * step_) / step_, 0.0, 1.0)};
  }

  double hermite(std::size_t k, double u) const {
    const double u2 = u * u, u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * value_[k] + (u3 - 2 * u2 + u) * step_ * slope_[k] + (-2 * u3 + 3 * u2) * value_[k + 1] +
           (u3 - u2) * step_ * slope_[k + 1];
  }

  // psi°(t(s)) dt/ds
  double integrand(double s) const {
    const auto [k, u] = locate(s);
    return hermite(k, u) * std::exp(s) / scale_;
  }

  // Fritsch-Carlson: keeps the interpolant nonincreasing.
  void limit_slopes() {
    for (auto& m : slope_) m = std::min(m, 0.0);
    for (std::size_t k = 0; k + 1 < t_.size(); ++k) {
      const double delta = (value_[k + 1] - value_[k]) / step_;
      if (delta == 0.0) {
        slope_[k] = slope_[k + 1] = 0.0;
        continue;
      }
      const double a = slope_[k] / delta, b = slope_[k + 1] / delta;
      const double r = a * a + b * b;
      if (r > 9.0) {
        const double tau = 3.0 / std::sqrt(r);
        slope_[k] = tau * a * delta;
        slope_[k + 1] = tau * b * delta;
      }
    }
  }

  void build_antiderivative() {
    cumulative_.assign(t_.size(), 0.0);
    for (std::size_t k = 0; k + 1 < t_.size(); ++k)
      cumulative_[k + 1] =
          cumulative_[k] + gauss_legendre([&](double x) { return integrand(x); }, k * step_, (k + 1) * step_);
  }

  void verify_midpoints() {
    const double tol = 1e-8 * value_.front();
    for (std::size_t k = 0; k + 1 < t_.size(); ++k) {
      const double s = (k + 0.5) * step_;
      const double t = std::min(pi, t_of_s(s));
      const double err = std::abs((*this)(t) - (deepcurves::skeleton(t, params_) - psi_pi_));
      max_mid_error_ = std::max(max_mid_error_, err);
    }
    if (max_mid_error_ > tol)
      throw numeric_error("SkeletonTable: midpoint interpolation error " + std::to_string(max_mid_error_) +
                          " exceeds 1e-8 * psi°(0)");
  }
};

}  // namespace deepcurves
