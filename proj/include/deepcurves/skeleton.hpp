#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "angle.hpp"
#include "taylor.hpp"

namespace deepcurves {

struct KernelParams {
  int depth = 2;       // hidden layers L
  double width = 2.0;  // scale n in front of the skeleton

  void validate() const {
    if (depth < 2) throw std::invalid_argument("KernelParams: depth must be >= 2, got " + std::to_string(depth));
    if (!(width > 0.0)) throw std::invalid_argument("KernelParams: width must be positive");
  }
};

// xi_l(t) = prod_{j=l}^{L-1} (1 - phi^[j](t)/pi)
inline double xi(double t, int layer, const KernelParams& kp) {
  kp.validate();
  detail::check_angle(t, "xi");
  if (layer < 0 || layer > kp.depth - 1)
    throw std::domain_error("xi: layer " + std::to_string(layer) + " outside [0, L-1]");
  double p = iterated_angle_evolution(t, layer);
  double prod = 1.0;
  for (int j = layer; j < kp.depth; ++j) {
    prod *= 1.0 - p / pi;
    p = angle_evolution(p);
  }
  return prod;
}

// xi_l and its first N derivatives.
template <int N>
Taylor<N> xi_jet(double t, int layer, const KernelParams& kp) {
  kp.validate();
  detail::check_angle(t, "xi_jet");
  if (layer < 0 || layer > kp.depth - 1)
    throw std::domain_error("xi_jet: layer " + std::to_string(layer) + " outside [0, L-1]");
  auto p = iterated_angle_evolution_jet<N>(t, layer);
  Taylor<N> prod(1.0);
  for (int j = layer; j < kp.depth; ++j) {
    prod *= Taylor<N>(1.0) - p * (1.0 / pi);
    p = compose<N>(angle_evolution_coefficients<N>(p.value()), p);
  }
  return prod;
}

// psi and its first N derivatives in one forward pass:
// S_j = a_j (1 + S_{j-1}), a_j = 1 - phi^[j]/pi, psi = (n/2) S_{L-1}.
template <int N>
Taylor<N> skeleton_jet(double t, const KernelParams& kp) {
  kp.validate();
  detail::check_angle(t, "skeleton");
  auto p = Taylor<N>::variable(t);
  Taylor<N> s(0.0);
  for (int j = 0; j < kp.depth; ++j) {
    Taylor<N> a = Taylor<N>(1.0) - p * (1.0 / pi);
    s.c[0] += 1.0;
    s = a * s;
    if (j + 1 < kp.depth) p = compose<N>(angle_evolution_coefficients<N>(p.value()), p);
  }
  return s * (0.5 * kp.width);
}

inline double skeleton(double t, const KernelParams& kp) {
  kp.validate();
  detail::check_angle(t, "skeleton");
  double p = t, s = 0.0;
  for (int j = 0; j < kp.depth; ++j) {
    s = (1.0 - p / pi) * (1.0 + s);
    if (j + 1 < kp.depth) p = angle_evolution(p);
  }
  return 0.5 * kp.width * s;
}

inline double skeleton_at_pi(const KernelParams& kp) { return skeleton(pi, kp); }

// psi(t) - psi(pi)
inline double skeleton_dc(double t, const KernelParams& kp) {
  if (t == pi) {
    kp.validate();
    return 0.0;
  }
  return skeleton(t, kp) - skeleton_at_pi(kp);
}

struct DerivativeResult {
  double value = 0.0;
  bool boundary = false;  // closed-form endpoint value rather than the interior recursion
};

inline DerivativeResult skeleton_derivative(double t, int order, const KernelParams& kp) {
  kp.validate();
  detail::check_angle(t, "skeleton_derivative");
  if (order < 1 || order > 3) throw std::domain_error("skeleton_derivative: order must be 1, 2 or 3");
  const double L = kp.depth, half_n = 0.5 * kp.width;
  if (t == 0.0 || t == pi) {
    if (order == 3)
      throw std::domain_error("skeleton_derivative: third derivative is only available in the interior");
    if (t == 0.0) {
      double sum = 0.0;
      for (int l = 0; l < kp.depth; ++l) {
        const double m = L - l;
        sum += order == 1 ? -m / pi
                          : m * (m - 1.0) / (pi * pi) + (L * (L - 1.0) - l * (l - 1.0)) / (3.0 * pi * pi);
      }
      return {half_n * sum, true};
    }
    if (order == 1) return {-half_n / pi * xi(pi, 1, kp), true};
    return {0.0, true};
  }
  const auto jet = skeleton_jet<3>(t, kp);
  return {jet.derivative(order), false};
}

// Product of fluid-surrogate factors, prod_{j=l}^{L-1} (1 - phihat^[j](t)/pi).
inline double hat_xi(double t, int layer, const KernelParams& kp) {
  double prod = 1.0;
  for (int j = layer; j < kp.depth; ++j) prod *= 1.0 - hat_iterated_angle(t, j) / pi;
  return prod;
}

inline double hat_skeleton_direct(double t, const KernelParams& kp) {
  kp.validate();
  detail::check_angle(t, "hat_skeleton");
  double s = 0.0;
  for (int j = 0; j < kp.depth; ++j) s = (1.0 - hat_iterated_angle(t, j) / pi) * (1.0 + s);
  return 0.5 * kp.width * s;
}

inline constexpr double kHatSkeletonSeriesThreshold = 1e-6;

// Closed form of the surrogate skeleton, expanded so the numerator carries no 1/t cancellation.
inline double hat_skeleton(double t, const KernelParams& kp) {
  kp.validate();
  detail::check_angle(t, "hat_skeleton");
  if (t < kHatSkeletonSeriesThreshold) return hat_skeleton_direct(t, kp);
  const double L = kp.depth, n = kp.width, a = 3.0 * pi;
  const double e1 = L - 3.0, e2 = L - 2.0, e3 = L - 1.0;
  const double s2 = e1 * e2 + e1 * e3 + e2 * e3, s3 = e1 * e2 * e3;
  const double q = (a + e1 * t) * (a + e2 * t) * (a + e3 * t);
  const double num = a * a * a * (3.0 * L + 4.0) + a * a * (s2 - 35.0) * t + a * (s3 + 50.0) * t * t - 24.0 * t * t * t;
  return n * (L - 4.0) / 8.0 + n / 8.0 * num / q;
}

}  // namespace deepcurves
