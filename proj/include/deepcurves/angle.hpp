#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "taylor.hpp"

namespace deepcurves {

inline constexpr double pi = std::numbers::pi;

namespace detail {

// phi(t) = sum_k kPhiSeries[k] t^k, accurate to ~1e-19 for t <= kSeriesCutoff
inline constexpr double kSeriesCutoff = 0.2;
inline constexpr std::array<double, 17> kPhiSeries = {
    0.0,
    1.0,
    -0.1061032953945968905126,
    -0.005628954646796542857993,
    -0.00767080366395830175981,
    0.001046578103320077590201,
    -0.000605804937069906260424,
    0.0002874562691827570895247,
    -0.00008533801317204071435485,
    0.000048125731078911478878,
    -0.00001754171137132642612699,
    0.000007976424870415742515878,
    -0.000003555865102001172608606,
    0.000001498129514100429230962,
    -6.931119640095953940421e-7,
    3.032997329100200658193e-7,
    -1.374222325467849188888e-7,
};

inline void check_angle(double t, const char* what) {
  if (!(t >= 0.0 && t <= pi))
    throw std::domain_error(std::string(what) + ": angle " + std::to_string(t) + " outside [0, pi]");
}

}  // namespace detail

// One-layer angle map of a ReLU layer, phi(t) = acos((1 - t/pi) cos t + sin t / pi).
// Evaluated through 1 - cos(phi) = 2 sin^2(t/2) + (t cos t - sin t)/pi to avoid acos near 1.
inline double angle_evolution(double t) {
  detail::check_angle(t, "angle_evolution");
  if (t < detail::kSeriesCutoff) {
    const std::size_t degree = t < 0.005 ? 6 : t < 0.0238 ? 8 : t < 0.06 ? 10 : t < 0.11 ? 12 : 16;
    double r = 0.0;
    for (std::size_t k = degree + 1; k-- > 0;) r = r * t + detail::kPhiSeries[k];
    return r;
  }
  const double h = std::sin(0.5 * t);
  const double one_minus_c = 2.0 * h * h + (t * std::cos(t) - std::sin(t)) / pi;
  return 2.0 * std::asin(std::sqrt(std::max(0.0, 0.5 * one_minus_c)));
}

// Normalized Taylor coefficients phi^(k)(t)/k!, k = 0..N, N <= 3.
template <int N>
std::array<double, N + 1> angle_evolution_coefficients(double t) {
  static_assert(N >= 0 && N <= 3);
  std::array<double, N + 1> out{};
  if (t < detail::kSeriesCutoff) {
    // value and first derivative tolerate a shorter series for small t
    const int degree = N >= 2 ? 16 : t < 0.005 ? 6 : t < 0.0238 ? 8 : t < 0.06 ? 10 : t < 0.11 ? 12 : 16;
    for (int k = 0; k <= N; ++k) {
      double r = 0.0;
      for (int j = degree; j >= k; --j) {
        double binom = 1.0;
        for (int i = 0; i < k; ++i) binom = binom * (j - i) / (i + 1);
        r = r * t + binom * detail::kPhiSeries[static_cast<std::size_t>(j)];
      }
      out[k] = r;
    }
    return out;
  }
  const double p = angle_evolution(t);
  out[0] = p;
  if constexpr (N >= 1) {
    const double sp = std::sin(p), cp = std::cos(p);
    const double st = std::sin(t), ct = std::cos(t), a = 1.0 - t / pi;
    const double u = a * st;
    const double d1 = u / sp;
    out[1] = d1;
    if constexpr (N >= 2) {
      const double u1 = -st / pi + a * ct;
      const double d2 = (u1 - cp * d1 * d1) / sp;
      out[2] = d2 / 2.0;
      if constexpr (N >= 3) {
        const double u2 = -2.0 * ct / pi - a * st;
        const double d3 = (u2 + sp * d1 * d1 * d1 - 3.0 * cp * d1 * d2) / sp;
        out[3] = d3 / 6.0;
      }
    }
  }
  return out;
}

inline double iterated_angle_evolution(double t, int layers) {
  detail::check_angle(t, "iterated_angle_evolution");
  if (layers < 0) throw std::domain_error("iterated_angle_evolution: negative layer count");
  for (int l = 0; l < layers; ++l) t = angle_evolution(t);
  return t;
}

// Taylor jet of the iterate as a function of its input.
template <int N>
Taylor<N> iterated_angle_evolution_jet(double t, int layers) {
  detail::check_angle(t, "iterated_angle_evolution_jet");
  auto p = Taylor<N>::variable(t);
  for (int l = 0; l < layers; ++l) p = compose<N>(angle_evolution_coefficients<N>(p.value()), p);
  return p;
}

// Fluid surrogate t / (1 + l t / (3 pi)).
inline double hat_iterated_angle(double t, int layers) {
  return t / (1.0 + layers * t / (3.0 * pi));
}

inline double fluid_lower_bound(double t, int layers) {
  return t / (1.0 + layers * t / pi);
}

}  // namespace deepcurves
