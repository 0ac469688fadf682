#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "errors.hpp"

namespace deepcurves {

// 8-point Gauss-Legendre on [-1, 1].
inline constexpr std::array<double, 8> kGaussNodes8 = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
inline constexpr std::array<double, 8> kGaussWeights8 = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < kGaussNodes8.size(); ++i) s += kGaussWeights8[i] * f(mid + half * kGaussNodes8[i]);
  return s * half;
}

// Adaptive bisection on 8-point Gauss panels.
template <class F>
double adaptive_integrate(F&& f, double a, double b, double abs_tol, int max_depth = 40) {
  std::function<double(double, double, double, double, int)> rec = [&](double lo, double hi, double whole,
                                                                        double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double left = gauss_legendre(f, lo, mid), right = gauss_legendre(f, mid, hi);
    if (std::abs(left + right - whole) <= tol) return left + right;
    if (depth >= max_depth) throw numeric_error("adaptive_integrate: no convergence");
    return rec(lo, mid, left, 0.5 * tol, depth + 1) + rec(mid, hi, right, 0.5 * tol, depth + 1);
  };
  return rec(a, b, gauss_legendre(f, a, b), abs_tol, 0);
}

}  // namespace deepcurves
