#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace deepcurves {

// Truncated Taylor polynomial: c[k] = f^(k)(x0) / k!.
template <int N>
struct Taylor {
  static_assert(N >= 0);
  std::array<double, N + 1> c{};

  Taylor() = default;
  constexpr Taylor(double value) { c[0] = value; }

  static constexpr Taylor variable(double x0) {
    Taylor t(x0);
    if constexpr (N >= 1) t.c[1] = 1.0;
    return t;
  }

  constexpr double value() const { return c[0]; }

  // k-th derivative (not the normalized coefficient)
  constexpr double derivative(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c[static_cast<std::size_t>(k)] * f;
  }

  Taylor& operator+=(const Taylor& o) {
    for (int k = 0; k <= N; ++k) c[k] += o.c[k];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
    return *this;
  }
  Taylor& operator*=(double s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  Taylor& operator*=(const Taylor& o) {
    std::array<double, N + 1> r{};
    for (int k = 0; k <= N; ++k)
      for (int i = 0; i <= k; ++i) r[k] += c[i] * o.c[k - i];
    c = r;
    return *this;
  }

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator*(Taylor a, const Taylor& b) { return a *= b; }
  friend Taylor operator*(Taylor a, double s) { return a *= s; }
  friend Taylor operator*(double s, Taylor a) { return a *= s; }
  friend Taylor operator-(Taylor a) { return a *= -1.0; }
};

// outer(x0 + d) where outer is given by normalized coefficients at x0 = inner.c[0].
template <int N>
Taylor<N> compose(const std::array<double, N + 1>& outer, const Taylor<N>& inner) {
  Taylor<N> d = inner;
  d.c[0] = 0.0;
  Taylor<N> r(outer[N]);
  for (int k = N - 1; k >= 0; --k) {
    r *= d;
    r.c[0] += outer[k];
  }
  return r;
}

template <int N>
Taylor<N> sin(const Taylor<N>& x) {
  std::array<double, N + 1> o{};
  const double s = std::sin(x.c[0]), co = std::cos(x.c[0]);
  double f = 1.0;
  for (int k = 0; k <= N; ++k) {
    if (k > 0) f /= k;
    const double d = (k % 4 == 0) ? s : (k % 4 == 1) ? co : (k % 4 == 2) ? -s : -co;
    o[k] = d * f;
  }
  return compose<N>(o, x);
}

template <int N>
Taylor<N> cos(const Taylor<N>& x) {
  std::array<double, N + 1> o{};
  const double s = std::sin(x.c[0]), co = std::cos(x.c[0]);
  double f = 1.0;
  for (int k = 0; k <= N; ++k) {
    if (k > 0) f /= k;
    const double d = (k % 4 == 0) ? co : (k % 4 == 1) ? -s : (k % 4 == 2) ? -co : s;
    o[k] = d * f;
  }
  return compose<N>(o, x);
}

// requires x.c[0] > 0
template <int N>
Taylor<N> sqrt(const Taylor<N>& x) {
  Taylor<N> r;
  r.c[0] = std::sqrt(x.c[0]);
  for (int k = 1; k <= N; ++k) {
    double s = x.c[k];
    for (int i = 1; i < k; ++i) s -= r.c[i] * r.c[k - i];
    r.c[k] = s / (2.0 * r.c[0]);
  }
  return r;
}

template <int N>
Taylor<N> reciprocal(const Taylor<N>& x) {
  Taylor<N> r;
  r.c[0] = 1.0 / x.c[0];
  for (int k = 1; k <= N; ++k) {
    double s = 0.0;
    for (int i = 1; i <= k; ++i) s += x.c[i] * r.c[k - i];
    r.c[k] = -s / x.c[0];
  }
  return r;
}

}  // namespace deepcurves
