#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "quadrature.hpp"
#include "taylor.hpp"

namespace deepcurves {

inline constexpr int kCurveOrder = 5;
using CurveJet = std::vector<Taylor<kCurveOrder>>;  // one truncated series per ambient coordinate

// Closed curve t in [0, 1) -> S^{D-1}. The jet returns x(t + h) as a polynomial in h.
struct ParametricCurve {
  int dimension = 0;
  std::function<CurveJet(double)> jet;

  Eigen::VectorXd position(double t) const { return derivative(t, 0); }

  Eigen::VectorXd derivative(double t, int order) const {
    const auto j = jet(t);
    Eigen::VectorXd v(dimension);
    for (int i = 0; i < dimension; ++i) v[i] = j[static_cast<std::size_t>(i)].derivative(order);
    return v;
  }

  double speed(double t) const { return derivative(t, 1).norm(); }
};

// Uniform arc-length samples with derivatives in arc length.
struct UnitSpeedCurve {
  double length = 0.0;
  // derivatives[k] is M x D, row i holds x^{(k)}(s_i); derivatives[0] are the points
  std::vector<Eigen::MatrixXd> derivatives;
  std::vector<double> parameter;  // source parameter t_i of each sample

  int samples() const { return derivatives.empty() ? 0 : static_cast<int>(derivatives[0].rows()); }
  int dimension() const { return derivatives.empty() ? 0 : static_cast<int>(derivatives[0].cols()); }
  const Eigen::MatrixXd& points() const { return derivatives[0]; }
  double spacing() const { return length / samples(); }
  double arclength(int i) const { return i * spacing(); }
};

// (u, v, w) -> (u, v, w, sqrt(1 - u^2 - v^2 - w^2))
inline Eigen::Vector4d sphere_lift(const Eigen::Vector3d& p) {
  const double r2 = p.squaredNorm();
  if (!(r2 < 1.0)) throw std::domain_error("sphere_lift: point must lie in the open unit ball");
  return {p[0], p[1], p[2], std::sqrt(1.0 - r2)};
}

template <int N>
std::array<Taylor<N>, 4> sphere_lift(const std::array<Taylor<N>, 3>& p) {
  Taylor<N> r2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
  if (!(r2.value() < 1.0)) throw std::domain_error("sphere_lift: point must lie in the open unit ball");
  return {p[0], p[1], p[2], sqrt(Taylor<N>(1.0) - r2)};
}

namespace detail {

template <int N>
Taylor<N> differentiate(const Taylor<N>& f) {
  Taylor<N> d;
  for (int k = 0; k < N; ++k) d.c[k] = (k + 1) * f.c[k + 1];
  return d;
}

template <int N>
Taylor<N> integrate(const Taylor<N>& f) {
  Taylor<N> r;
  for (int k = 1; k <= N; ++k) r.c[k] = f.c[k - 1] / k;
  return r;
}

// Inverse of a series with zero constant term and nonzero linear term.
template <int N>
Taylor<N> revert(const Taylor<N>& f) {
  std::array<double, N + 1> outer = f.c;
  outer[0] = 0.0;
  auto sigma = Taylor<N>::variable(0.0);
  Taylor<N> d = sigma * (1.0 / f.c[1]);
  for (int it = 0; it < N; ++it) {
    Taylor<N> higher = compose<N>(outer, d) - d * f.c[1];
    d = (sigma - higher) * (1.0 / f.c[1]);
  }
  return d;
}

}  // namespace detail

struct ReparameterizeOptions {
  int panels = 4096;
  double newton_tol = 1e-14;
};

// Resample at M points equispaced in arc length with exact arc-length derivatives up to order 5.
inline UnitSpeedCurve arclength_reparameterize(const ParametricCurve& c, int samples, ReparameterizeOptions opt = {}) {
  if (samples < 1) throw std::invalid_argument("arclength_reparameterize: sample count must be positive");
  const int P = std::max(opt.panels, 2 * samples);
  std::vector<double> cum(static_cast<std::size_t>(P) + 1, 0.0);
  auto speed = [&](double t) {
    const double v = c.speed(t);
    if (v < 1e-10) throw degenerate_curve_error("arclength_reparameterize: speed vanishes at t = " + std::to_string(t));
    return v;
  };
  for (int p = 0; p < P; ++p) cum[p + 1] = cum[p] + gauss_legendre(speed, double(p) / P, double(p + 1) / P);
  const double len = cum.back();

  UnitSpeedCurve out;
  out.length = len;
  out.derivatives.assign(kCurveOrder + 1, Eigen::MatrixXd(samples, c.dimension));
  out.parameter.resize(static_cast<std::size_t>(samples));

  std::size_t panel = 0;
  for (int i = 0; i < samples; ++i) {
    const double target = len * i / samples;
    while (panel + 1 < static_cast<std::size_t>(P) && cum[panel + 1] <= target) ++panel;
    const double lo = double(panel) / P, hi = double(panel + 1) / P;
    // Newton on S(t) = target inside the panel, bisection fallback
    double a = lo, b = hi, t = lo + (target - cum[panel]) / (cum[panel + 1] - cum[panel]) * (hi - lo);
    for (int it = 0; it < 100; ++it) {
      const double f = cum[panel] + gauss_legendre(speed, lo, t) - target;
      if (f == 0.0) break;
      if (f > 0) b = t; else a = t;
      double tn = t - f / speed(t);
      if (!(tn > a && tn < b)) tn = 0.5 * (a + b);
      const bool done = std::abs(tn - t) < opt.newton_tol;
      t = tn;
      if (done || b - a < opt.newton_tol) break;
    }
    out.parameter[static_cast<std::size_t>(i)] = t;

    // compose x(t + delta(sigma)) where s(t + delta) - s(t) = sigma
    const auto jet = c.jet(t);
    Taylor<kCurveOrder> v2(0.0);
    for (const auto& xi : jet) {
      const auto d = detail::differentiate(xi);
      v2 += d * d;
    }
    const auto ds = detail::integrate(sqrt(v2));
    const auto delta = detail::revert(ds);
    for (int k = 0; k < c.dimension; ++k) {
      auto series = compose<kCurveOrder>(jet[static_cast<std::size_t>(k)].c, delta);
      for (int o = 0; o <= kCurveOrder; ++o) out.derivatives[o](i, k) = series.derivative(o);
    }
  }
  return out;
}

// Trigonometric interpolant of periodic samples; derivatives are spectral.
inline ParametricCurve trigonometric_interpolant(const Eigen::MatrixXd& samples) {
  const int M = static_cast<int>(samples.rows()), D = static_cast<int>(samples.cols());
  if (M < 8) throw resolution_error("trigonometric_interpolant: need at least 8 samples");
  const int K = (M - 1) / 2;  // odd band, drop the Nyquist term
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(K + 1, D), b = Eigen::MatrixXd::Zero(K + 1, D);
  for (int k = 0; k <= K; ++k)
    for (int j = 0; j < M; ++j) {
      const double th = 2.0 * std::numbers::pi * k * j / M;
      a.row(k) += std::cos(th) * samples.row(j);
      b.row(k) += std::sin(th) * samples.row(j);
    }
  a *= 2.0 / M;
  b *= 2.0 / M;
  a.row(0) *= 0.5;
  ParametricCurve c;
  c.dimension = D;
  c.jet = [a, b, K, D](double t) {
    CurveJet out(static_cast<std::size_t>(D));
    for (int k = 0; k <= K; ++k) {
      const double w = 2.0 * std::numbers::pi * k;
      auto th = Taylor<kCurveOrder>::variable(t) * w;
      const auto co = cos(th), si = sin(th);
      for (int d = 0; d < D; ++d) out[static_cast<std::size_t>(d)] += co * a(k, d) + si * b(k, d);
    }
    return out;
  };
  return c;
}

}  // namespace deepcurves
