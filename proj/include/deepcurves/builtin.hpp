#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curve.hpp"
#include "errors.hpp"
#include "geometry.hpp"

namespace deepcurves {

struct BuiltinOptions {
  double separation = 0.05;  // clover: radial offset between petals
  double scale = 0.01;       // clover: shrink factor before the sphere lift
  double gap = 0.3;          // two_circles: polar gap between the circles
  double polar = 0.4;        // two_circles: polar angle of the + circle
  int samples = 2048;        // arc-length samples per component
  DensityMode density = DensityMode::riemannian_uniform;
};

using T5 = Taylor<kCurveOrder>;

namespace detail {

inline T5 angle_variable(double t) { return T5::variable(t) * (2.0 * pi); }

inline CurveJet to_jet(std::initializer_list<T5> xs) { return CurveJet(xs); }

inline ParametricCurve latitude_circle(double polar) {
  ParametricCurve c;
  c.dimension = 3;
  c.jet = [polar](double t) {
    const T5 u = angle_variable(t);
    return to_jet({cos(u) * std::sin(polar), sin(u) * std::sin(polar), T5(std::cos(polar))});
  };
  return c;
}

// Spherical curve with polar angle base + amp sin(3 u + phase).
inline ParametricCurve wavy_circle(double base, double amp, double phase) {
  ParametricCurve c;
  c.dimension = 3;
  c.jet = [=](double t) {
    const T5 u = angle_variable(t);
    const T5 th = T5(base) + sin(u * 3.0 + T5(phase)) * amp;
    return to_jet({sin(th) * cos(u), sin(th) * sin(u), cos(th)});
  };
  return c;
}

// Planar clover petal curve before unfolding, parameter u in [0, 2 pi).
template <int N>
std::array<Taylor<N>, 3> clover_minus_raw(const Taylor<N>& u, double sep) {
  const double c8 = std::cos(pi / 8), s8 = std::sin(pi / 8);
  const Taylor<N> r = sin(u * 4.0) + Taylor<N>(1.0 + sep);
  const Taylor<N> cu = cos(u) * r, su = sin(u) * r;
  return {cos(u * 4.0), cu * c8 + su * s8, cu * (-s8) + su * c8};
}

template <int N>
std::array<Taylor<N>, 3> clover_plus_raw(const Taylor<N>& u) {
  return {sin(u) * 4.0, (cos(u) - Taylor<N>(1.0)) * 4.0, Taylor<N>(0.0)};
}

inline double wrap_two_pi(double u) {
  u = std::fmod(u, 2 * pi);
  return u < 0 ? u + 2 * pi : u;
}

struct Reflection {
  double begin = 0.0, end = 0.0;  // parameter segment, end may exceed 2 pi
  Eigen::Vector2d anchor, direction;
};

}  // namespace detail

// Parameters in [0, 2 pi) where |dx2/du| = |dx3/du| on the petal curve, excluding the
// four tangencies at the petal dips (sin 4u = -1).
inline std::vector<double> clover_unfolding_points(double sep, int scan = 20000, double tol = 1e-10) {
  auto f = [sep](double u) {
    const auto x = detail::clover_minus_raw<1>(Taylor<1>::variable(u), sep);
    return std::abs(x[1].c[1]) - std::abs(x[2].c[1]);
  };
  std::vector<double> roots;
  for (int k = 0; k < scan; ++k) {
    double a = 2 * pi * k / scan, b = 2 * pi * (k + 1) / scan;
    double fa = f(a), fb = f(b);
    if (fa == 0.0) {
      roots.push_back(a);
      continue;
    }
    if (fa * fb > 0.0) continue;
    while (b - a > tol) {
      const double m = 0.5 * (a + b), fm = f(m);
      if ((fm < 0) == (fa < 0)) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    roots.push_back(0.5 * (a + b));
  }
  std::vector<double> kept;
  for (double r : roots)
    if (std::sin(4 * r) > 0.0) kept.push_back(r);
  if (kept.size() != 8)
    throw construction_error("clover: expected 8 unfolding points, found " + std::to_string(kept.size()) + " (of " +
                             std::to_string(roots.size()) + " roots)");
  return kept;
}

// Clover family member with k in {1, 2, 3, 4}; 4 - k petal reflections are applied.
namespace detail {

// Source curves of clover(k); sampling happens in finish_instance.
inline TwoCurveInstance clover_sources(int k, const BuiltinOptions& opt) {
  if (k < 1 || k > 4) throw std::invalid_argument("clover: k must be in {1, 2, 3, 4}");
  const double sep = opt.separation, scale = opt.scale;
  const auto pts = clover_unfolding_points(sep);
  std::vector<detail::Reflection> refl;
  for (int r = 0; r < 4 - k; ++r) {
    detail::Reflection rf;
    rf.begin = pts[2 * r + 1];
    rf.end = 2 * r + 2 < 8 ? pts[2 * r + 2] : pts[0] + 2 * pi;
    auto at = [sep](double u) {
      const auto x = detail::clover_minus_raw<0>(Taylor<0>(u), sep);
      return Eigen::Vector2d(x[1].value(), x[2].value());
    };
    const Eigen::Vector2d A = at(rf.begin), B = at(detail::wrap_two_pi(rf.end));
    rf.anchor = A;
    rf.direction = (B - A).normalized();
    refl.push_back(rf);
  }

  ParametricCurve minus;
  minus.dimension = 4;
  minus.jet = [sep, scale, refl](double t) {
    const double u0 = 2 * pi * t;
    auto x = detail::clover_minus_raw<kCurveOrder>(detail::angle_variable(t), sep);
    for (const auto& rf : refl) {
      double u = detail::wrap_two_pi(u0);
      if (u < rf.begin) u += 2 * pi;
      if (!(u > rf.begin && u < rf.end)) continue;
      // P -> A + (2 d d^T - I)(P - A) in the (x2, x3) plane
      const Eigen::Matrix2d R = 2.0 * rf.direction * rf.direction.transpose() - Eigen::Matrix2d::Identity();
      T5 p = x[1] - T5(rf.anchor[0]), q = x[2] - T5(rf.anchor[1]);
      x[1] = p * R(0, 0) + q * R(0, 1) + T5(rf.anchor[0]);
      x[2] = p * R(1, 0) + q * R(1, 1) + T5(rf.anchor[1]);
    }
    for (auto& xi : x) xi *= scale;
    const auto lifted = sphere_lift<kCurveOrder>(x);
    return CurveJet(lifted.begin(), lifted.end());
  };

  ParametricCurve plus;
  plus.dimension = 4;
  plus.jet = [scale](double t) {
    auto x = detail::clover_plus_raw<kCurveOrder>(detail::angle_variable(t));
    for (auto& xi : x) xi *= scale;
    const auto lifted = sphere_lift<kCurveOrder>(x);
    return CurveJet(lifted.begin(), lifted.end());
  };

  TwoCurveInstance inst;
  inst.name = "clover" + std::to_string(k);
  inst.plus_source = plus;
  inst.minus_source = minus;
  return inst;
}

inline void finish_instance(TwoCurveInstance& inst, const BuiltinOptions& opt) {
  if (opt.samples < 64) throw resolution_error("builtin_geometry: need at least 64 samples per curve");
  inst.plus = arclength_reparameterize(inst.plus_source, opt.samples);
  inst.minus = arclength_reparameterize(inst.minus_source, opt.samples);
  inst.density = opt.density;
  if (opt.density == DensityMode::riemannian_uniform) {
    inst.rho_min = 0.5 / std::max(inst.plus.length, inst.minus.length);
    inst.rho_max = 0.5 / std::min(inst.plus.length, inst.minus.length);
  } else {
    double vmin = 1e300, vmax = 0.0;
    for (const auto* c : {&inst.plus_source, &inst.minus_source})
      for (int i = 0; i < 1024; ++i) {
        const double v = c->speed(i / 1024.0);
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
      }
    inst.rho_min = 0.5 / vmax;
    inst.rho_max = 0.5 / vmin;
  }
}

}  // namespace detail

inline const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = {"two_circles", "fig1_like", "clover1", "clover2", "clover3", "clover4"};
  return names;
}

// Checks disjointness and the pairwise angle cap.
inline void validate_instance(const TwoCurveInstance& inst) {
  if (!(min_cross_angle(inst) > 0.0)) throw construction_error(inst.name + ": components intersect");
  if (max_pairwise_angle(inst) > pi / 2 + 1e-6) throw construction_error(inst.name + ": pairwise angle exceeds pi/2");
}

inline TwoCurveInstance builtin_geometry(const std::string& name, const BuiltinOptions& opt = {}) {
  TwoCurveInstance inst;
  if (name == "two_circles") {
    inst.name = name;
    inst.plus_source = detail::latitude_circle(opt.polar);
    inst.minus_source = detail::latitude_circle(opt.polar + opt.gap);
  } else if (name == "fig1_like") {
    // lookalike: two interleaved wavy circles in a polar cap
    inst.name = name;
    inst.plus_source = detail::wavy_circle(0.35, 0.08, 0.0);
    inst.minus_source = detail::wavy_circle(0.55, 0.08, pi);
  } else if (name.rfind("clover", 0) == 0 && name.size() == 7 && name[6] >= '1' && name[6] <= '4') {
    inst = detail::clover_sources(name[6] - '0', opt);
  } else {
    throw std::invalid_argument("builtin_geometry: unknown geometry '" + name + "'");
  }
  detail::finish_instance(inst, opt);
  validate_instance(inst);
  return inst;
}

inline TwoCurveInstance clover(int k, const BuiltinOptions& opt = {}) {
  if (k < 1 || k > 4) throw std::invalid_argument("clover: k must be in {1, 2, 3, 4}");
  return builtin_geometry("clover" + std::to_string(k), opt);
}

}  // namespace deepcurves
