#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curve.hpp"
#include "errors.hpp"
#include "kernel.hpp"

namespace deepcurves {

enum class DensityMode { riemannian_uniform, parameter_uniform };

inline const char* to_string(DensityMode m) {
  return m == DensityMode::riemannian_uniform ? "riemannian_uniform" : "parameter_uniform";
}

struct TwoCurveInstance {
  std::string name;
  ParametricCurve plus_source, minus_source;
  UnitSpeedCurve plus, minus;
  DensityMode density = DensityMode::riemannian_uniform;
  double rho_min = 0.0, rho_max = 0.0;

  const UnitSpeedCurve& component(int c) const { return c == 0 ? plus : minus; }
  int total_samples() const { return plus.samples() + minus.samples(); }
  double length() const { return plus.length + minus.length; }

  // global sample index -> (component, local index); plus samples come first
  std::pair<int, int> locate(int i) const {
    return i < plus.samples() ? std::pair{0, i} : std::pair{1, i - plus.samples()};
  }
  Eigen::VectorXd point(int i) const {
    const auto [c, k] = locate(i);
    return component(c).points().row(k).transpose();
  }
};

struct DerivativeBounds {
  std::array<double, 6> sup_norm{};  // sup_norm[i] = sup |x^{(i)}|, index 0 unused
  double kappa = 0.0;
  double kappa_hat = 0.0;
};

inline double kappa_hat_of(double kappa) { return std::max(kappa, 2.0 / pi); }

inline DerivativeBounds derivative_bounds(const UnitSpeedCurve& c) {
  DerivativeBounds b;
  for (int o = 1; o <= kCurveOrder; ++o) b.sup_norm[o] = c.derivatives[o].rowwise().norm().maxCoeff();
  const Eigen::VectorXd acc2 = c.derivatives[2].rowwise().squaredNorm();
  b.kappa = std::sqrt(std::max(acc2.maxCoeff() - 1.0, 0.0));
  b.kappa_hat = kappa_hat_of(b.kappa);
  return b;
}

inline DerivativeBounds derivative_bounds(const TwoCurveInstance& inst) {
  auto a = derivative_bounds(inst.plus), b = derivative_bounds(inst.minus);
  for (int o = 1; o <= kCurveOrder; ++o) a.sup_norm[o] = std::max(a.sup_norm[o], b.sup_norm[o]);
  a.kappa = std::max(a.kappa, b.kappa);
  a.kappa_hat = kappa_hat_of(a.kappa);
  return a;
}

inline constexpr double kInfiniteDistance = std::numeric_limits<double>::infinity();

inline double intrinsic_distance(const TwoCurveInstance& inst, int i, int j) {
  const auto [ci, ki] = inst.locate(i);
  const auto [cj, kj] = inst.locate(j);
  if (ci != cj) return kInfiniteDistance;
  const auto& c = inst.component(ci);
  const double d = std::abs(ki - kj) * c.spacing();
  return std::min(d, c.length - d);
}

namespace detail {

inline void require_resolution(const TwoCurveInstance& inst, const char* what) {
  if (inst.plus.samples() < 64 || inst.minus.samples() < 64)
    throw resolution_error(std::string(what) + ": fewer than 64 samples on a component");
}

inline Eigen::MatrixXd stacked_points(const TwoCurveInstance& inst) {
  Eigen::MatrixXd x(inst.total_samples(), inst.plus.dimension());
  x << inst.plus.points(), inst.minus.points();
  return x;
}

}  // namespace detail

struct InjectivityRadius {
  double value = 0.0;
  double cap = 0.0;          // sqrt(eps) / kappa_hat
  double grid_spacing = 0.0; // coarsest arc-length spacing used
};

inline InjectivityRadius injectivity_radius(const TwoCurveInstance& inst, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("injectivity_radius: eps must lie in (0, 1)");
  detail::require_resolution(inst, "injectivity_radius");
  const double cap = std::sqrt(eps) / derivative_bounds(inst).kappa_hat;
  const Eigen::MatrixXd x = detail::stacked_points(inst);
  const int n = static_cast<int>(x.rows());
  double best_cos = std::cos(cap);
  Eigen::VectorXd dots(n);
  for (int i = 0; i < n; ++i) {
    dots.noalias() = x * x.row(i).transpose();
    for (int j = i + 1; j < n; ++j)
      if (dots[j] > best_cos && intrinsic_distance(inst, i, j) >= cap) best_cos = dots[j];
  }
  return {std::min(cap, std::acos(std::clamp(best_cos, -1.0, 1.0))), cap,
          std::max(inst.plus.spacing(), inst.minus.spacing())};
}

// Arc [begin, end] on a circle of the given length; end may exceed length (wraps).
struct Arc {
  double begin = 0.0, end = 0.0;
};

// Minimal number of closed intervals of length 2 * radius covering a union of disjoint arcs on a circle.
// With centers_anywhere == false every center must lie inside one of the arcs.
inline int cover_arcs(std::vector<Arc> arcs, double circumference, double radius, bool centers_anywhere = true) {
  if (arcs.empty()) return 0;
  std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.begin < b.begin; });
  double covered_len = 0.0;
  for (const auto& a : arcs) covered_len += a.end - a.begin;
  if (centers_anywhere && covered_len >= circumference)
    return static_cast<int>(std::ceil(circumference / (2.0 * radius) - 1e-12));

  const std::size_t m = arcs.size();
  int best = std::numeric_limits<int>::max();
  for (std::size_t start = 0; start < m; ++start) {
    // unrolled copy starting at arc `start`
    std::vector<Arc> seq;
    seq.reserve(m);
    const double origin = arcs[start].begin;
    for (std::size_t k = 0; k < m; ++k) {
      Arc a = arcs[(start + k) % m];
      if (a.begin < origin) {
        a.begin += circumference;
        a.end += circumference;
      }
      seq.push_back(a);
    }
    int count = 0;
    double reach = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < seq.size(); ++k) {
      // uncovered part of this arc starts at max(begin, reach)
      while (reach < seq[k].end) {
        const double p = std::max(seq[k].begin, reach);
        double center = p + radius;
        if (!centers_anywhere) {
          // furthest admissible center within radius of p
          center = p;
          for (std::size_t q = k; q < seq.size() && seq[q].begin <= p + radius; ++q)
            center = std::max(center, std::min(seq[q].end, p + radius));
        }
        reach = center + radius;
        ++count;
        if (count >= best) break;
      }
      if (count >= best) break;
    }
    best = std::min(best, count);
  }
  return best;
}

struct CloverOptions {
  bool centers_anywhere = true;
};

// Sup over base samples of the covering number of the winding set
// { x' : d(x, x') >= sqrt(eps)/kappa_hat, angle(x, x') <= delta sqrt(eps)/kappa_hat }.
inline int clover_number(const TwoCurveInstance& inst, double eps, double delta, CloverOptions opt = {}) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("clover_number: eps must lie in (0, 1)");
  if (!(delta > 0.0 && delta <= 1.0 - eps)) throw std::domain_error("clover_number: delta must lie in (0, 1 - eps]");
  detail::require_resolution(inst, "clover_number");
  const auto bounds = derivative_bounds(inst);
  const double tau1 = std::sqrt(eps) / bounds.kappa_hat;
  const double cos_tau2 = std::cos(delta * tau1);
  const double radius = 1.0 / std::sqrt(1.0 + bounds.kappa * bounds.kappa);
  const Eigen::MatrixXd x = detail::stacked_points(inst);
  const int n = static_cast<int>(x.rows());

  int best = 0;
  std::vector<char> hit;
  Eigen::VectorXd dots(n);
  for (int i = 0; i < n; ++i) {
    dots.noalias() = x * x.row(i).transpose();
    int total = 0;
    for (int c = 0; c < 2; ++c) {
      const auto& comp = inst.component(c);
      const int m = comp.samples(), offset = c == 0 ? 0 : inst.plus.samples();
      hit.assign(static_cast<std::size_t>(m), 0);
      bool any = false;
      for (int k = 0; k < m; ++k) {
        const int j = offset + k;
        if (dots[j] >= cos_tau2 && intrinsic_distance(inst, i, j) >= tau1) {
          hit[static_cast<std::size_t>(k)] = 1;
          any = true;
        }
      }
      if (!any) continue;
      const double h = comp.spacing();
      std::vector<Arc> arcs;
      if (std::all_of(hit.begin(), hit.end(), [](char v) { return v != 0; })) {
        arcs.push_back({0.0, comp.length});
      } else {
        // start scanning just after a miss so runs never wrap
        int first_miss = 0;
        while (hit[static_cast<std::size_t>(first_miss)]) ++first_miss;
        for (int step = 1; step <= m; ++step) {
          const int k = (first_miss + step) % m;
          if (!hit[static_cast<std::size_t>(k)]) continue;
          const int prev = (k - 1 + m) % m;
          const double s = (first_miss + step) * h;
          if (!hit[static_cast<std::size_t>(prev)] || arcs.empty())
            arcs.push_back({s - 0.5 * h, s + 0.5 * h});
          else
            arcs.back().end = s + 0.5 * h;
        }
        for (auto& a : arcs)
          if (a.begin >= comp.length) {
            a.begin -= comp.length;
            a.end -= comp.length;
          }
      }
      total += cover_arcs(std::move(arcs), comp.length, radius, opt.centers_anywhere);
    }
    best = std::max(best, total);
  }
  return best;
}

inline double min_cross_angle(const TwoCurveInstance& inst) {
  const double c = (inst.plus.points() * inst.minus.points().transpose()).maxCoeff();
  return std::acos(std::clamp(c, -1.0, 1.0));
}

inline double max_pairwise_angle(const TwoCurveInstance& inst) {
  const Eigen::MatrixXd x = detail::stacked_points(inst);
  double lo = 1.0;
  for (int i = 0; i < x.rows(); ++i) lo = std::min(lo, (x * x.row(i).transpose()).minCoeff());
  return std::acos(std::clamp(lo, -1.0, 1.0));
}

struct GeometryReport {
  std::string name;
  double length = 0.0, length_plus = 0.0, length_minus = 0.0;
  DerivativeBounds bounds;
  double eps = 0.05, delta = 0.95;
  InjectivityRadius injectivity;
  int clover = 0;
  double min_cross_angle = 0.0;
  int samples_per_curve = 0;
};

inline GeometryReport geometry_report(const TwoCurveInstance& inst, double eps = 1.0 / 20.0, double delta = 19.0 / 20.0) {
  GeometryReport r;
  r.name = inst.name;
  r.length = inst.length();
  r.length_plus = inst.plus.length;
  r.length_minus = inst.minus.length;
  r.bounds = derivative_bounds(inst);
  r.eps = eps;
  r.delta = delta;
  r.injectivity = injectivity_radius(inst, eps);
  r.clover = clover_number(inst, eps, delta);
  r.min_cross_angle = min_cross_angle(inst);
  r.samples_per_curve = inst.plus.samples();
  return r;
}

}  // namespace deepcurves
