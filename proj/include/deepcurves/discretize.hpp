#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "curve.hpp"
#include "errors.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"

namespace deepcurves {

enum class Weighting {
  paper_uniform_t,  // uniform source parameter, weights 1/(2M), density folded into the nodes
  riemannian,       // uniform arc length, weights len/M, density 1/(2 len)
};

inline const char* to_string(Weighting w) { return w == Weighting::paper_uniform_t ? "paper_uniform_t" : "riemannian"; }

// Quadrature grid over both components, + component first.
struct DiscretizedManifold {
  Weighting weighting = Weighting::riemannian;
  int per_component = 0;
  std::array<double, 2> length{};
  Eigen::MatrixXd points;    // N x D
  Eigen::VectorXd t;         // source parameter in [0, 1)
  Eigen::VectorXd s;         // arc-length coordinate
  Eigen::VectorXd speed;     // |dx/dt| of the source parameterization
  Eigen::VectorXd weights;   // quadrature weights
  Eigen::VectorXd density;   // rho at the node
  Eigen::VectorXd labels;    // +1 / -1
  std::vector<int> component;

  int size() const { return static_cast<int>(points.rows()); }
  // probability weights w_i rho_i
  Eigen::VectorXd measure() const { return weights.cwiseProduct(density); }
};

inline DiscretizedManifold discretize(const TwoCurveInstance& inst, int M, Weighting weighting) {
  if (M < 16) throw resolution_error("discretize: need M >= 16 points per curve");
  DiscretizedManifold g;
  g.weighting = weighting;
  g.per_component = M;
  const int D = inst.plus.dimension(), N = 2 * M;
  g.points.resize(N, D);
  g.t.resize(N);
  g.s.resize(N);
  g.speed.resize(N);
  g.weights.resize(N);
  g.density.resize(N);
  g.labels.resize(N);
  g.component.resize(static_cast<std::size_t>(N));
  for (int c = 0; c < 2; ++c) {
    const ParametricCurve& src = c == 0 ? inst.plus_source : inst.minus_source;
    const double len = inst.component(c).length;
    g.length[static_cast<std::size_t>(c)] = len;
    UnitSpeedCurve unit;
    if (weighting == Weighting::riemannian)
      unit = inst.component(c).samples() == M ? inst.component(c) : arclength_reparameterize(src, M);
    double s_acc = 0.0;
    for (int i = 0; i < M; ++i) {
      const int k = c * M + i;
      g.labels[k] = c == 0 ? 1.0 : -1.0;
      g.component[static_cast<std::size_t>(k)] = c;
      if (weighting == Weighting::paper_uniform_t) {
        const double t = double(i) / M;
        if (i > 0) s_acc += gauss_legendre([&](double u) { return src.speed(u); }, double(i - 1) / M, t);
        g.t[k] = t;
        g.s[k] = s_acc;
        g.points.row(k) = src.position(t).transpose();
        g.speed[k] = src.speed(t);
        g.weights[k] = 1.0 / (2.0 * M);
        g.density[k] = 1.0;
      } else {
        g.t[k] = unit.parameter[static_cast<std::size_t>(i)];
        g.s[k] = unit.arclength(i);
        g.points.row(k) = unit.points().row(i);
        g.speed[k] = src.speed(g.t[k]);
        g.weights[k] = len / M;
        g.density[k] = 0.5 / len;
      }
    }
  }
  return g;
}

// sqrt(sum_i w_i rho_i |v_i|^2)
template <class Vec>
double weighted_norm(const Vec& values, const DiscretizedManifold& grid) {
  if (values.size() != grid.size()) throw std::invalid_argument("weighted_norm: length mismatch");
  return std::sqrt((grid.measure().array() * values.array().abs2()).sum());
}

// sqrt(sum_i w_i |v_i|^2), the L2 norm of the Riemannian (unnormalized) measure
template <class Vec>
double lebesgue_norm(const Vec& values, const DiscretizedManifold& grid) {
  if (values.size() != grid.size()) throw std::invalid_argument("lebesgue_norm: length mismatch");
  return std::sqrt((grid.weights.array() * values.array().abs2()).sum());
}

}  // namespace deepcurves
