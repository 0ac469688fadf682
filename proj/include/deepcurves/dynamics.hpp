#pragma once

#include <cfloat>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "certificate.hpp"
#include "discretize.hpp"
#include "errors.hpp"

namespace deepcurves {

struct Separation {
  bool separated = false;
  double margin = 0.0;  // min_i label_i f_i
};

inline Separation separation_check(const Eigen::VectorXd& f, const Eigen::VectorXd& labels) {
  if (f.size() != labels.size()) throw std::invalid_argument("separation_check: length mismatch");
  const Eigen::VectorXd m = labels.cwiseProduct(f);
  Separation s;
  s.margin = m.size() ? m.minCoeff() : 0.0;
  s.separated = s.margin > 0.0;
  return s;
}

enum class EvolveMethod { eigen, explicit_iteration };

struct DynamicsConfig {
  double step = 0.0;  // tau
  int iterations = 0;
  bool monotone = true;  // reject steps at or above 2/lambda_max
  EvolveMethod method = EvolveMethod::eigen;
};

struct Trajectory {
  std::vector<double> error_norm;  // weighted norm of zeta_k, k = 0..iterations
  std::vector<double> margin;      // of f_k = f_star + zeta_k
  std::vector<char> separated;
  Eigen::VectorXd final_error;
  double lambda_max = 0.0;
};

// Spectrum of the weighted operator K diag(mu) through the similar symmetric matrix D^{1/2} K D^{1/2}.
class NominalDynamics {
 public:
  NominalDynamics(const KernelMatrix& K, const DiscretizedManifold& grid) : K_(K.values), mu_(grid.measure()) {
    const Eigen::VectorXd r = mu_.cwiseSqrt();
    const Eigen::MatrixXd S = r.asDiagonal() * K_ * r.asDiagonal();
    eig_.compute(S);
    if (eig_.info() != Eigen::Success) throw numeric_error("nominal dynamics: eigendecomposition failed");
  }

  double lambda_max() const { return eig_.eigenvalues().maxCoeff(); }
  const Eigen::VectorXd& eigenvalues() const { return eig_.eigenvalues(); }
  // eigenvectors of K diag(mu), columns D^{-1/2} v_i
  Eigen::MatrixXd eigenvectors() const { return mu_.cwiseSqrt().cwiseInverse().asDiagonal() * eig_.eigenvectors(); }

  Eigen::VectorXd step(const Eigen::VectorXd& z, double tau) const { return z - tau * (K_ * mu_.cwiseProduct(z)); }

  // (Id - tau K D)^k z
  Eigen::VectorXd power(const Eigen::VectorXd& z, double tau, int k) const {
    const Eigen::VectorXd r = mu_.cwiseSqrt();
    Eigen::VectorXd c = eig_.eigenvectors().transpose() * r.cwiseProduct(z);
    for (int i = 0; i < c.size(); ++i) c[i] *= std::pow(1.0 - tau * eig_.eigenvalues()[i], k);
    return (eig_.eigenvectors() * c).cwiseQuotient(r);
  }

  Trajectory evolve(const Eigen::VectorXd& zeta0, const Eigen::VectorXd& target, const DynamicsConfig& cfg,
                    const DiscretizedManifold& grid) const {
    if (zeta0.size() != K_.rows()) throw std::invalid_argument("nominal_evolve: size mismatch");
    if (cfg.step < 0.0 || cfg.iterations < 0) throw config_error("nominal_evolve: step and iteration count must be nonnegative");
    Trajectory tr;
    tr.lambda_max = lambda_max();
    if (cfg.monotone && cfg.step * tr.lambda_max >= 2.0)
      throw config_error("nominal_evolve: step " + std::to_string(cfg.step) + " >= 2/lambda_max = " +
                         std::to_string(2.0 / tr.lambda_max));
    auto record = [&](const Eigen::VectorXd& z) {
      tr.error_norm.push_back(weighted_norm(z, grid));
      const auto sep = separation_check(target + z, target);
      tr.margin.push_back(sep.margin);
      tr.separated.push_back(sep.separated ? 1 : 0);
    };
    Eigen::VectorXd z = zeta0;
    record(z);
    if (cfg.method == EvolveMethod::explicit_iteration) {
      for (int k = 1; k <= cfg.iterations; ++k) {
        z = step(z, cfg.step);
        record(z);
      }
    } else {
      // modal coordinates, multiplied by (1 - tau lambda) once per iteration
      const Eigen::VectorXd r = mu_.cwiseSqrt();
      Eigen::VectorXd c = eig_.eigenvectors().transpose() * r.cwiseProduct(zeta0);
      const Eigen::ArrayXd factor = 1.0 - cfg.step * eig_.eigenvalues().array();
      for (int k = 1; k <= cfg.iterations; ++k) {
        c.array() *= factor;
        z = (eig_.eigenvectors() * c).cwiseQuotient(r);
        record(z);
      }
    }
    tr.final_error = z;
    return tr;
  }

 private:
  Eigen::MatrixXd K_;
  Eigen::VectorXd mu_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig_;
};

inline Trajectory nominal_evolve(const DiscretizedManifold& grid, const KernelMatrix& K, const Eigen::VectorXd& zeta0,
                                 const DynamicsConfig& cfg) {
  return NominalDynamics(K, grid).evolve(zeta0, grid.labels, cfg, grid);
}

// floor(L^{39/44} / (n tau))
inline long long theorem_schedule(double depth, double width, double tau) {
  if (!(depth > 0.0 && width > 0.0 && tau > 0.0)) throw config_error("theorem_schedule: arguments must be positive");
  const long double v = std::pow(static_cast<long double>(depth), 39.0L / 44.0L) /
                        (static_cast<long double>(width) * static_cast<long double>(tau));
  // tau and n arrive as doubles parsed from decimals (0.1 is slightly above 1/10), so values within a few
  // double ulps below an integer count as that integer
  return static_cast<long long>(std::floor(v * (1.0L + 8.0L * DBL_EPSILON)));
}

}  // namespace deepcurves
