#pragma once

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "discretize.hpp"
#include "errors.hpp"
#include "kernel.hpp"

namespace deepcurves {

struct KernelMatrix {
  Eigen::MatrixXd values;  // Theta (or Theta°) at grid pairs, + block first
  KernelParams params;
  bool dc = false;
};

inline KernelMatrix assemble_kernel(const DiscretizedManifold& grid, const SkeletonEvaluator& psi, bool dc = false) {
  const int N = grid.size();
  KernelMatrix K;
  K.params = psi.params();
  K.dc = dc;
  K.values.resize(N, N);
  const double diag = dc ? psi.dc(0.0) : 0.5 * K.params.width * K.params.depth;
  for (int j = 0; j < N; ++j) {
    K.values(j, j) = diag;
    for (int i = j + 1; i < N; ++i) {
      const double t = clamped_angle(grid.points.row(i).transpose(), grid.points.row(j).transpose());
      const double v = dc ? psi.dc(t) : psi(t);
      K.values(i, j) = v;
      K.values(j, i) = v;
    }
  }
  return K;
}

inline KernelMatrix assemble_kernel(const DiscretizedManifold& grid, const KernelParams& kp, bool dc = false) {
  return assemble_kernel(grid, SkeletonEvaluator(kp), dc);
}

struct Certificate {
  Eigen::VectorXd values;
  double norm = 0.0;
  Eigen::VectorXd residual;  // Theta_mu[g] - zeta
  double residual_norm = 0.0;
  std::string method;
  int rank = 0;
  double tolerance = 0.0;
};

// Theta_mu[g] on the grid: sum_j K_ij w_j rho_j g_j
inline Eigen::VectorXd apply_weighted(const KernelMatrix& K, const DiscretizedManifold& grid, const Eigen::VectorXd& g) {
  return K.values * grid.measure().cwiseProduct(g);
}

inline void finalize(Certificate& c, const KernelMatrix& K, const DiscretizedManifold& grid, const Eigen::VectorXd& zeta) {
  c.norm = weighted_norm(c.values, grid);
  c.residual = apply_weighted(K, grid, c.values) - zeta;
  c.residual_norm = weighted_norm(c.residual, grid);
}

// Least-squares solve of K diag(mu) g = zeta through a truncated SVD.
// rank_tol <= 0 selects machine epsilon times the matrix dimension.
inline Certificate solve_certificate_pinv(const KernelMatrix& K, const DiscretizedManifold& grid,
                                          const Eigen::VectorXd& zeta, double rank_tol = -1.0) {
  const int N = grid.size();
  if (zeta.size() != N || K.values.rows() != N) throw std::invalid_argument("solve_certificate_pinv: size mismatch");
  if (K.values.cwiseAbs().maxCoeff() == 0.0) throw numeric_error("solve_certificate_pinv: kernel matrix is zero");
  if (rank_tol <= 0.0) rank_tol = std::numeric_limits<double>::epsilon() * N;
  const Eigen::MatrixXd A = K.values * grid.measure().asDiagonal();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = rank_tol * sv[0];
  Eigen::VectorXd coeff = svd.matrixU().transpose() * zeta;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv[i] > cutoff) {
      coeff[i] /= sv[i];
      ++rank;
    } else {
      coeff[i] = 0.0;
    }
  }
  Certificate c;
  c.values = svd.matrixV() * coeff;
  c.method = "pinv";
  c.rank = rank;
  c.tolerance = rank_tol;
  finalize(c, K, grid, zeta);
  return c;
}

inline Eigen::VectorXd label_target(const DiscretizedManifold& grid) { return grid.labels; }

}  // namespace deepcurves
