#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "certificate.hpp"
#include "discretize.hpp"
#include "errors.hpp"
#include "quadrature.hpp"
#include "skeleton_table.hpp"

namespace deepcurves {

struct SubspaceSpec {
  double eps = 0.0;
  double exponent_a = 0.0;  // (1 - eps)^3 (1 - eps/12)
  double radius = 0.0;      // 6 pi L^{-a/(a+1)}
  std::array<int, 2> max_frequency{};
  std::array<double, 2> length{};

  std::vector<int> frequencies(int c) const {
    std::vector<int> f;
    for (int k = -max_frequency[static_cast<std::size_t>(c)]; k <= max_frequency[static_cast<std::size_t>(c)]; ++k)
      f.push_back(k);
    return f;
  }
  int dimension() const { return 2 * (max_frequency[0] + max_frequency[1]) + 2; }
};

inline double localization_exponent(double eps) { return std::pow(1.0 - eps, 3) * (1.0 - eps / 12.0); }

inline double localization_radius(double eps, int depth) {
  const double a = localization_exponent(eps);
  return 6.0 * pi * std::pow(static_cast<double>(depth), -a / (a + 1.0));
}

// Smallest depth with 6 pi L^{-a/(a+1)} <= bound.
inline double minimum_depth_for_radius(double eps, double bound) {
  const double a = localization_exponent(eps);
  return std::pow(6.0 * pi / bound, (a + 1.0) / a);
}

inline SubspaceSpec subspace_spec(double eps, int depth, std::array<double, 2> length) {
  if (!(eps > 0.0 && eps < 1.0)) throw config_error("subspace: eps must lie in (0, 1)");
  SubspaceSpec s;
  s.eps = eps;
  s.exponent_a = localization_exponent(eps);
  s.radius = localization_radius(eps, depth);
  s.length = length;
  if (s.radius > pi)
    throw config_error("subspace: radius " + std::to_string(s.radius) + " exceeds pi at eps = " + std::to_string(eps) +
                       "; depth must be at least " + std::to_string(minimum_depth_for_radius(eps, pi)));
  for (std::size_t c = 0; c < 2; ++c)
    s.max_frequency[c] = static_cast<int>(std::floor(std::sqrt(eps) * length[c] / (2.0 * pi * s.radius)));
  return s;
}

struct FourierSubspace {
  SubspaceSpec spec;
  Eigen::MatrixXcd basis;  // N x m, orthonormal in the weighted inner product
  std::vector<int> column_component, column_frequency;

  Eigen::VectorXcd coefficients(const Eigen::VectorXcd& v, const Eigen::VectorXd& w) const {
    return basis.adjoint() * w.cwiseProduct(v);
  }
  Eigen::VectorXcd project(const Eigen::VectorXcd& v, const Eigen::VectorXd& w) const {
    return basis * coefficients(v, w);
  }
};

// Exponentials exp(2 pi i k s / len)/sqrt(len) per component, |k| <= K, Gram-orthonormalized on the grid weights.
inline FourierSubspace fourier_subspace(const DiscretizedManifold& grid, double eps, const KernelParams& kp) {
  FourierSubspace fs;
  fs.spec = subspace_spec(eps, kp.depth, grid.length);
  const int N = grid.size();
  for (int c = 0; c < 2; ++c)
    for (int k : fs.spec.frequencies(c)) {
      fs.column_component.push_back(c);
      fs.column_frequency.push_back(k);
    }
  const int m = static_cast<int>(fs.column_component.size());
  fs.basis = Eigen::MatrixXcd::Zero(N, m);
  for (int col = 0; col < m; ++col) {
    const int c = fs.column_component[static_cast<std::size_t>(col)], k = fs.column_frequency[static_cast<std::size_t>(col)];
    const double len = grid.length[static_cast<std::size_t>(c)];
    for (int i = 0; i < N; ++i)
      if (grid.component[static_cast<std::size_t>(i)] == c)
        fs.basis(i, col) = std::polar(1.0 / std::sqrt(len), 2.0 * pi * k * grid.s[i] / len);
  }
  const Eigen::MatrixXcd gram = fs.basis.adjoint() * grid.weights.asDiagonal() * fs.basis;
  Eigen::LLT<Eigen::MatrixXcd> llt(gram);
  if (llt.info() != Eigen::Success) throw numeric_error("fourier_subspace: Gram matrix is not positive definite");
  // B <- B L^{-H}
  fs.basis = llt.matrixU().solve<Eigen::OnTheRight>(fs.basis);
  return fs;
}

// m_k = int_{-r}^{r} psi°(|u|) cos(2 pi k u / len) du for |k| <= K.
inline std::vector<double> invariant_operator_eigs(const SubspaceSpec& spec, const SkeletonTable& table, int c) {
  const double len = spec.length[static_cast<std::size_t>(c)], r = spec.radius;
  if (r > std::min(pi, 0.5 * len))
    throw config_error("invariant_operator_eigs: radius " + std::to_string(r) + " exceeds min(pi, len/2); depth must be at least " +
                       std::to_string(minimum_depth_for_radius(spec.eps, std::min(pi, 0.5 * len))));
  const auto& kp = table.params();
  const double tol = 1e-9 * kp.width * std::log(static_cast<double>(kp.depth));
  std::vector<double> out;
  for (int k : spec.frequencies(c)) {
    const double w = 2.0 * pi * k / len;
    // split at the kernel's width scale so the peak at 0 is resolved
    const double knee = std::min(r, 30.0 * pi / kp.depth);
    auto f = [&](double u) { return table(u) * std::cos(w * u); };
    double v = adaptive_integrate(f, 0.0, knee, 0.5 * tol);
    if (r > knee) v += adaptive_integrate(f, knee, r, 0.5 * tol);
    out.push_back(2.0 * v);
  }
  return out;
}

// Weighted operator of Theta° on a uniform arc-length grid: A_ij ~ int over cell j of psi°(angle(x_i, x)) ds.
// Same-component cells within `band` of the diagonal use product integration of the tabulated
// antiderivative; the rest use the node rule.
inline Eigen::MatrixXd assemble_dc_operator(const DiscretizedManifold& grid, const SkeletonTable& table, int band = 32) {
  if (grid.weighting != Weighting::riemannian)
    throw config_error("assemble_dc_operator: requires the riemannian (uniform arc-length) grid");
  const int N = grid.size(), M = grid.per_component;
  Eigen::MatrixXd A(N, N);
  for (int j = 0; j < N; ++j)
    for (int i = j; i < N; ++i) {
      const double v = table(clamped_angle(grid.points.row(i).transpose(), grid.points.row(j).transpose()));
      A(i, j) = v;
      A(j, i) = v;
    }
  A = A * grid.weights.asDiagonal();
  band = std::min(band, M / 2 - 1);
  for (int i = 0; i < N; ++i) {
    const int c = grid.component[static_cast<std::size_t>(i)], base = c * M, li = i - base;
    const double h = grid.length[static_cast<std::size_t>(c)] / M;
    for (int dj = -band; dj <= band; ++dj) {
      const int j = base + ((li + dj) % M + M) % M;
      if (dj == 0) {
        A(i, j) = 2.0 * table.antiderivative(0.5 * h);
        continue;
      }
      const double d = std::abs(dj) * h;
      const double angle = clamped_angle(grid.points.row(i).transpose(), grid.points.row(j).transpose());
      const double rho = angle / d;
      A(i, j) = (table.antiderivative(rho * (d + 0.5 * h)) - table.antiderivative(rho * (d - 0.5 * h))) / rho;
    }
  }
  return A;
}

struct NeumannResult {
  bool converged = false;  // false: contraction >= 1, no certificate
  std::string diagnostic;
  double contraction = 0.0;
  int terms = 0;
  SubspaceSpec spec;
  std::vector<double> eigenvalues;       // per basis column
  Eigen::VectorXcd coefficients;         // Neumann sum in the basis
  Eigen::VectorXcd direct_coefficients;  // (P Theta° P)^{-1} zeta in the basis
  Eigen::VectorXd values;                // real part of the certificate on the grid
  double norm = 0.0;                     // L2 norm (riemannian measure)
  double projected_residual = 0.0;       // |P_S Theta°[g] - zeta|
  double residual = 0.0;                 // |Theta°[g] - zeta|
  double direct_gap = 0.0;               // |g_neumann - g_direct| / |g_direct| in coefficients
};

// Operator data shared between scales: the tabulated skeleton, the grid, and Theta° as a weighted matrix.
class ConstructivePath {
 public:
  ConstructivePath(DiscretizedManifold grid, std::shared_ptr<const SkeletonTable> table, int band = 32)
      : grid_(std::move(grid)), table_(std::move(table)) {
    op_ = assemble_dc_operator(grid_, *table_, band);
  }
  // synthetic operator (tests)
  ConstructivePath(DiscretizedManifold grid, std::shared_ptr<const SkeletonTable> table, Eigen::MatrixXd op)
      : grid_(std::move(grid)), table_(std::move(table)), op_(std::move(op)) {}

  const DiscretizedManifold& grid() const { return grid_; }
  const SkeletonTable& table() const { return *table_; }
  const Eigen::MatrixXd& dc_operator() const { return op_; }
  double psi_at_pi() const { return table_->psi_at_pi(); }

  FourierSubspace subspace(double eps) const { return fourier_subspace(grid_, eps, table_->params()); }

  std::vector<double> column_eigenvalues(const FourierSubspace& fs) const {
    std::array<std::vector<double>, 2> per;
    for (int c = 0; c < 2; ++c) per[static_cast<std::size_t>(c)] = invariant_operator_eigs(fs.spec, *table_, c);
    std::vector<double> out;
    for (std::size_t col = 0; col < fs.column_component.size(); ++col) {
      const int c = fs.column_component[col];
      const int k = fs.column_frequency[col];
      out.push_back(per[static_cast<std::size_t>(c)][static_cast<std::size_t>(k + fs.spec.max_frequency[static_cast<std::size_t>(c)])]);
    }
    return out;
  }

  // Theta° restricted to S in basis coordinates
  Eigen::MatrixXcd restricted_operator(const FourierSubspace& fs) const {
    const Eigen::MatrixXcd AB = op_.cast<std::complex<double>>() * fs.basis;
    return fs.basis.adjoint() * grid_.weights.asDiagonal() * AB;
  }

  // Theta[h] = Theta°[h] + psi(pi) int h
  Eigen::VectorXd apply_full(const Eigen::VectorXd& h) const {
    return op_ * h + Eigen::VectorXd::Constant(h.size(), psi_at_pi() * grid_.weights.dot(h));
  }

  NeumannResult neumann(const FourierSubspace& fs, const std::vector<double>& eigs, const Eigen::VectorXd& zeta,
                        int max_terms = 200, double tol = 1e-12) const {
    NeumannResult res;
    res.spec = fs.spec;
    res.eigenvalues = eigs;
    const Eigen::VectorXd& w = grid_.weights;
    const Eigen::VectorXcd zc = fs.coefficients(zeta.cast<std::complex<double>>(), w);
    const Eigen::VectorXd outside = zeta - (fs.basis * zc).real();
    const double zeta_norm = lebesgue_norm(zeta, grid_);
    if (lebesgue_norm(outside, grid_) > 1e-8 * std::max(zeta_norm, 1e-300))
      throw std::invalid_argument("neumann: target is not in the low-frequency subspace");

    const int m = static_cast<int>(eigs.size());
    Eigen::VectorXd mdiag(m);
    for (int i = 0; i < m; ++i) mdiag[i] = eigs[static_cast<std::size_t>(i)];
    if ((mdiag.array() <= 0.0).any()) {
      res.diagnostic = "invariant operator has a nonpositive eigenvalue";
      return res;
    }
    const Eigen::MatrixXcd T = restricted_operator(fs);
    Eigen::MatrixXcd R = T;
    R.diagonal() -= mdiag.cast<std::complex<double>>();
    R = mdiag.cwiseInverse().cast<std::complex<double>>().asDiagonal() * R;
    res.contraction = Eigen::JacobiSVD<Eigen::MatrixXcd>(R).singularValues()(0);
    res.direct_coefficients = T.partialPivLu().solve(zc);
    if (res.contraction >= 1.0) {
      res.diagnostic = "Neumann series diverges: contraction " + std::to_string(res.contraction) + " >= 1";
      return res;
    }
    Eigen::VectorXcd term = mdiag.cwiseInverse().cast<std::complex<double>>().cwiseProduct(zc);
    Eigen::VectorXcd sum = term;
    const double scale = std::max(zc.norm(), 1e-300);
    int terms = 1;
    while (terms < max_terms && term.norm() > tol * scale) {
      term = -(R * term);
      sum += term;
      ++terms;
    }
    res.converged = true;
    res.terms = terms;
    res.coefficients = sum;
    res.direct_gap = (sum - res.direct_coefficients).norm() / std::max(res.direct_coefficients.norm(), 1e-300);
    res.values = (fs.basis * sum).real();
    res.norm = lebesgue_norm(res.values, grid_);
    const Eigen::VectorXd image = op_ * res.values;
    const Eigen::VectorXd projected = fs.project(image.cast<std::complex<double>>(), w).real();
    res.projected_residual = lebesgue_norm(Eigen::VectorXd(projected - zeta), grid_);
    res.residual = lebesgue_norm(Eigen::VectorXd(image - zeta), grid_);
    return res;
  }

  NeumannResult neumann(double eps, const Eigen::VectorXd& zeta, int max_terms = 200, double tol = 1e-12) const {
    const auto fs = subspace(eps);
    return neumann(fs, column_eigenvalues(fs), zeta, max_terms, tol);
  }

 private:
  DiscretizedManifold grid_;
  std::shared_ptr<const SkeletonTable> table_;
  Eigen::MatrixXd op_;
};

struct DcDensityResult {
  bool converged = false;
  std::string diagnostic;
  double alpha0 = 0.0;                   // combination weight of the first round
  double constant_mass = 0.0;            // int g_1
  std::vector<double> residual_history;  // |Theta[h] - zeta| after rounds 0..k (riemannian L2)
  std::vector<double> target_history;    // |zeta_(i)|
  int rounds = 0;
  Eigen::VectorXd h;                     // solution of Theta[h] ~ zeta
  Certificate certificate;               // h / rho, for the density-weighted operator
};

// h = g + alpha g_1 with g = g_eps0[zeta], g_1 = g_eps1[1], then iterative refinement on S_eps0.
inline DcDensityResult dc_density_certificate(const ConstructivePath& path, const Eigen::VectorXd& zeta,
                                              double eps0 = 1.0 / 20.0, double eps1 = 51.0 / 100.0,
                                              int refine_steps = 3, int max_terms = 200, double tol = 1e-12) {
  DcDensityResult out;
  const auto& grid = path.grid();
  const auto fs0 = path.subspace(eps0);
  const auto fs1 = path.subspace(eps1);
  const auto eig0 = path.column_eigenvalues(fs0);
  const auto eig1 = path.column_eigenvalues(fs1);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.size());
  const auto g1 = path.neumann(fs1, eig1, ones, max_terms, tol);
  if (!g1.converged) {
    out.diagnostic = "eps1: " + g1.diagnostic;
    return out;
  }
  const double psi_pi = path.psi_at_pi();
  out.constant_mass = grid.weights.dot(g1.values);

  Eigen::VectorXd target = zeta, h = Eigen::VectorXd::Zero(grid.size());
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_h = h;
  for (int i = 0; i <= refine_steps; ++i) {
    out.target_history.push_back(lebesgue_norm(target, grid));
    const auto g = path.neumann(fs0, eig0, target, max_terms, tol);
    if (!g.converged) {
      out.diagnostic = "eps0: " + g.diagnostic;
      return out;
    }
    const double alpha = -psi_pi * grid.weights.dot(g.values) / (psi_pi * out.constant_mass + 1.0);
    if (i == 0) out.alpha0 = alpha;
    const Eigen::VectorXd hi = g.values + alpha * g1.values;
    h += hi;
    const double r = lebesgue_norm(Eigen::VectorXd(path.apply_full(h) - zeta), grid);
    if (r > best) {
      h = best_h;
      break;
    }
    out.residual_history.push_back(r);
    out.rounds = i;
    best = r;
    best_h = h;
    const Eigen::VectorXd step = path.apply_full(hi) - target;
    target = -fs0.project(step.cast<std::complex<double>>(), grid.weights).real();
  }
  out.converged = true;
  out.h = h;
  Certificate& c = out.certificate;
  c.values = h.cwiseQuotient(grid.density);
  c.residual = path.apply_full(h) - zeta;
  c.norm = weighted_norm(c.values, grid);
  c.residual_norm = weighted_norm(c.residual, grid);
  c.method = "dc_density";
  c.rank = fs0.spec.dimension();
  c.tolerance = tol;
  return out;
}

}  // namespace deepcurves
