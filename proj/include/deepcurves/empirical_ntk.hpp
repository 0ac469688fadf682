#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "discretize.hpp"

namespace deepcurves {

// Counter-based normal variates: the value at (seed, stream, index) does not depend on draw order.
class CounterNormal {
 public:
  explicit CounterNormal(std::uint64_t seed) : seed_(seed) {}

  double operator()(std::uint64_t stream, std::uint64_t index) const {
    const std::uint64_t key = mix(seed_ ^ mix(stream + 0x632be59bd9b4e019ULL));
    const double u1 = to_unit(mix(key ^ (2 * index)));
    const double u2 = to_unit(mix(key ^ (2 * index + 1)));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::uint64_t seed_;

  // splitmix64 finalizer
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // (0, 1]
  static double to_unit(std::uint64_t z) { return (static_cast<double>(z >> 11) + 1.0) * 0x1.0p-53; }
};

struct NetworkParams {
  int width = 0, depth = 0, input_dim = 0;
  std::uint64_t seed = 0;
  std::vector<Eigen::MatrixXd> weights;  // W^1 (n x D), W^2..W^L (n x n), W^{L+1} (1 x n)
};

inline Eigen::MatrixXd sample_layer(const CounterNormal& rng, int layer, int rows, int cols, double stddev) {
  Eigen::MatrixXd W(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      W(i, j) = stddev * rng(static_cast<std::uint64_t>(layer), static_cast<std::uint64_t>(i) * cols + j);
  return W;
}

// He initialization: hidden layers N(0, 2/n), output row N(0, 1).
inline NetworkParams init_network(int width, int depth, int input_dim, std::uint64_t seed) {
  if (width < 1 || depth < 1 || input_dim < 1) throw std::invalid_argument("init_network: sizes must be positive");
  NetworkParams net{width, depth, input_dim, seed, {}};
  const CounterNormal rng(seed);
  const double sd = std::sqrt(2.0 / width);
  for (int l = 1; l <= depth; ++l) net.weights.push_back(sample_layer(rng, l, width, l == 1 ? input_dim : width, sd));
  net.weights.push_back(sample_layer(rng, depth + 1, 1, width, 1.0));
  return net;
}

namespace detail {
inline void check_input(const NetworkParams& net, const Eigen::Ref<const Eigen::VectorXd>& x) {
  if (x.size() != net.input_dim) throw std::invalid_argument("network: input dimension mismatch");
  if (net.weights.size() != static_cast<std::size_t>(net.depth) + 1) throw std::invalid_argument("network: malformed weights");
}
}  // namespace detail

// features alpha^0 = x, alpha^l = [W^l alpha^{l-1}]_+
inline std::vector<Eigen::VectorXd> forward_features(const NetworkParams& net, const Eigen::Ref<const Eigen::VectorXd>& x) {
  detail::check_input(net, x);
  std::vector<Eigen::VectorXd> a{x};
  for (int l = 0; l < net.depth; ++l) a.push_back((net.weights[l] * a.back()).cwiseMax(0.0));
  return a;
}

inline double forward(const NetworkParams& net, const Eigen::Ref<const Eigen::VectorXd>& x) {
  return (net.weights.back() * forward_features(net, x).back())(0);
}

// Batched output for the rows of X without materializing the network; matches init_network + forward.
inline Eigen::VectorXd forward_streaming(int width, int depth, std::uint64_t seed, const Eigen::MatrixXd& X) {
  const CounterNormal rng(seed);
  const double sd = std::sqrt(2.0 / width);
  Eigen::MatrixXd A = X.transpose();  // features as columns
  for (int l = 1; l <= depth; ++l) {
    const Eigen::MatrixXd W = sample_layer(rng, l, width, static_cast<int>(A.rows()), sd);
    A = (W * A).cwiseMax(0.0);
  }
  return (sample_layer(rng, depth + 1, 1, width, 1.0) * A).transpose();
}

struct Gradients {
  std::vector<Eigen::VectorXd> forward;   // alpha^0..alpha^L
  std::vector<Eigen::VectorXd> backward;  // beta^0..beta^{L-1}
};

// beta^{l} = (W^{L+1} P^L W^L ... W^{l+2} P^{l+1})^T, support P^l = {i : alpha^l_i > 0}
inline Gradients formal_gradients(const NetworkParams& net, const Eigen::Ref<const Eigen::VectorXd>& x) {
  Gradients g;
  g.forward = forward_features(net, x);
  const int L = net.depth;
  g.backward.resize(static_cast<std::size_t>(L));
  auto support = [&](int l) { return (g.forward[static_cast<std::size_t>(l)].array() > 0.0).cast<double>().matrix(); };
  Eigen::VectorXd b = net.weights[static_cast<std::size_t>(L)].transpose().cwiseProduct(support(L));
  g.backward[static_cast<std::size_t>(L - 1)] = b;
  for (int l = L - 2; l >= 0; --l) {
    b = (net.weights[static_cast<std::size_t>(l + 1)].transpose() * b).cwiseProduct(support(l + 1));
    g.backward[static_cast<std::size_t>(l)] = b;
  }
  return g;
}

// <grad f(x), grad f(x')> with formal gradients: sum_l <beta^{l-1}, beta'^{l-1}><alpha^{l-1}, alpha'^{l-1}> + <alpha^L, alpha'^L>
inline double empirical_ntk(const Gradients& gx, const Gradients& gy) {
  double s = gx.forward.back().dot(gy.forward.back());
  for (std::size_t l = 0; l < gx.backward.size(); ++l) s += gx.backward[l].dot(gy.backward[l]) * gx.forward[l].dot(gy.forward[l]);
  return s;
}

inline double empirical_ntk(const NetworkParams& net, const Eigen::Ref<const Eigen::VectorXd>& x,
                            const Eigen::Ref<const Eigen::VectorXd>& y) {
  return empirical_ntk(formal_gradients(net, x), formal_gradients(net, y));
}

inline Eigen::MatrixXd empirical_ntk_gram(const NetworkParams& net, const Eigen::MatrixXd& X) {
  std::vector<Gradients> g;
  for (int i = 0; i < X.rows(); ++i) g.push_back(formal_gradients(net, X.row(i).transpose()));
  Eigen::MatrixXd G(X.rows(), X.rows());
  for (int i = 0; i < X.rows(); ++i)
    for (int j = 0; j <= i; ++j) G(i, j) = G(j, i) = empirical_ntk(g[static_cast<std::size_t>(i)], g[static_cast<std::size_t>(j)]);
  return G;
}

struct ZetaSample {
  Eigen::VectorXd zeta0;      // f(x_i) - f_star(x_i)
  Eigen::VectorXd piecewise;  // -f_star + int f dmu
  double sup_gap = 0.0;       // max_i |zeta0 - piecewise|
  double l2_gap = 0.0;        // weighted norm of the same difference
};

inline ZetaSample sampled_zeta0(const Eigen::VectorXd& outputs, const DiscretizedManifold& grid) {
  if (outputs.size() != grid.size()) throw std::invalid_argument("sampled_zeta0: size mismatch");
  ZetaSample z;
  z.zeta0 = outputs - grid.labels;
  const double mean = grid.measure().dot(outputs);
  z.piecewise = Eigen::VectorXd::Constant(grid.size(), mean) - grid.labels;
  const Eigen::VectorXd d = z.zeta0 - z.piecewise;
  z.sup_gap = d.cwiseAbs().maxCoeff();
  z.l2_gap = weighted_norm(d, grid);
  return z;
}

inline ZetaSample sampled_zeta0(const NetworkParams& net, const DiscretizedManifold& grid) {
  Eigen::VectorXd out(grid.size());
  for (int i = 0; i < grid.size(); ++i) out[i] = forward(net, grid.points.row(i).transpose());
  return sampled_zeta0(out, grid);
}

}  // namespace deepcurves
