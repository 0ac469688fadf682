#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "builtin.hpp"
#include "certificate.hpp"
#include "curve.hpp"
#include "discretize.hpp"
#include "geometry.hpp"
#include "version.hpp"

namespace deepcurves {

// shortest round-trip representation
inline std::string format_double(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void header(const std::vector<std::string>& cols) { row_strings(cols); }
  template <class... Ts>
  void row(const Ts&... xs) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(xs), first = false), ...);
    os_ << '\n';
  }
  void row_strings(const std::vector<std::string>& xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) os_ << (i ? "," : "") << xs[i];
    os_ << '\n';
  }

 private:
  std::ostream& os_;
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long long v) { return std::to_string(v); }
  static std::string cell(unsigned long long v) { return std::to_string(v); }
  static std::string cell(unsigned long v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }
};

inline void write_curves_csv(std::ostream& os, const TwoCurveInstance& inst) {
  const int D = inst.plus.dimension();
  std::vector<std::string> cols{"component", "t"};
  for (int d = 0; d < D; ++d) cols.push_back("x" + std::to_string(d));
  CsvWriter w(os);
  w.header(cols);
  for (int c = 0; c < 2; ++c) {
    const auto& u = inst.component(c);
    for (int i = 0; i < u.samples(); ++i) {
      std::vector<std::string> r{c == 0 ? "+" : "-", format_double(u.parameter[static_cast<std::size_t>(i)])};
      for (int d = 0; d < D; ++d) r.push_back(format_double(u.points()(i, d)));
      w.row_strings(r);
    }
  }
}

struct CurveSamples {
  Eigen::MatrixXd plus, minus;
};

// Rows of each component are taken as samples uniform in their source parameter.
inline CurveSamples read_curves_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("curves csv: empty input");
  std::vector<std::string> head;
  {
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) head.push_back(tok);
  }
  if (head.size() < 5 || head[0] != "component" || head[1] != "t" || head[2] != "x0")
    throw std::runtime_error("curves csv: expected header component,t,x0,...");
  const int D = static_cast<int>(head.size()) - 2;
  std::array<std::vector<std::vector<double>>, 2> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    int c = tok == "+" ? 0 : tok == "-" ? 1 : -1;
    if (c < 0) throw std::runtime_error("curves csv line " + std::to_string(lineno) + ": component must be + or -");
    std::getline(ss, tok, ',');
    std::vector<double> x;
    while (std::getline(ss, tok, ',')) x.push_back(std::stod(tok));
    if (static_cast<int>(x.size()) != D) throw std::runtime_error("curves csv line " + std::to_string(lineno) + ": wrong column count");
    rows[static_cast<std::size_t>(c)].push_back(std::move(x));
  }
  CurveSamples out;
  for (int c = 0; c < 2; ++c) {
    auto& r = rows[static_cast<std::size_t>(c)];
    Eigen::MatrixXd m(static_cast<int>(r.size()), D);
    for (std::size_t i = 0; i < r.size(); ++i)
      for (int d = 0; d < D; ++d) m(static_cast<int>(i), d) = r[i][static_cast<std::size_t>(d)];
    (c == 0 ? out.plus : out.minus) = m;
  }
  return out;
}

// Instance from sampled curves; derivatives come from the trigonometric interpolant.
inline TwoCurveInstance instance_from_samples(const CurveSamples& cs, int samples, std::string name = "samples") {
  TwoCurveInstance inst;
  inst.name = std::move(name);
  inst.plus_source = trigonometric_interpolant(cs.plus);
  inst.minus_source = trigonometric_interpolant(cs.minus);
  inst.plus = arclength_reparameterize(inst.plus_source, samples);
  inst.minus = arclength_reparameterize(inst.minus_source, samples);
  inst.rho_min = 0.5 / std::max(inst.plus.length, inst.minus.length);
  inst.rho_max = 0.5 / std::min(inst.plus.length, inst.minus.length);
  validate_instance(inst);
  return inst;
}

inline nlohmann::ordered_json to_json(const GeometryReport& r) {
  nlohmann::ordered_json j;
  j["name"] = r.name;
  j["len"] = r.length;
  j["len_plus"] = r.length_plus;
  j["len_minus"] = r.length_minus;
  for (int i = 1; i <= 5; ++i) j["M" + std::to_string(i)] = r.bounds.sup_norm[static_cast<std::size_t>(i)];
  j["kappa"] = r.bounds.kappa;
  j["kappa_hat"] = r.bounds.kappa_hat;
  j["eps"] = r.eps;
  j["delta"] = r.delta;
  j["delta_eps"] = r.injectivity.value;
  j["delta_eps_cap"] = r.injectivity.cap;
  j["grid_spacing"] = r.injectivity.grid_spacing;
  j["clover"] = r.clover;
  j["min_cross_angle"] = r.min_cross_angle;
  j["samples_per_curve"] = r.samples_per_curve;
  return j;
}

inline void write_certificate_csv(std::ostream& os, const DiscretizedManifold& grid, const Eigen::VectorXd& g,
                                  const Eigen::VectorXd& zeta, const Eigen::VectorXd& residual) {
  CsvWriter w(os);
  w.header({"component", "t", "s", "g", "zeta", "residual"});
  for (int i = 0; i < grid.size(); ++i)
    w.row(std::string(grid.component[static_cast<std::size_t>(i)] == 0 ? "+" : "-"), grid.t[i], grid.s[i], g[i], zeta[i],
          residual[i]);
}

}  // namespace deepcurves
