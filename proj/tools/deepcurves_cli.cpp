// deepcurves: experiment runner over the header-only library.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <deepcurves/builtin.hpp>
#include <deepcurves/certificate.hpp>
#include <deepcurves/config.hpp>
#include <deepcurves/constructive.hpp>
#include <deepcurves/discretize.hpp>
#include <deepcurves/dynamics.hpp>
#include <deepcurves/empirical_ntk.hpp>
#include <deepcurves/geometry.hpp>
#include <deepcurves/io.hpp>
#include <deepcurves/kernel.hpp>
#include <deepcurves/skeleton_table.hpp>
#include <deepcurves/version.hpp>

namespace fs = std::filesystem;
using namespace deepcurves;
using json = nlohmann::ordered_json;

namespace {

class Output {
 public:
  Output(const ExperimentConfig& cfg, std::string subcommand) : cfg_(cfg), sub_(std::move(subcommand)) {
    fs::create_directories(cfg.out);
  }

  // writes `name` and its sidecar `name.meta.json`
  void write(const std::string& name, const std::string& body, const json& extra = json::object()) const {
    const fs::path p = fs::path(cfg_.out) / name;
    std::ofstream(p, std::ios::binary) << body;
    json meta;
    meta["file"] = name;
    meta["subcommand"] = sub_;
    meta["library_version"] = kVersion;
    meta["config"] = cfg_.to_json();
    if (!extra.empty()) meta["notes"] = extra;
    std::ofstream(fs::path(cfg_.out) / (name + ".meta.json"), std::ios::binary) << meta.dump(2) << '\n';
    std::cout << "wrote " << p.string() << '\n';
  }

 private:
  const ExperimentConfig& cfg_;
  std::string sub_;
};

BuiltinOptions builtin_options(const ExperimentConfig& cfg) {
  BuiltinOptions o;
  o.separation = cfg.separation;
  o.scale = cfg.scale;
  o.gap = cfg.gap;
  o.polar = cfg.polar;
  o.samples = cfg.curve_samples;
  o.density = cfg.density == "parameter_uniform" ? DensityMode::parameter_uniform : DensityMode::riemannian_uniform;
  return o;
}

TwoCurveInstance make_instance(const ExperimentConfig& cfg, const std::string& fallback) {
  if (!cfg.curves_csv.empty()) {
    std::ifstream is(cfg.curves_csv);
    if (!is) throw config_error("key 'curves_csv': cannot open " + cfg.curves_csv);
    return instance_from_samples(read_curves_csv(is), cfg.curve_samples, fs::path(cfg.curves_csv).stem().string());
  }
  const std::string name = cfg.geometry.empty() ? fallback : cfg.geometry;
  const auto& names = builtin_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    std::string list;
    for (const auto& n : names) list += (list.empty() ? "" : ", ") + n;
    throw config_error("key 'geometry': unknown geometry '" + name + "' (expected one of " + list + ")");
  }
  return builtin_geometry(name, builtin_options(cfg));
}

Weighting weighting_of(const ExperimentConfig& cfg) {
  return cfg.weighting == "riemannian" ? Weighting::riemannian : Weighting::paper_uniform_t;
}

KernelParams kernel_params(const ExperimentConfig& cfg) { return KernelParams{cfg.L, cfg.n}; }

// Certificate target: f_star - f_theta, i.e. the labels when the network term is dropped.
Eigen::VectorXd certificate_target(const ExperimentConfig& cfg, const DiscretizedManifold& grid) {
  if (cfg.zeta0 == "labels") return grid.labels;
  const auto net = init_network(cfg.network_width, cfg.L, static_cast<int>(grid.points.cols()), cfg.seed);
  return -sampled_zeta0(net, grid).zeta0;
}

std::string geometry_csv(const TwoCurveInstance& inst) {
  std::ostringstream os;
  write_curves_csv(os, inst);
  return os.str();
}

json summary_json(const ExperimentConfig& cfg, const DiscretizedManifold& grid, const GeometryReport& rep) {
  json s;
  s["L"] = cfg.L;
  s["n"] = cfg.n;
  s["M"] = cfg.M;
  s["mode"] = to_string(grid.weighting);
  s["dc"] = cfg.dc;
  s["geometry"] = rep.name;
  s["clover"] = rep.clover;
  s["delta_eps"] = rep.injectivity.value;
  s["kappa"] = rep.bounds.kappa;
  return s;
}

std::string certificate_csv(const DiscretizedManifold& grid, const Eigen::VectorXd& g, const Eigen::VectorXd& zeta,
                            const Eigen::VectorXd& residual) {
  std::ostringstream os;
  write_certificate_csv(os, grid, g, zeta, residual);
  return os.str();
}

int run_geometry(const ExperimentConfig& cfg) {
  Output out(cfg, "geometry");
  const auto inst = make_instance(cfg, "two_circles");
  const auto rep = geometry_report(inst, cfg.eps, cfg.delta);
  out.write("geometry.json", to_json(rep).dump(2) + "\n");
  out.write("curves.csv", geometry_csv(inst));
  std::cout << "clover " << rep.clover << " delta_eps " << format_double(rep.injectivity.value) << " kappa "
            << format_double(rep.bounds.kappa) << '\n';
  return 0;
}

int run_kernel_table(const ExperimentConfig& cfg) {
  Output out(cfg, "kernel-table");
  const auto tab = SkeletonTable::build(kernel_params(cfg), cfg.table_knots);
  std::ostringstream os;
  CsvWriter w(os);
  w.header({"t", "psi", "psi_dc", "dpsi"});
  for (std::size_t i = 0; i < tab.knots().size(); ++i) {
    const double t = tab.knots()[i];
    w.row(t, tab.values()[i] + tab.psi_at_pi(), tab.values()[i], tab.derivative(t));
  }
  json notes;
  notes["psi_at_pi"] = tab.psi_at_pi();
  notes["max_midpoint_error"] = tab.max_midpoint_error();
  out.write("kernel_table.csv", os.str(), notes);
  std::cout << "psi(pi) " << format_double(tab.psi_at_pi()) << " midpoint error "
            << format_double(tab.max_midpoint_error()) << '\n';
  return 0;
}

// constructive path: Neumann series on S_eps, optionally combined with the DC/density step
int run_constructive(const ExperimentConfig& cfg, const std::string& subcommand) {
  if (cfg.weighting != "riemannian") throw config_error("key 'weighting': the constructive path needs weighting=riemannian");
  Output out(cfg, subcommand);
  const auto inst = make_instance(cfg, "two_circles");
  const auto rep = geometry_report(inst, cfg.eps, cfg.delta);
  auto grid = discretize(inst, cfg.M, Weighting::riemannian);
  const auto kp = kernel_params(cfg);
  const double r = localization_radius(cfg.eps, cfg.L);
  if (r > pi)
    throw config_error("key 'L': localization radius exceeds pi; need L >= " +
                       std::to_string(static_cast<long long>(std::ceil(minimum_depth_for_radius(cfg.eps, pi)))));
  auto table = std::make_shared<const SkeletonTable>(SkeletonTable::build(kp, cfg.table_knots));
  ConstructivePath path(grid, table, cfg.band);
  auto fsub = path.subspace(cfg.eps);
  // only the S_eps part of the target can be matched
  const Eigen::VectorXd zeta = fsub.project(certificate_target(cfg, grid).cast<std::complex<double>>(), grid.weights).real();
  json s = summary_json(cfg, grid, rep);
  s["solver"] = cfg.solver;
  s["eps"] = cfg.eps;

  if (cfg.solver == "dc_density") {
    const auto res = dc_density_certificate(path, zeta, cfg.eps, cfg.eps1, cfg.refine_steps, cfg.max_terms, cfg.tol);
    s["converged"] = res.converged;
    if (!res.converged) {
      s["diagnostic"] = res.diagnostic;
      out.write("summary.json", s.dump(2) + "\n");
      std::cerr << "numeric failure: " << res.diagnostic << '\n';
      return 3;
    }
    s["cert_norm"] = res.certificate.norm;
    s["residual_norm"] = res.certificate.residual_norm;
    s["contraction"] = nullptr;
    s["alpha0"] = res.alpha0;
    s["constant_mass"] = res.constant_mass;
    s["residual_history"] = res.residual_history;
    s["target_history"] = res.target_history;
    out.write("certificate.csv", certificate_csv(grid, res.certificate.values, zeta, res.certificate.residual));
    out.write("summary.json", s.dump(2) + "\n");
    std::cout << "dc_density residual " << format_double(res.certificate.residual_norm) << '\n';
    return 0;
  }

  const auto res = path.neumann(fsub, path.column_eigenvalues(fsub), zeta, cfg.max_terms, cfg.tol);
  s["contraction"] = res.contraction;
  s["converged"] = res.converged;
  s["subspace_dimension"] = res.spec.dimension();
  s["radius"] = res.spec.radius;
  if (!res.converged) {
    s["diagnostic"] = res.diagnostic;
    out.write("summary.json", s.dump(2) + "\n");
    std::cerr << "numeric failure: " << res.diagnostic << '\n';
    return 3;
  }
  const Eigen::VectorXd residual = path.dc_operator() * res.values - zeta;
  s["cert_norm"] = res.norm;
  s["residual_norm"] = res.residual;
  s["projected_residual_norm"] = res.projected_residual;
  s["terms"] = res.terms;
  s["direct_gap"] = res.direct_gap;
  json notes;
  notes["measure"] = "Lebesgue arc-length measure; operator is the DC-subtracted kernel";
  out.write("certificate.csv", certificate_csv(grid, res.values, zeta, residual), notes);
  out.write("summary.json", s.dump(2) + "\n", notes);
  std::cout << "contraction " << format_double(res.contraction) << " norm " << format_double(res.norm) << '\n';
  return 0;
}

int run_certificate(const ExperimentConfig& cfg) {
  if (cfg.solver != "pinv") return run_constructive(cfg, "certificate");
  Output out(cfg, "certificate");
  const auto inst = make_instance(cfg, "two_circles");
  const auto rep = geometry_report(inst, cfg.eps, cfg.delta);
  const auto grid = discretize(inst, cfg.M, weighting_of(cfg));
  const SkeletonEvaluator psi(kernel_params(cfg), cfg.table_knots);
  const auto K = assemble_kernel(grid, psi, cfg.dc);
  const Eigen::VectorXd zeta = certificate_target(cfg, grid);
  const auto cert = solve_certificate_pinv(K, grid, zeta, cfg.rank_tol);
  json s = summary_json(cfg, grid, rep);
  s["solver"] = "pinv";
  s["cert_norm"] = cert.norm;
  s["residual_norm"] = cert.residual_norm;
  s["contraction"] = nullptr;
  s["rank"] = cert.rank;
  s["max_abs_g"] = cert.values.cwiseAbs().maxCoeff();
  out.write("certificate.csv", certificate_csv(grid, cert.values, zeta, cert.residual));
  out.write("summary.json", s.dump(2) + "\n");
  std::cout << "cert_norm " << format_double(cert.norm) << " residual " << format_double(cert.residual_norm) << '\n';
  return 0;
}

int run_dynamics(const ExperimentConfig& cfg) {
  Output out(cfg, "dynamics");
  const auto inst = make_instance(cfg, "two_circles");
  const auto grid = discretize(inst, cfg.M, weighting_of(cfg));
  const SkeletonEvaluator psi(kernel_params(cfg), cfg.table_knots);
  const auto K = assemble_kernel(grid, psi, cfg.dc);
  const NominalDynamics dyn(K, grid);
  Eigen::VectorXd zeta0 = -grid.labels;
  if (cfg.zeta0 == "network")
    zeta0 = sampled_zeta0(init_network(cfg.network_width, cfg.L, static_cast<int>(grid.points.cols()), cfg.seed), grid).zeta0;
  DynamicsConfig dc;
  dc.step = cfg.tau > 0.0 ? cfg.tau : 0.5 / dyn.lambda_max();
  dc.iterations = cfg.iterations;
  const auto tr = dyn.evolve(zeta0, grid.labels, dc, grid);
  std::ostringstream os;
  CsvWriter w(os);
  w.header({"iter", "error_norm", "margin", "separated"});
  int first = -1;
  for (std::size_t k = 0; k < tr.error_norm.size(); ++k) {
    w.row(static_cast<int>(k), tr.error_norm[k], tr.margin[k], static_cast<int>(tr.separated[k]));
    if (first < 0 && tr.separated[k]) first = static_cast<int>(k);
  }
  json notes;
  notes["dynamics"] = "nominal infinite-width error recursion; f_k = f_star + zeta_k";
  notes["tau"] = dc.step;
  notes["lambda_max"] = tr.lambda_max;
  notes["first_separated_iteration"] = first;
  out.write("dynamics.csv", os.str(), notes);
  std::cout << "lambda_max " << format_double(tr.lambda_max) << " first separated " << first << '\n';
  return 0;
}

Eigen::MatrixXd ntk_grid(int points, int dim) {
  // quarter great circle in the first two coordinates
  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(points, dim);
  for (int k = 0; k < points; ++k) {
    const double th = k * (pi / 2) / (points - 1);
    X(k, 0) = std::cos(th);
    X(k, 1) = std::sin(th);
  }
  return X;
}

int run_ntk_compare(const ExperimentConfig& cfg) {
  Output out(cfg, "ntk-compare");
  const Eigen::MatrixXd X = ntk_grid(cfg.ntk_points, cfg.ntk_dim);
  std::ostringstream os;
  CsvWriter w(os);
  w.header({"n", "seed", "sup_rel_err"});
  for (int width : cfg.ntk_widths) {
    const KernelParams kp{std::max(cfg.ntk_depth, 2), static_cast<double>(width)};
    if (cfg.ntk_depth < 2) throw config_error("key 'ntk_depth': analytic kernel needs depth >= 2");
    Eigen::MatrixXd theta(X.rows(), X.rows());
    for (int i = 0; i < X.rows(); ++i)
      for (int j = 0; j < X.rows(); ++j) theta(i, j) = ntk(X.row(i).transpose(), X.row(j).transpose(), kp);
    for (int s = 0; s < cfg.ntk_seeds; ++s) {
      const std::uint64_t seed = cfg.seed + static_cast<std::uint64_t>(s);
      const auto net = init_network(width, cfg.ntk_depth, cfg.ntk_dim, seed);
      const Eigen::MatrixXd G = empirical_ntk_gram(net, X);
      const double err = (G - theta).cwiseAbs().maxCoeff() / theta(0, 0);
      w.row(width, static_cast<unsigned long long>(seed), err);
    }
  }
  out.write("ntk_compare.csv", os.str());
  return 0;
}

int run_clover_sweep(const ExperimentConfig& cfg) {
  Output out(cfg, "clover-sweep");
  const SkeletonEvaluator psi(kernel_params(cfg), cfg.table_knots);
  std::ostringstream sweep, certs;
  CsvWriter ws(sweep), wc(certs);
  ws.header({"k", "clover", "cert_norm", "residual_norm", "max_abs_g", "len"});
  wc.header({"k", "component", "t", "s", "g"});
  for (int k = 4; k >= 1; --k) {
    ExperimentConfig c = cfg;
    c.geometry = "clover" + std::to_string(k);
    c.curves_csv.clear();
    const auto inst = make_instance(c, c.geometry);
    const int clover = clover_number(inst, cfg.eps, cfg.delta);
    const auto grid = discretize(inst, cfg.M, weighting_of(cfg));
    const auto K = assemble_kernel(grid, psi, cfg.dc);
    const auto cert = solve_certificate_pinv(K, grid, grid.labels, cfg.rank_tol);
    ws.row(k, clover, cert.norm, cert.residual_norm, cert.values.cwiseAbs().maxCoeff(), inst.length());
    for (int i = 0; i < grid.size(); ++i)
      wc.row(k, std::string(grid.component[static_cast<std::size_t>(i)] == 0 ? "+" : "-"), grid.t[i], grid.s[i],
             cert.values[i]);
    std::cout << "clover" << k << ": clover number " << clover << " cert_norm " << format_double(cert.norm) << '\n';
  }
  out.write("clover_sweep.csv", sweep.str());
  out.write("clover_certificates.csv", certs.str());
  return 0;
}

int run_depth_sweep(const ExperimentConfig& cfg) {
  Output out(cfg, "depth-sweep");
  const auto inst = make_instance(cfg, "fig1_like");
  const auto grid = discretize(inst, cfg.M, weighting_of(cfg));
  std::ostringstream sweep, certs;
  CsvWriter ws(sweep), wc(certs);
  ws.header({"L", "max_abs_g", "cert_norm", "residual_norm"});
  wc.header({"L", "component", "t", "s", "g"});
  for (int L : cfg.depths) {
    const SkeletonEvaluator psi(KernelParams{L, cfg.n}, cfg.table_knots);
    const auto K = assemble_kernel(grid, psi, cfg.dc);
    const auto cert = solve_certificate_pinv(K, grid, grid.labels, cfg.rank_tol);
    const double gmax = cert.values.cwiseAbs().maxCoeff();
    ws.row(L, gmax, cert.norm, cert.residual_norm);
    for (int i = 0; i < grid.size(); ++i)
      wc.row(L, std::string(grid.component[static_cast<std::size_t>(i)] == 0 ? "+" : "-"), grid.t[i], grid.s[i],
             cert.values[i]);
    std::cout << "L " << L << " max|g| " << format_double(gmax) << '\n';
  }
  out.write("depth_sweep.csv", sweep.str());
  out.write("depth_certificates.csv", certs.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deepcurves: deep NTK certificates on two-curve problems"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string config_path, out_dir;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "flat key=value config file");
  app.add_option("--out", out_dir, "output directory");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");
  app.add_option("--set", overrides, "override key=value (repeatable)")->take_all();
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> subs = {
      {"geometry", "sample the two curves and report curvature, separation and clover number"},
      {"kernel-table", "tabulate the normalized skeleton and its derivative"},
      {"certificate", "solve for a certificate on the discretized curves"},
      {"neumann", "constructive certificate by the Neumann series or DC plus density refinement"},
      {"dynamics", "kernel gradient descent on the sampled error"},
      {"ntk-compare", "empirical NTK of random ReLU networks against the limiting kernel"},
      {"clover-sweep", "certificates for the four clover configurations"},
      {"depth-sweep", "certificate magnitude across depths"}};
  for (const auto& [name, desc] : subs) app.add_subcommand(name, desc)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string sub = app.get_subcommands().front()->get_name();

  ExperimentConfig cfg;
  try {
    if (!config_path.empty()) {
      std::ifstream is(config_path);
      if (!is) throw config_error("cannot open config file " + config_path);
      cfg.parse(is, config_path);
    }
    for (const auto& kv : overrides) cfg.apply_override(kv);
    if (*seed_opt) cfg.seed = seed;
    if (!out_dir.empty()) cfg.out = out_dir;
    cfg.resolve_defaults(sub);
    if (sub == "neumann" && cfg.solver == "pinv") throw config_error("key 'solver': neumann needs solver=neumann or dc_density");
    cfg.validate();
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (sub == "geometry") return run_geometry(cfg);
    if (sub == "kernel-table") return run_kernel_table(cfg);
    if (sub == "certificate") return run_certificate(cfg);
    if (sub == "neumann") return run_constructive(cfg, "neumann");
    if (sub == "dynamics") return run_dynamics(cfg);
    if (sub == "ntk-compare") return run_ntk_compare(cfg);
    if (sub == "clover-sweep") return run_clover_sweep(cfg);
    if (sub == "depth-sweep") return run_depth_sweep(cfg);
  } catch (const config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const resolution_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 3;
  }
  return 2;
}
