#pragma once

#include <charconv>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"

namespace deepcurves {

struct ExperimentConfig {
  // geometry; empty name picks the subcommand default
  std::string geometry;
  std::string curves_csv;
  double separation = 0.05;
  double scale = 0.01;
  double gap = 0.3;
  double polar = 0.4;
  int curve_samples = 2048;
  std::string density = "riemannian_uniform";

  // kernel and grid
  int L = 50;
  double n = 2.0;
  int M = 200;
  std::string weighting;  // empty: subcommand default
  bool dc = false;
  int table_knots = 4096;

  // scales
  double eps = 0.05;
  double delta = 0.95;
  double eps1 = 0.51;

  // solvers
  std::string solver;  // empty: subcommand default
  double rank_tol = -1.0;
  int refine_steps = 3;
  int max_terms = 200;
  double tol = 1e-10;
  int band = 32;

  // dynamics
  double tau = 0.0;  // 0: 1/(2 lambda_max)
  int iterations = 1000;
  std::string zeta0 = "labels";
  int network_width = 256;

  // empirical NTK
  std::vector<int> ntk_widths{128, 512, 2048};
  int ntk_seeds = 10;
  int ntk_depth = 4;
  int ntk_dim = 4;
  int ntk_points = 16;

  // depth sweep
  std::vector<int> depths{10, 25, 50, 100};

  std::uint64_t seed = 0;
  std::string out = ".";

  // Fills keys whose default depends on the subcommand.
  void resolve_defaults(const std::string& subcommand) {
    const bool constructive = subcommand == "neumann";
    if (geometry.empty()) geometry = subcommand == "depth-sweep" ? "fig1_like" : "two_circles";
    if (solver.empty()) solver = constructive ? "neumann" : "pinv";
    if (weighting.empty()) weighting = solver == "pinv" ? "paper_uniform_t" : "riemannian";
  }

  // Sets one key; `where` prefixes diagnostics.
  void set(const std::string& key, const std::string& value, const std::string& where = "--set") {
    auto& tab = table();
    auto it = tab.find(key);
    if (it == tab.end()) throw config_error(where + ": unknown key '" + key + "'");
    try {
      it->second(*this, value);
    } catch (const config_error& e) {
      throw config_error(where + ": key '" + key + "': " + e.what());
    }
  }

  void parse(std::istream& is, const std::string& source) {
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      const std::string where = source + ":" + std::to_string(lineno);
      if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
      line = trim(line);
      if (line.empty()) continue;
      auto eq = line.find('=');
      if (eq == std::string::npos) throw config_error(where + ": expected key=value");
      set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
    }
  }

  void apply_override(const std::string& kv) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) throw config_error("--set " + kv + ": expected key=value");
    set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)), "--set");
  }

  void validate() const {
    auto req = [](bool ok, const char* key, const std::string& msg) {
      if (!ok) throw config_error(std::string("key '") + key + "': " + msg);
    };
    req(L >= 2, "L", "depth must be >= 2");
    req(n > 0.0, "n", "width must be positive");
    req(M >= 16, "M", "need at least 16 points per curve");
    req(curve_samples >= 64, "curve_samples", "need at least 64 samples per curve");
    req(eps > 0.0 && eps < 1.0, "eps", "must lie in (0, 1)");
    req(delta > 0.0 && delta <= 1.0 - eps, "delta", "must lie in (0, 1 - eps]");
    req(eps1 > 0.0 && eps1 < 1.0, "eps1", "must lie in (0, 1)");
    req(scale > 0.0, "scale", "must be positive");
    req(separation > 0.0, "separation", "must be positive");
    req(gap > 0.0 && polar > 0.0 && polar + gap < 1.5707963267948966, "gap",
        "circles need 0 < polar < polar + gap < pi/2");
    req(table_knots >= 64, "table_knots", "need at least 64 knots");
    req(refine_steps >= 0, "refine_steps", "must be nonnegative");
    req(max_terms >= 1, "max_terms", "must be positive");
    req(tol > 0.0, "tol", "must be positive");
    req(band >= 1, "band", "must be positive");
    req(tau >= 0.0, "tau", "must be nonnegative");
    req(iterations >= 0, "iterations", "must be nonnegative");
    req(network_width >= 1, "network_width", "must be positive");
    req(!ntk_widths.empty(), "ntk_widths", "empty list");
    for (int w : ntk_widths) req(w >= 1, "ntk_widths", "widths must be positive");
    req(ntk_seeds >= 1, "ntk_seeds", "must be positive");
    req(ntk_depth >= 1, "ntk_depth", "must be positive");
    req(ntk_dim >= 2, "ntk_dim", "must be >= 2");
    req(ntk_points >= 2, "ntk_points", "must be >= 2");
    req(!depths.empty(), "depths", "empty list");
    for (int d : depths) req(d >= 2, "depths", "depths must be >= 2");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    for (const auto& [k, get] : getters()) j[k] = get(*this);
    return j;
  }

  static std::vector<std::string> keys() {
    std::vector<std::string> out;
    for (const auto& kv : table()) out.push_back(kv.first);
    return out;
  }

 private:
  using Setter = std::function<void(ExperimentConfig&, const std::string&)>;
  using Getter = std::function<nlohmann::ordered_json(const ExperimentConfig&)>;

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  }

  template <class T>
  static T number(const std::string& v) {
    T x{};
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || v.empty()) throw config_error("cannot parse '" + v + "' as a number");
    return x;
  }
  static bool boolean(const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw config_error("expected true or false, got '" + v + "'");
  }
  static std::string choice(const std::string& v, std::initializer_list<const char*> allowed) {
    std::string list;
    for (const char* a : allowed) {
      if (v == a) return v;
      list += std::string(list.empty() ? "" : "|") + a;
    }
    throw config_error("expected one of " + list + ", got '" + v + "'");
  }
  static std::vector<int> int_list(const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(number<int>(trim(tok)));
    return out;
  }

  static const std::map<std::string, Setter>& table() {
    static const std::map<std::string, Setter> t = {
        {"geometry", [](auto& c, const auto& v) { c.geometry = v; }},
        {"curves_csv", [](auto& c, const auto& v) { c.curves_csv = v; }},
        {"separation", [](auto& c, const auto& v) { c.separation = number<double>(v); }},
        {"scale", [](auto& c, const auto& v) { c.scale = number<double>(v); }},
        {"gap", [](auto& c, const auto& v) { c.gap = number<double>(v); }},
        {"polar", [](auto& c, const auto& v) { c.polar = number<double>(v); }},
        {"curve_samples", [](auto& c, const auto& v) { c.curve_samples = number<int>(v); }},
        {"density", [](auto& c, const auto& v) { c.density = choice(v, {"riemannian_uniform", "parameter_uniform"}); }},
        {"L", [](auto& c, const auto& v) { c.L = number<int>(v); }},
        {"n", [](auto& c, const auto& v) { c.n = number<double>(v); }},
        {"M", [](auto& c, const auto& v) { c.M = number<int>(v); }},
        {"weighting", [](auto& c, const auto& v) { c.weighting = choice(v, {"paper_uniform_t", "riemannian"}); }},
        {"dc", [](auto& c, const auto& v) { c.dc = boolean(v); }},
        {"table_knots", [](auto& c, const auto& v) { c.table_knots = number<int>(v); }},
        {"eps", [](auto& c, const auto& v) { c.eps = number<double>(v); }},
        {"delta", [](auto& c, const auto& v) { c.delta = number<double>(v); }},
        {"eps1", [](auto& c, const auto& v) { c.eps1 = number<double>(v); }},
        {"solver", [](auto& c, const auto& v) { c.solver = choice(v, {"pinv", "neumann", "dc_density"}); }},
        {"rank_tol", [](auto& c, const auto& v) { c.rank_tol = number<double>(v); }},
        {"refine_steps", [](auto& c, const auto& v) { c.refine_steps = number<int>(v); }},
        {"max_terms", [](auto& c, const auto& v) { c.max_terms = number<int>(v); }},
        {"tol", [](auto& c, const auto& v) { c.tol = number<double>(v); }},
        {"band", [](auto& c, const auto& v) { c.band = number<int>(v); }},
        {"tau", [](auto& c, const auto& v) { c.tau = number<double>(v); }},
        {"iterations", [](auto& c, const auto& v) { c.iterations = number<int>(v); }},
        {"zeta0", [](auto& c, const auto& v) { c.zeta0 = choice(v, {"labels", "network"}); }},
        {"network_width", [](auto& c, const auto& v) { c.network_width = number<int>(v); }},
        {"ntk_widths", [](auto& c, const auto& v) { c.ntk_widths = int_list(v); }},
        {"ntk_seeds", [](auto& c, const auto& v) { c.ntk_seeds = number<int>(v); }},
        {"ntk_depth", [](auto& c, const auto& v) { c.ntk_depth = number<int>(v); }},
        {"ntk_dim", [](auto& c, const auto& v) { c.ntk_dim = number<int>(v); }},
        {"ntk_points", [](auto& c, const auto& v) { c.ntk_points = number<int>(v); }},
        {"depths", [](auto& c, const auto& v) { c.depths = int_list(v); }},
        {"seed", [](auto& c, const auto& v) { c.seed = number<std::uint64_t>(v); }},
        {"out", [](auto& c, const auto& v) { c.out = v; }},
    };
    return t;
  }

  static const std::vector<std::pair<std::string, Getter>>& getters() {
#define DC_GET(k) {#k, [](const ExperimentConfig& c) { return nlohmann::ordered_json(c.k); }}
    static const std::vector<std::pair<std::string, Getter>> g = {
        DC_GET(geometry), DC_GET(curves_csv), DC_GET(separation), DC_GET(scale), DC_GET(gap),
        DC_GET(polar), DC_GET(curve_samples), DC_GET(density), DC_GET(L), DC_GET(n),
        DC_GET(M), DC_GET(weighting), DC_GET(dc), DC_GET(table_knots), DC_GET(eps),
        DC_GET(delta), DC_GET(eps1), DC_GET(solver), DC_GET(rank_tol), DC_GET(refine_steps),
        DC_GET(max_terms), DC_GET(tol), DC_GET(band), DC_GET(tau), DC_GET(iterations),
        DC_GET(zeta0), DC_GET(network_width), DC_GET(ntk_widths), DC_GET(ntk_seeds), DC_GET(ntk_depth),
        DC_GET(ntk_dim), DC_GET(ntk_points), DC_GET(depths), DC_GET(seed), DC_GET(out),
    };
#undef DC_GET
    return g;
  }
};

}  // namespace deepcurves
