#include <sstream>

#include <gtest/gtest.h>

#include <deepcurves/config.hpp>

using deepcurves::config_error;
using deepcurves::ExperimentConfig;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const config_error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, ParsesFile) {
  ExperimentConfig c;
  std::istringstream is("# comment\nL = 100\n\nM=64   # trailing\ndc=true\nntk_widths = 8, 16,32\ngeometry=clover3\nseed=18446744073709551615\n");
  c.parse(is, "x.cfg");
  EXPECT_EQ(c.L, 100);
  EXPECT_EQ(c.M, 64);
  EXPECT_TRUE(c.dc);
  EXPECT_EQ(c.ntk_widths, (std::vector<int>{8, 16, 32}));
  EXPECT_EQ(c.geometry, "clover3");
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
}

TEST(Config, Diagnostics) {
  ExperimentConfig c;
  EXPECT_EQ(error_of([&] { c.apply_override("bogus=1"); }), "--set: unknown key 'bogus'");
  EXPECT_EQ(error_of([&] {
              std::istringstream is("L=3\nM=x\n");
              c.parse(is, "bad.cfg");
            }),
            "bad.cfg:2: key 'M': cannot parse 'x' as a number");
  EXPECT_EQ(error_of([&] {
              std::istringstream is("L 3\n");
              c.parse(is, "f");
            }),
            "f:1: expected key=value");
  EXPECT_NE(error_of([&] { c.apply_override("solver=cg"); }).find("expected one of pinv|neumann|dc_density"), std::string::npos);
  EXPECT_NE(error_of([&] { c.apply_override("dc=yes"); }).find("expected true or false"), std::string::npos);
  EXPECT_NE(error_of([&] { c.apply_override("L=2.5"); }).find("cannot parse"), std::string::npos);
  EXPECT_NE(error_of([&] { c.apply_override("L"); }).find("expected key=value"), std::string::npos);
}

TEST(Config, Validate) {
  ExperimentConfig c;
  EXPECT_NO_THROW(c.validate());
  c.L = 1;
  EXPECT_EQ(error_of([&] { c.validate(); }), "key 'L': depth must be >= 2");
  c = ExperimentConfig{};
  c.delta = 0.99;
  EXPECT_NE(error_of([&] { c.validate(); }).find("key 'delta'"), std::string::npos);
  c = ExperimentConfig{};
  c.ntk_widths.clear();
  EXPECT_NE(error_of([&] { c.validate(); }).find("key 'ntk_widths'"), std::string::npos);
  c = ExperimentConfig{};
  c.M = 8;
  EXPECT_NE(error_of([&] { c.validate(); }).find("key 'M'"), std::string::npos);
}

TEST(Config, SubcommandDefaults) {
  ExperimentConfig a;
  a.resolve_defaults("certificate");
  EXPECT_EQ(a.geometry, "two_circles");
  EXPECT_EQ(a.solver, "pinv");
  EXPECT_EQ(a.weighting, "paper_uniform_t");
  ExperimentConfig b;
  b.resolve_defaults("neumann");
  EXPECT_EQ(b.solver, "neumann");
  EXPECT_EQ(b.weighting, "riemannian");
  ExperimentConfig c;
  c.resolve_defaults("depth-sweep");
  EXPECT_EQ(c.geometry, "fig1_like");
  ExperimentConfig d;
  d.apply_override("weighting=riemannian");
  d.resolve_defaults("certificate");
  EXPECT_EQ(d.weighting, "riemannian");
}

TEST(Config, JsonListsEveryKeyInOrder) {
  ExperimentConfig c;
  const auto j = c.to_json();
  EXPECT_EQ(j.size(), ExperimentConfig::keys().size());
  EXPECT_EQ(j.begin().key(), "geometry");
  EXPECT_EQ(j["L"], 50);
  EXPECT_EQ(j["depths"], nlohmann::ordered_json({10, 25, 50, 100}));
  for (const auto& k : ExperimentConfig::keys()) EXPECT_TRUE(j.contains(k)) << k;
}
