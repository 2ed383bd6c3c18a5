#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "sdestab/config.hpp"
#include "sdestab/errors.hpp"

using namespace sdestab;

namespace {

const char* kMinimal = R"j({"coefficients": {"drift": "neg_sign", "diffusion": "constant(1)"},
                           "experiment": {"kind": "check"}})j";

std::string error_path(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

}  // namespace

TEST(ParseConfig, MinimalGetsDefaults) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.plan.steps, 4096u);
  EXPECT_EQ(c.plan.paths, 10000u);
  EXPECT_EQ(c.numerics.truncation_radius, 10.0);
  EXPECT_EQ(c.measure.horizon, 1.0);
  EXPECT_EQ(c.experiment.kind, "check");
  EXPECT_EQ(c.coefficients.drift.builtin, "neg_sign");
  EXPECT_FALSE(c.coefficients.drift_hat.has_value());
}

TEST(ParseConfig, UnknownKeyNamed) {
  const std::string text = R"j({"coefficients": {"drift": "neg_sign", "diffusion": "constant(1)", "sigma_typo": 1},
                               "experiment": {"kind": "check"}})j";
  EXPECT_EQ(error_path(text), "coefficients.sigma_typo");
}

TEST(ParseConfig, SchemaViolationsNamePath) {
  EXPECT_EQ(error_path(R"j({"experiment": {"kind": "check"}})j"), "coefficients");
  EXPECT_EQ(error_path(R"j({"coefficients": {"drift": "neg_sign", "diffusion": "constant(1)"}})j"), "experiment");
  EXPECT_EQ(error_path(R"j({"coefficients": {"drift": "neg_sign", "diffusion": "constant(1)"},
                           "experiment": {"kind": "check"}, "plan": {"steps": "many"}})j"),
            "plan.steps");
  EXPECT_EQ(error_path(R"j({"coefficients": {"drift": "wobbly", "diffusion": "constant(1)"},
                           "experiment": {"kind": "check"}})j"),
            "coefficients.drift");
}

TEST(ParseConfig, FullRoundTrip) {
  const std::string text = R"j({
    "coefficients": {"drift": "step(0.5, 1, -1)", "diffusion": "holder_diffusion(1, 0.5, 0.75)",
                     "drift_hat": "mollified(neg_sign, 8)", "diffusion_hat": "constant(1.2)"},
    "measure": {"x0": 0.3, "T": 0.5, "lambda": 2.5},
    "plan": {"steps": 1024, "paths": 500, "seed": 77, "noise_refinement": 1, "record_full_paths": true},
    "experiment": {"kind": "rates", "p": 2, "n_ladder": [1, 3, 9], "error_kind": "p-moment",
                   "stopping_times": [0.1], "exit_radii": [0.4], "grid_doubling": false},
    "numerics": {"quadrature_tolerance": 1e-10, "truncation_radius": 12},
    "output": {"directory": "runs/a", "path_dump": true, "plot_script": false}})j";
  const auto c = parse_config(text);
  EXPECT_EQ(c.measure.lambda, 2.5);
  EXPECT_EQ(c.coefficients.drift_hat->mollify, 8);
  const auto again = parse_config(serialize_config(c));
  EXPECT_EQ(again, c);
  EXPECT_EQ(serialize_config(again), serialize_config(c));
}

TEST(CoefficientSpec, ParseAndBuild) {
  const auto s = parse_coefficient_spec("holder_diffusion(1, 0.5, 0.75)");
  EXPECT_EQ(s.builtin, "holder_diffusion");
  EXPECT_EQ(s.params.at("eta"), 0.75);
  EXPECT_EQ(s.params.at("center"), 0.0);
  const Coefficient c = build_coefficient(s);
  EXPECT_DOUBLE_EQ(c(0.0), 1.0);
  EXPECT_EQ(parse_coefficient_spec(to_string(s)), s);
  const auto m = parse_coefficient_spec("mollified(neg_sign, 4)");
  EXPECT_EQ(m.mollify, 4);
  EXPECT_NEAR(build_coefficient(m)(0.0), 0.0, 1e-15);
  EXPECT_THROW(parse_coefficient_spec("step(1)"), ConfigError);
}

TEST(ToleranceProfile, KnownAndUnknown) {
  auto c = parse_config(kMinimal);
  apply_tolerance_profile(c, "strict");
  EXPECT_LT(c.numerics.quadrature_tolerance, 1e-12);
  EXPECT_THROW(apply_tolerance_profile(c, "loose-ish"), ConfigError);
}

TEST(Fnv1a, KnownValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(OutputDirectory, ManifestCoversExactlyTheWrittenFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "sdestab_outdir_test";
  std::filesystem::remove_all(dir);
  {
    OutputDirectory out(dir);
    std::ofstream(out.file("a.csv")) << "x\n1\n";
    std::ofstream(out.file("b.json")) << "{}";
    RunManifest m;
    m.command = "test";
    out.write_manifest(m);
  }
  {
    OutputDirectory out(dir);
    std::ofstream(out.file("c.csv")) << "y\n";
    RunManifest m;
    m.command = "test";
    out.write_manifest(m);
  }
  std::size_t count = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    ++count;
    const auto name = e.path().filename().string();
    EXPECT_TRUE(name == "c.csv" || name == "manifest.json") << name;
  }
  EXPECT_EQ(count, 2u);
  std::filesystem::remove_all(dir);
}

TEST(ShippedConfigs, AllParseAndRoundTrip) {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(SDESTAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    SCOPED_TRACE(entry.path().string());
    ExperimentConfig cfg;
    ASSERT_NO_THROW(cfg = load_config(entry.path()));
    EXPECT_EQ(serialize_config(parse_config(serialize_config(cfg))), serialize_config(cfg));
    ++seen;
  }
  EXPECT_GE(seen, 4);
}
