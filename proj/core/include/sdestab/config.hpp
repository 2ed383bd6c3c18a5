#pragma once

// Experiment configuration (JSON), coefficient specs, and run manifests.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdestab/coeffs.hpp"
#include "sdestab/mollify.hpp"
#include "sdestab/sde_sim.hpp"
#include "sdestab/weighted_norm.hpp"

namespace sdestab {

/// A built-in coefficient with named parameters, optionally mollified at level n.
///   "neg_sign", "step(0, 1, -1)", "mollified(neg_sign, 8)", or
///   {"builtin": "holder_diffusion", "c0": 1, "c1": 0.5, "eta": 0.5, "mollify": 8}
struct CoefficientSpec {
  std::string builtin;
  std::map<std::string, double> params;  // every parameter, defaults filled in
  std::optional<int> mollify;
  /// Overrides the quadrature tolerance of the mollifier.
  std::optional<double> quadrature_tolerance;

  bool operator==(const CoefficientSpec&) const = default;
};

/// Parameter names of a builtin in positional order, with defaults (NaN = required).
const std::vector<std::pair<std::string, double>>& builtin_parameters(const std::string& builtin);

/// Parses the string form. `path` names the config key for errors.
CoefficientSpec parse_coefficient_spec(const std::string& text, const std::string& path = "");
/// Canonical string form, e.g. "mollified(step(0, 1, -1), 8)".
std::string to_string(const CoefficientSpec& spec);

Coefficient build_coefficient(const CoefficientSpec& spec, const MollifyOptions& options = {});

struct ExperimentConfig {
  struct Coefficients {
    CoefficientSpec drift;
    CoefficientSpec diffusion;
    std::optional<CoefficientSpec> drift_hat;       // defaults to drift
    std::optional<CoefficientSpec> diffusion_hat;   // defaults to diffusion
    bool operator==(const Coefficients&) const = default;
  } coefficients;

  struct Measure {
    double x0 = 0.0;
    double horizon = 1.0;
    std::optional<double> lambda;  // overrides the declared ellipticity for the weight
    bool operator==(const Measure&) const = default;
  } measure;

  struct Plan {
    std::size_t steps = 4096;
    std::size_t paths = 10000;
    std::uint64_t seed = 1;
    unsigned noise_refinement = 0;
    bool record_full_paths = false;
    bool operator==(const Plan&) const = default;
  } plan;

  struct Experiment {
    std::string kind;  // check, mollify, norm, yw-validate, density, simulate, rates
    double p = 1.0;
    std::vector<double> p_values;  // norm: one row per p; empty means {p}
    std::vector<int> n_ladder{2, 4, 8, 16, 32};
    int n = 8;                     // mollify
    std::string error_kind = "sup";
    double r = 1.0;
    double bv_theta = 0.0;
    double slope_tolerance = 0.15;
    std::vector<double> stopping_times;  // empty: T/4, T/2, T
    std::vector<double> exit_radii;      // empty: 0.5, 1
    bool grid_doubling = true;
    double delta = 2.0;                  // yw-validate
    double kappa = 0.5;
    double t = 0.5;                      // density
    std::vector<double> y_grid{-3.0, 3.0, 61.0};  // lo, hi, points
    int order = 2;
    bool operator==(const Experiment&) const = default;
  } experiment;

  struct Numerics {
    double quadrature_tolerance = 1e-12;
    int quadrature_max_depth = 20;
    double truncation_radius = 10.0;
    std::size_t probe_pairs = 100000;
    bool operator==(const Numerics&) const = default;
  } numerics;

  struct Output {
    std::string directory = "out";
    bool path_dump = false;
    bool plot_script = true;
    bool operator==(const Output&) const = default;
  } output;

  bool operator==(const ExperimentConfig&) const = default;

  NormSpec norm_spec() const;
  MollifyOptions mollify_options() const;
  SimulationPlan simulation_plan() const;
  /// x0, T and the four coefficients.
  SdePair pair() const;
};

/// Validates and applies defaults. Unknown keys and type errors throw ConfigError
/// naming the offending path (e.g. "coefficients.sigma_typo").
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& file);
/// Canonical JSON with every field written out.
std::string serialize_config(const ExperimentConfig& cfg);

/// Applies a named tolerance profile: "default", "strict" or "fast". Throws ConfigError otherwise.
void apply_tolerance_profile(ExperimentConfig& cfg, const std::string& profile);
/// Environment variable consulted by the CLI for the profile name.
inline constexpr const char* kToleranceProfileEnv = "SDESTAB_TOLERANCE_PROFILE";

std::uint64_t fnv1a64(std::string_view data) noexcept;

inline constexpr const char* kToolVersion = "0.1.0";

struct RunManifest {
  std::string tool_version = kToolVersion;
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  std::string started_utc;
  double wall_seconds = 0.0;
  std::string tolerance_profile = "default";
  std::map<std::string, double> tolerances;
  std::optional<GridDoubling> grid_doubling;
  std::vector<std::string> files;
};

std::string manifest_json(const RunManifest& m);

/// Output directory with exactly one manifest. Opening it removes the files of a
/// previous run listed in an existing manifest.
class OutputDirectory {
 public:
  explicit OutputDirectory(std::filesystem::path dir);

  /// Path for `name`, registered for the manifest.
  std::filesystem::path file(const std::string& name);
  const std::filesystem::path& path() const noexcept { return dir_; }
  /// Writes manifest.json listing every registered file.
  void write_manifest(RunManifest manifest) const;

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

inline constexpr const char* kManifestName = "manifest.json";

/// UTC timestamp, ISO 8601.
std::string utc_now();

}  // namespace sdestab
