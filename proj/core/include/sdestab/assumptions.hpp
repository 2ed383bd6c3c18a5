#pragma once

// Probe-based check of the standing assumptions on an SDE pair:
//   A-(i)   both drifts one-sided Lipschitz
//   A-(ii)  both drifts bounded by K
//   A-(iii) both diffusions eta-Hoelder with constant K
//   A-(iv)  1/lambda <= sigma^2 <= lambda
//   A-(p)   epsilon_p < 1 (and 1/log(1/epsilon_p) < 1 when alpha = 0)

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sdestab/coeffs.hpp"
#include "sdestab/weighted_norm.hpp"

namespace sdestab {

struct SamplingSpec {
  /// Probe domain; defaults to the weighted-norm window x0 +- 10 sqrt(8 lambda T).
  std::optional<Interval> domain;
  std::size_t osl_pairs = 100000;
  std::size_t holder_pairs = 100000;
  std::size_t grid_points = 10000;
  std::uint64_t seed = 1;
  double osl_tolerance = 1e-12;
  double holder_tolerance = 1e-9;
  double ellipticity_tolerance = 1e-12;
  NormSpec norm;
};

struct ConditionResult {
  std::string name;  // "A-(i)", ..., "A-(p)"
  bool pass = false;
  double measured = 0.0;
  double declared = 0.0;
  std::string coefficient;  // which coefficient produced the worst measurement
  std::optional<double> witness_x;
  std::optional<double> witness_y;
  std::string detail;
};

struct AssumptionReport {
  std::vector<ConditionResult> conditions;
  EpsilonReport epsilon;
  Interval domain;

  bool all_pass() const noexcept;
  /// Lookup by name; throws std::out_of_range if absent.
  const ConditionResult& at(const std::string& name) const;
};

/// Runs every probe. Missing metadata needed by a condition throws ConfigError
/// naming the field (e.g. "perturbed.drift.osl_L").
AssumptionReport check_assumptions(const SdePair& pair, double p, const SamplingSpec& spec = {});

}  // namespace sdestab
