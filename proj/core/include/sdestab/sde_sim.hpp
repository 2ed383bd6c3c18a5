#pragma once

// Coupled Euler-Maruyama for (X, X^) on one shared Brownian path, with the
// per-path error functionals the stability bounds are stated for.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "sdestab/coeffs.hpp"
#include "sdestab/stats.hpp"

namespace sdestab {

/// Stopping time resolved on the grid: the first grid time at which the rule fires, capped at T.
struct StoppingRule {
  enum class Kind { Deterministic, Exit };
  Kind kind = Kind::Deterministic;
  double time = std::numeric_limits<double>::infinity();    // Deterministic: first grid time >= time
  double radius = std::numeric_limits<double>::infinity();  // Exit: first grid time with |X - x0| >= radius

  static StoppingRule at(double t) { return {Kind::Deterministic, t, std::numeric_limits<double>::infinity()}; }
  static StoppingRule exit(double r) { return {Kind::Exit, std::numeric_limits<double>::infinity(), r}; }
  std::string label() const;
  bool operator==(const StoppingRule&) const = default;
};

/// Function of bounded variation with its total variation V(g).
struct BvFunction {
  std::string name;
  std::function<double(double)> g;
  double total_variation = 0.0;

  /// 1_{[theta, inf)}; V = 1.
  static BvFunction indicator(double theta);
  /// Constant c; V = 0.
  static BvFunction constant(double c);
};

struct SimulationPlan {
  std::size_t steps = 4096;  // N, a power of two >= 2
  std::size_t paths = 10000;
  std::uint64_t seed = 1;
  unsigned workers = 1;

  bool record_terminal = true;
  bool record_sup = true;
  std::vector<StoppingRule> stopping;
  std::vector<BvFunction> bv;
  bool record_full_paths = false;
  std::size_t full_path_budget_bytes = std::size_t{1} << 28;

  /// Trapezoidal int_0^T |b - b^|^p (X^_s) ds and int_0^T |sigma - sigma^|^{2p} (X^_s) ds per path.
  bool record_key_integrals = false;
  double key_p = 1.0;

  /// The Brownian path is generated on a grid 2^r times finer than `steps` and
  /// summed. Running (N, r) and (N/2, r+1) reuses the same path at two resolutions.
  unsigned noise_refinement = 0;

  /// Throws DomainError for an invalid plan.
  void validate() const;
};

struct PathEnsemble {
  std::size_t paths = 0;
  std::size_t steps = 0;
  double x0 = 0.0;
  double horizon = 0.0;

  std::vector<double> terminal_x;
  std::vector<double> terminal_xhat;
  std::vector<double> terminal_error;  // |X_T - X^_T|
  std::vector<double> sup_error;       // max over the grid of |X - X^|

  std::vector<StoppingRule> rules;
  std::vector<std::vector<double>> stopped_error;  // [rule][path] |X_tau - X^_tau|

  std::vector<BvFunction> bv_functions;
  std::vector<std::vector<double>> bv_exact;      // [function][path] g(X_T)
  std::vector<std::vector<double>> bv_perturbed;  // [function][path] g(X^_T)

  std::vector<double> key_drift;      // per path
  std::vector<double> key_diffusion;  // per path

  /// paths * (steps + 1) values each when full paths are recorded.
  std::vector<double> full_x;
  std::vector<double> full_xhat;

  std::size_t non_finite_paths = 0;

  Estimate mean_terminal_error() const;
  Estimate mean_sup_error() const;
};

/// X_{k+1} = X_k + b(X_k) h + sigma(X_k) dW_k, and the same for (b^, sigma^) with the same dW_k.
/// Path i draws its normals from counter (seed, i), so results do not depend on `workers`.
PathEnsemble simulate_pair(const SdePair& pair, const SimulationPlan& plan);

/// E|X_tau - X^_tau| for a recorded rule; with full paths any rule can be evaluated.
Estimate stopped_error(const PathEnsemble& ensemble, const StoppingRule& rule);

/// E[sup_t |X_t - X^_t|^p].
Estimate pth_moment_sup_error(const PathEnsemble& ensemble, double p);

/// E|g(X_T) - g(X^_T)|^r for the recorded function named `name`.
Estimate bv_error(const PathEnsemble& ensemble, const std::string& name, double r);

/// Per-path values of a functional, for custom aggregation.
std::vector<double> stopped_error_samples(const PathEnsemble& ensemble, const StoppingRule& rule);

struct GridDoubling {
  std::size_t fine_steps = 0;
  double fine = 0.0;    // functional at N
  double coarse = 0.0;  // same functional at N/2 on the same Brownian path
  double abs_change = 0.0;
  double rel_change = 0.0;
};

/// Runs `plan` at N and at N/2 on the same Brownian path and compares `functional`.
GridDoubling grid_doubling(const SdePair& pair, const SimulationPlan& plan,
                           const std::function<double(const PathEnsemble&)>& functional);

/// Writes the full paths as little-endian float64: header {magic "SDEPATHS", u32 version,
/// u64 paths, u64 steps}, then per path steps+1 values of X followed by steps+1 of X^.
void write_path_dump(const PathEnsemble& ensemble, const std::string& file);

struct PathDumpHeader {
  std::uint32_t version = 0;
  std::uint64_t paths = 0;
  std::uint64_t steps = 0;
};

PathDumpHeader read_path_dump_header(const std::string& file);

}  // namespace sdestab
