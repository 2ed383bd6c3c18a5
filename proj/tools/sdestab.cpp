// sdestab: command-line front end.
//
//   sdestab <check|mollify|norm|yw-validate|density|simulate|rates>
//           --config cfg.json [--seed N] [--workers N] [--out DIR]
//
// Exit status: 0 success, 1 assumption or verdict failure, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdestab/assumptions.hpp"
#include "sdestab/config.hpp"
#include "sdestab/errors.hpp"
#include "sdestab/mollify.hpp"
#include "sdestab/parametrix.hpp"
#include "sdestab/rate_lab.hpp"
#include "sdestab/sde_sim.hpp"
#include "sdestab/weighted_norm.hpp"
#include "sdestab/yw_functions.hpp"

using namespace sdestab;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kFailed = 1;
constexpr int kUsage = 2;

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out;
};

struct Run {
  ExperimentConfig cfg;
  std::string profile = "default";
  std::uint64_t hash = 0;
  std::string started;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Run load(const Globals& g, bool config_required, const std::string& kind) {
  Run run;
  run.started = utc_now();
  if (!g.config_path.empty()) {
    run.cfg = load_config(g.config_path);
  } else if (config_required) {
    throw ConfigError("--config", "required for this subcommand");
  } else {
    run.cfg.coefficients.drift = parse_coefficient_spec("constant(0)");
    run.cfg.coefficients.diffusion = parse_coefficient_spec("constant(1)");
    run.cfg.experiment.kind = kind;
  }
  if (const char* p = std::getenv(kToleranceProfileEnv)) {
    run.profile = p;
    apply_tolerance_profile(run.cfg, run.profile);
  }
  if (g.seed) run.cfg.plan.seed = *g.seed;
  if (!g.out.empty()) run.cfg.output.directory = g.out;
  run.hash = fnv1a64(serialize_config(run.cfg));
  return run;
}

RunManifest manifest(const Run& run, const Globals& g, const std::string& command) {
  RunManifest m;
  m.command = command;
  m.config_hash = run.hash;
  m.seed = run.cfg.plan.seed;
  m.workers = g.workers;
  m.started_utc = run.started;
  m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - run.t0).count();
  m.tolerance_profile = run.profile;
  m.tolerances = {{"quadrature_rel_tol", run.cfg.numerics.quadrature_tolerance},
                  {"quadrature_max_depth", static_cast<double>(run.cfg.numerics.quadrature_max_depth)},
                  {"truncation_radius", run.cfg.numerics.truncation_radius},
                  {"probe_pairs", static_cast<double>(run.cfg.numerics.probe_pairs)},
                  {"slope_tolerance", run.cfg.experiment.slope_tolerance}};
  return m;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  os << text;
}

SamplingSpec sampling(const ExperimentConfig& cfg) {
  SamplingSpec s;
  s.osl_pairs = cfg.numerics.probe_pairs;
  s.holder_pairs = cfg.numerics.probe_pairs;
  s.seed = cfg.plan.seed;
  s.norm = cfg.norm_spec();
  return s;
}

int cmd_check(const Globals& g) {
  Run run = load(g, true, "check");
  const SdePair pair = run.cfg.pair();
  const AssumptionReport rep = check_assumptions(pair, run.cfg.experiment.p, sampling(run.cfg));

  OutputDirectory out(run.cfg.output.directory);
  ordered_json j;
  j["p"] = run.cfg.experiment.p;
  j["domain"] = {rep.domain.lo, rep.domain.hi};
  for (const auto& c : rep.conditions) {
    ordered_json e{{"name", c.name}, {"pass", c.pass}, {"measured", c.measured}, {"declared", c.declared},
                   {"coefficient", c.coefficient}, {"detail", c.detail}};
    if (c.witness_x) e["witness_x"] = *c.witness_x;
    if (c.witness_y) e["witness_y"] = *c.witness_y;
    j["conditions"].push_back(e);
  }
  j["epsilon"] = rep.epsilon.epsilon;
  j["all_pass"] = rep.all_pass();
  write_text(out.file("check.json"), j.dump(2) + "\n");
  out.write_manifest(manifest(run, g, "check"));

  for (const auto& c : rep.conditions)
    std::printf("%-8s %s  measured %s declared %s %s\n", c.name.c_str(), c.pass ? "pass" : "FAIL",
                fmt(c.measured).c_str(), fmt(c.declared).c_str(), c.detail.c_str());
  return rep.all_pass() ? kOk : kFailed;
}

int cmd_mollify(const Globals& g, std::optional<int> n_flag, std::size_t points) {
  Run run = load(g, true, "mollify");
  const int n = n_flag.value_or(run.cfg.experiment.n);
  if (n <= 0) throw DomainError("--n must be positive");
  const MollifyOptions opts = run.cfg.mollify_options();
  const Coefficient b = build_coefficient(run.cfg.coefficients.drift, opts);
  const Coefficient s = build_coefficient(run.cfg.coefficients.diffusion, opts);
  const Coefficient bn = b.is_constant() ? b : mollify(b, n, opts);
  const Coefficient sn = s.is_constant() ? s : mollify(s, n, opts);

  const SdePair pair = run.cfg.pair();
  const double lambda = run.cfg.measure.lambda.value_or(pair.lambda());
  const WeightedMeasure m(run.cfg.measure.x0, lambda, run.cfg.measure.horizon);
  const double half = run.cfg.numerics.truncation_radius * std::sqrt(m.variance()) / 4.0;

  OutputDirectory out(run.cfg.output.directory);
  std::ostringstream csv;
  csv << "x,b,b_n,sigma,sigma_n\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double x = m.x0 - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
    csv << fmt(x) << ',' << fmt(b(x)) << ',' << fmt(bn(x)) << ',' << fmt(s(x)) << ',' << fmt(sn(x)) << '\n';
  }
  write_text(out.file("mollify.csv"), csv.str());

  SdePair mp{pair.x0, pair.horizon, {b, s}, {bn, sn}};
  const EpsilonReport eps = epsilon_p(mp, run.cfg.experiment.p, m, run.cfg.norm_spec());
  ordered_json j{{"n", n}, {"drift", bn.name()}, {"diffusion", sn.name()}, {"epsilon_p", eps.epsilon},
                 {"drift_term", eps.drift_term}, {"diffusion_term", eps.diffusion_term}};
  if (!s.is_constant() && s.regularity().holder)
    j["diffusion_distance_bound"] = mollification_distance_bound(s, n, run.cfg.experiment.p, m);
  write_text(out.file("mollify.json"), j.dump(2) + "\n");
  out.write_manifest(manifest(run, g, "mollify"));
  std::printf("n=%d epsilon_p=%s\n", n, fmt(eps.epsilon).c_str());
  return kOk;
}

int cmd_norm(const Globals& g) {
  Run run = load(g, true, "norm");
  const SdePair pair = run.cfg.pair();
  const double lambda = run.cfg.measure.lambda.value_or(pair.lambda());
  const WeightedMeasure m(pair.x0, lambda, pair.horizon);
  std::vector<double> ps = run.cfg.experiment.p_values;
  if (ps.empty()) ps = {run.cfg.experiment.p};

  OutputDirectory out(run.cfg.output.directory);
  std::ostringstream csv;
  csv << "p,norm_b,norm_sigma,epsilon_p,meets_A_p\n";
  bool all = true;
  for (double p : ps) {
    const EpsilonReport e = epsilon_p(pair, p, m, run.cfg.norm_spec());
    const double nb = std::pow(e.drift_term, 1.0 / p);
    const double ns = std::pow(e.diffusion_term, 1.0 / (2.0 * p));
    all = all && e.meets_assumption();
    csv << fmt(p) << ',' << fmt(nb) << ',' << fmt(ns) << ',' << fmt(e.epsilon) << ','
        << (e.meets_assumption() ? "true" : "false") << '\n';
  }
  write_text(out.file("norm.csv"), csv.str());
  out.write_manifest(manifest(run, g, "norm"));
  std::cout << csv.str();
  return all ? kOk : kFailed;
}

int cmd_yw(const Globals& g, std::optional<double> delta, std::optional<double> kappa, std::size_t grid) {
  Run run = load(g, false, "yw-validate");
  const YwParams p(delta.value_or(run.cfg.experiment.delta), kappa.value_or(run.cfg.experiment.kappa));
  const YwPropertyReport r = check_yw_properties(p, grid);
  constexpr double tol = 1e-9;
  const bool ok = r.prop2_ok(tol) && r.prop3_ok(tol) && r.prop4_ok(tol) && r.prop5_ok(tol) && r.mass_ok(1e-6);

  OutputDirectory out(run.cfg.output.directory);
  ordered_json j{{"delta", r.delta},
                 {"kappa", r.kappa},
                 {"log_mu", p.log_mu()},
                 {"mass_error", r.mass_error},
                 {"prop2", {{"max_abs_inside", r.prop2_max_zero}, {"min_ratio", r.prop2_min_ratio},
                            {"min_ratio_bulk", r.prop2_min_ratio_bulk}, {"pass", r.prop2_ok(tol)}}},
                 {"prop3", {{"excess", r.prop3_excess}, {"pass", r.prop3_ok(tol)}}},
                 {"prop4", {{"excess", r.prop4_excess}, {"pass", r.prop4_ok(tol)}}},
                 {"prop5", {{"excess", r.prop5_excess}, {"max_ratio", r.prop5_max_ratio},
                            {"worst_x", r.prop5_worst_x}, {"pass", r.prop5_ok(tol)}}},
                 {"c_delta_kappa", c_delta_kappa(p)},
                 {"all_pass", ok}};
  write_text(out.file("yw.json"), j.dump(2) + "\n");
  out.write_manifest(manifest(run, g, "yw-validate"));
  std::cout << j.dump(2) << "\n";
  return ok ? kOk : kFailed;
}

int cmd_density(const Globals& g, std::optional<double> t_flag, std::string y_grid, std::optional<int> order_flag) {
  Run run = load(g, true, "density");
  const double t = t_flag.value_or(run.cfg.experiment.t);
  const int order = order_flag.value_or(run.cfg.experiment.order);
  std::vector<double> grid = run.cfg.experiment.y_grid;
  if (!y_grid.empty()) {
    grid.clear();
    std::stringstream ss(y_grid);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(std::stod(item));
    if (grid.size() != 3 || grid[2] < 1) throw ConfigError("--y-grid", "expected lo,hi,points");
  }
  if (order < 0 || order > 2) throw ConfigError("--order", "must be 0, 1 or 2");
  const SdePair pair = run.cfg.pair();
  const FrozenKernelParams params = FrozenKernelParams::from_coefficients(pair.exact, pair.horizon);
  IntegratorSpec spec;
  spec.seed = run.cfg.plan.seed;
  spec.workers = g.workers;

  OutputDirectory out(run.cfg.output.directory);
  std::ostringstream csv;
  csv << "y,p_frozen,correction_1,correction_2,tail_bound,total\n";
  const auto points = static_cast<std::size_t>(grid[2]);
  bool low = false;
  for (std::size_t i = 0; i < points; ++i) {
    const double y = points == 1 ? grid[0] : grid[0] + (grid[1] - grid[0]) * i / static_cast<double>(points - 1);
    const DensityEstimate d = density_estimate(pair.exact, params, t, y, pair.x0, order, spec);
    low = low || d.low_precision;
    const double c1 = d.corrections.size() > 0 ? d.corrections[0].value : 0.0;
    const double c2 = d.corrections.size() > 1 ? d.corrections[1].value : 0.0;
    csv << fmt(y) << ',' << fmt(d.frozen) << ',' << fmt(c1) << ',' << fmt(c2) << ',' << fmt(d.tail_bound) << ','
        << fmt(d.total) << '\n';
  }
  write_text(out.file("density.csv"), csv.str());
  RunManifest m = manifest(run, g, "density");
  m.tolerances["c0"] = c0_constant(params);
  out.write_manifest(m);
  if (low) std::fprintf(stderr, "warning: some correction terms hit the sample budget before the target error\n");
  return kOk;
}

std::vector<StoppingRule> stopping_rules(const ExperimentConfig& cfg) {
  std::vector<StoppingRule> rules;
  const double T = cfg.measure.horizon;
  if (cfg.experiment.stopping_times.empty())
    rules = {StoppingRule::at(0.25 * T), StoppingRule::at(0.5 * T), StoppingRule::at(T)};
  for (double t : cfg.experiment.stopping_times) rules.push_back(StoppingRule::at(t));
  if (cfg.experiment.exit_radii.empty()) {
    rules.push_back(StoppingRule::exit(0.5));
    rules.push_back(StoppingRule::exit(1.0));
  }
  for (double r : cfg.experiment.exit_radii) rules.push_back(StoppingRule::exit(r));
  return rules;
}

int cmd_simulate(const Globals& g, std::optional<std::size_t> steps, std::optional<std::size_t> paths,
                 const std::vector<std::string>& record) {
  Run run = load(g, true, "simulate");
  if (steps) run.cfg.plan.steps = *steps;
  if (paths) run.cfg.plan.paths = *paths;
  SimulationPlan plan = run.cfg.simulation_plan();
  plan.workers = g.workers;
  std::vector<std::string> rec = record.empty() ? std::vector<std::string>{"terminal", "sup", "stopping", "bv"} : record;
  const auto wants = [&](const char* k) { return std::find(rec.begin(), rec.end(), k) != rec.end(); };
  for (const auto& r : rec)
    if (r != "terminal" && r != "sup" && r != "stopping" && r != "bv" && r != "paths" && r != "key")
      throw ConfigError("--record", "unknown item '" + r + "'");
  plan.record_terminal = true;
  plan.record_sup = wants("sup");
  if (wants("stopping")) plan.stopping = stopping_rules(run.cfg);
  if (wants("bv")) plan.bv = {BvFunction::indicator(run.cfg.experiment.bv_theta)};
  plan.record_full_paths = plan.record_full_paths || wants("paths") || run.cfg.output.path_dump;
  plan.record_key_integrals = wants("key");
  plan.key_p = run.cfg.experiment.p;

  const SdePair pair = run.cfg.pair();
  try {
    const AssumptionReport rep = check_assumptions(pair, run.cfg.experiment.p, sampling(run.cfg));
    if (!rep.all_pass()) std::fprintf(stderr, "warning: the pair fails at least one assumption probe\n");
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "warning: assumptions not checked (%s)\n", e.what());
  }
  const PathEnsemble e = simulate_pair(pair, plan);

  OutputDirectory out(run.cfg.output.directory);
  std::ostringstream csv;
  csv << "functional,mean,std_error,ci_low,ci_high,count\n";
  const auto row = [&](const std::string& name, const Estimate& est) {
    csv << name << ',' << fmt(est.mean) << ',' << fmt(est.std_error) << ',' << fmt(est.ci_low) << ','
        << fmt(est.ci_high) << ',' << est.count << '\n';
  };
  row("terminal_error", e.mean_terminal_error());
  if (plan.record_sup) {
    row("sup_error", e.mean_sup_error());
    row("sup_error_p" + fmt(run.cfg.experiment.p), pth_moment_sup_error(e, run.cfg.experiment.p));
  }
  for (const auto& rule : e.rules) row("stopped[" + rule.label() + "]", stopped_error(e, rule));
  for (const auto& f : e.bv_functions) row("bv[" + f.name + "]", bv_error(e, f.name, run.cfg.experiment.r));
  if (plan.record_key_integrals) {
    row("key_drift", estimate_mean(e.key_drift));
    row("key_diffusion", estimate_mean(e.key_diffusion));
  }
  write_text(out.file("simulate.csv"), csv.str());
  if (plan.record_full_paths) write_path_dump(e, out.file("paths.bin").string());

  RunManifest m = manifest(run, g, "simulate");
  if (run.cfg.experiment.grid_doubling && plan.steps >= 4) {
    SimulationPlan light = plan;
    light.record_full_paths = false;
    m.grid_doubling = grid_doubling(pair, light, [](const PathEnsemble& x) { return x.mean_terminal_error().mean; });
  }
  out.write_manifest(m);
  std::cout << csv.str();
  if (e.non_finite_paths) std::fprintf(stderr, "warning: %zu non-finite paths\n", e.non_finite_paths);
  return kOk;
}

const char* kPlotScript = R"(# Plots rates.csv; run with python3 and matplotlib.
import csv, json, math
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("rates.csv")))
fit = json.load(open("fit.json"))
x = [float(r["log_eps"]) for r in rows]
y = [float(r["log_err"]) for r in rows]
plt.plot(x, y, "o", label="measured")
xs = [min(x), max(x)]
plt.plot(xs, [fit["intercept"] + fit["slope"] * v for v in xs], "-", label="fit slope %.3f" % fit["slope"])
plt.xlabel("log x" if fit["mode"] == "power" else "log transformed x")
plt.ylabel("log error")
plt.legend()
plt.savefig("rates.png", dpi=150)
)";

int cmd_rates(const Globals& g) {
  Run run = load(g, true, "rates");
  const auto& ex = run.cfg.experiment;
  RateExperimentConfig rc;
  rc.base = run.cfg.pair();
  rc.n_ladder = ex.n_ladder;
  rc.p = ex.p;
  rc.theorem = theorem_from_string(ex.error_kind);
  rc.plan = run.cfg.simulation_plan();
  rc.plan.workers = g.workers;
  if (rc.theorem == Theorem::StoppedL1) rc.stopping_family = stopping_rules(run.cfg);
  rc.bv = BvFunction::indicator(ex.bv_theta);
  rc.r = ex.r;
  rc.slope_tolerance = ex.slope_tolerance;
  rc.mollify = run.cfg.mollify_options();
  rc.norm = run.cfg.norm_spec();
  rc.grid_doubling = ex.grid_doubling;
  rc.validate();

  const RateFit fit = run_stability_experiment(rc);

  OutputDirectory out(run.cfg.output.directory);
  std::ostringstream csv;
  csv << "n,epsilon,error,error_se,log_eps,log_err\n";
  for (const auto& p : fit.points) {
    const double le = p.axis > 0.0 ? std::log(p.axis) : NAN;
    const double lr = p.error.mean > 0.0 ? std::log(p.error.mean) : NAN;
    csv << p.n << ',' << fmt(p.epsilon) << ',' << fmt(p.error.mean) << ',' << fmt(p.error.std_error) << ','
        << fmt(le) << ',' << fmt(lr) << '\n';
  }
  write_text(out.file("rates.csv"), csv.str());

  ordered_json j;
  j["error_kind"] = to_string(fit.theorem);
  j["alpha"] = fit.alpha;
  j["mode"] = fit.exponent.mode == RateMode::Power ? "power" : "logarithmic";
  j["formula"] = fit.exponent.formula;
  j["exponent"] = fit.exponent.exponent;
  j["slope"] = fit.slope;
  j["slope_std_error"] = fit.slope_std_error;
  j["intercept"] = fit.intercept;
  j["r_squared"] = fit.r_squared;
  j["correlation"] = fit.correlation;
  j["slope_tolerance"] = rc.slope_tolerance;
  j["verdict"] = to_string(fit.verdict);
  j["master_seed"] = rc.plan.seed;
  for (const auto& p : fit.points)
    j["points"].push_back({{"n", p.n}, {"seed", p.seed}, {"epsilon", p.epsilon}, {"error", p.error.mean},
                           {"ci_low", p.error.ci_low}, {"ci_high", p.error.ci_high}, {"used", p.used},
                           {"rule", p.rule}, {"note", p.note}});
  if (fit.doubling)
    j["grid_doubling"] = {{"fine_steps", fit.doubling->fine_steps}, {"fine", fit.doubling->fine},
                          {"coarse", fit.doubling->coarse}, {"rel_change", fit.doubling->rel_change}};
  j["warnings"] = fit.warnings;
  write_text(out.file("fit.json"), j.dump(2) + "\n");
  if (run.cfg.output.plot_script) write_text(out.file("plot_rates.py"), kPlotScript);

  RunManifest m = manifest(run, g, "rates");
  m.grid_doubling = fit.doubling;
  out.write_manifest(m);

  std::printf("slope %.4f (exponent %.4f, tolerance %.2f), r^2 %.4f, verdict %s\n", fit.slope, fit.exponent.exponent,
              rc.slope_tolerance, fit.r_squared, to_string(fit.verdict).c_str());
  for (const auto& w : fit.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  return fit.verdict == Verdict::Consistent ? kOk : kFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stability lab for SDEs with discontinuous drift"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path, "Experiment config (JSON)");
  app.add_option("--seed", g.seed, "Master seed (overrides the config)");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory (overrides the config)");

  auto* check = app.add_subcommand("check", "Probe the assumptions on the configured pair");
  auto* moll = app.add_subcommand("mollify", "Mollify the configured coefficients");
  std::optional<int> n_flag;
  std::size_t moll_points = 401;
  moll->add_option("--n", n_flag, "Mollification level");
  moll->add_option("--points", moll_points, "Grid points in mollify.csv")->check(CLI::Range(2, 1000000));
  auto* norm = app.add_subcommand("norm", "Weighted norms and epsilon_p");
  auto* yw = app.add_subcommand("yw-validate", "Check the Yamada-Watanabe function properties");
  std::optional<double> delta;
  std::optional<double> kappa;
  std::size_t yw_grid = 10000;
  yw->add_option("--delta", delta, "delta > 1");
  yw->add_option("--kappa", kappa, "kappa in (0, 1)");
  yw->add_option("--grid", yw_grid, "Grid points")->check(CLI::Range(2, 100000000));
  auto* dens = app.add_subcommand("density", "Parametrix density terms");
  std::optional<double> t_flag;
  std::string y_grid;
  std::optional<int> order;
  dens->add_option("--t", t_flag, "Time t");
  dens->add_option("--y-grid", y_grid, "lo,hi,points");
  dens->add_option("--order", order, "Number of correction terms (0-2)");
  auto* sim = app.add_subcommand("simulate", "Coupled Euler-Maruyama ensemble");
  std::optional<std::size_t> steps;
  std::optional<std::size_t> paths;
  std::vector<std::string> record;
  sim->add_option("--steps", steps, "Time steps (power of two)");
  sim->add_option("--paths", paths, "Number of paths");
  sim->add_option("--record", record, "terminal, sup, stopping, bv, key, paths")->delimiter(',');
  auto* rates = app.add_subcommand("rates", "Stability-rate experiment along a mollification ladder");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*check) return cmd_check(g);
    if (*moll) return cmd_mollify(g, n_flag, moll_points);
    if (*norm) return cmd_norm(g);
    if (*yw) return cmd_yw(g, delta, kappa, yw_grid);
    if (*dens) return cmd_density(g, t_flag, y_grid, order);
    if (*sim) return cmd_simulate(g, steps, paths, record);
    if (*rates) return cmd_rates(g);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFailed;
  }
  return kUsage;
}
