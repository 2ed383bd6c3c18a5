#include "sdestab/config.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "sdestab/errors.hpp"

namespace sdestab {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kRequired = std::numeric_limits<double>::quiet_NaN();

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\n\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\n\r");
  return s.substr(b, e - b + 1);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_number(const std::string& s, const std::string& path) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(path, "expected a number, got '" + s + "'");
  }
  if (used != s.size()) throw ConfigError(path, "expected a number, got '" + s + "'");
  return v;
}

// Splits "a, f(b, c), d" at top-level commas.
std::vector<std::string> split_args(const std::string& s, const std::string& path) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char ch : s) {
    if (ch == '(') ++depth;
    if (ch == ')') --depth;
    if (depth < 0) throw ConfigError(path, "unbalanced parentheses in '" + s + "'");
    if (ch == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (depth != 0) throw ConfigError(path, "unbalanced parentheses in '" + s + "'");
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

void fill_defaults(CoefficientSpec& spec, const std::string& path) {
  for (const auto& [name, def] : builtin_parameters(spec.builtin)) {
    if (spec.params.count(name)) continue;
    if (std::isnan(def)) throw ConfigError(join(path, name), "required parameter of " + spec.builtin + " is missing");
    spec.params[name] = def;
  }
}

class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_, "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }
  std::string path(const std::string& key) const { return join(path_, key); }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(path(key), "expected a number");
    out = v.get<double>();
  }
  template <class Int>
  void integer(const std::string& key, Int& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_number_integer()) throw ConfigError(path(key), "expected an integer");
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned()) {
        out = static_cast<Int>(v.get<std::uint64_t>());
        return;
      }
      if (v.get<std::int64_t>() < 0) throw ConfigError(path(key), "expected a non-negative integer");
    }
    out = static_cast<Int>(v.get<std::int64_t>());
  }
  void boolean(const std::string& key, bool& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(path(key), "expected true or false");
    out = v.get<bool>();
  }
  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(path(key), "expected a string");
    out = v.get<std::string>();
  }
  template <class T>
  void list(const std::string& key, std::vector<T>& out) {
    if (!has(key)) return;
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(path(key), "expected an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = path(key) + "[" + std::to_string(i) + "]";
      if constexpr (std::is_integral_v<T>) {
        if (!v[i].is_number_integer()) throw ConfigError(p, "expected an integer");
      } else {
        if (!v[i].is_number()) throw ConfigError(p, "expected a number");
      }
      out.push_back(v[i].get<T>());
    }
  }

  /// Rejects keys that were never read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ConfigError(path(it.key()), "unknown key '" + it.key() + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const std::vector<std::pair<std::string, double>>& parameters_at(const std::string& builtin, const std::string& path) {
  try {
    return builtin_parameters(builtin);
  } catch (const ConfigError&) {
    throw ConfigError(path, "unknown builtin '" + builtin + "'");
  }
}

CoefficientSpec coefficient_from_json(const json& j, const std::string& path) {
  if (j.is_string()) return parse_coefficient_spec(j.get<std::string>(), path);
  ObjectReader r(j, path);
  CoefficientSpec spec;
  if (!r.has("builtin")) throw ConfigError(r.path("builtin"), "required");
  r.string("builtin", spec.builtin);
  const auto& params = parameters_at(spec.builtin, r.path("builtin"));
  for (const auto& [name, def] : params) {
    (void)def;
    if (!r.has(name)) continue;
    double v = 0.0;
    r.number(name, v);
    spec.params[name] = v;
  }
  if (r.has("mollify")) {
    int n = 0;
    r.integer("mollify", n);
    if (n <= 0) throw ConfigError(r.path("mollify"), "must be a positive integer");
    spec.mollify = n;
  }
  if (r.has("quadrature_tolerance")) {
    double tol = 0.0;
    r.number("quadrature_tolerance", tol);
    if (!(tol > 0.0)) throw ConfigError(r.path("quadrature_tolerance"), "must be positive");
    spec.quadrature_tolerance = tol;
  }
  r.finish();
  fill_defaults(spec, path);
  return spec;
}

ordered_json coefficient_to_json(const CoefficientSpec& spec) {
  ordered_json j;
  j["builtin"] = spec.builtin;
  for (const auto& [name, def] : builtin_parameters(spec.builtin)) {
    (void)def;
    j[name] = spec.params.at(name);
  }
  if (spec.mollify) j["mollify"] = *spec.mollify;
  if (spec.quadrature_tolerance) j["quadrature_tolerance"] = *spec.quadrature_tolerance;
  return j;
}

}  // namespace

const std::vector<std::pair<std::string, double>>& builtin_parameters(const std::string& builtin) {
  static const std::map<std::string, std::vector<std::pair<std::string, double>>> table{
      {"neg_sign", {{"scale", 1.0}}},
      {"pos_sign", {{"scale", 1.0}}},
      {"step", {{"theta", kRequired}, {"left", kRequired}, {"right", kRequired}}},
      {"constant", {{"value", kRequired}}},
      {"clipped_linear", {{"slope", kRequired}, {"cap", kRequired}}},
      {"holder_diffusion", {{"c0", kRequired}, {"c1", kRequired}, {"eta", kRequired}, {"center", 0.0}}},
  };
  const auto it = table.find(builtin);
  if (it == table.end()) throw ConfigError("builtin", "unknown builtin '" + builtin + "'");
  return it->second;
}

CoefficientSpec parse_coefficient_spec(const std::string& text, const std::string& path) {
  const std::string s = trim(text);
  const auto open = s.find('(');
  const std::string head = trim(s.substr(0, open));
  std::vector<std::string> args;
  if (open != std::string::npos) {
    if (s.back() != ')') throw ConfigError(path, "malformed coefficient '" + s + "'");
    args = split_args(s.substr(open + 1, s.size() - open - 2), path);
  }

  if (head == "mollified") {
    if (args.size() != 2) throw ConfigError(path, "expected mollified(base, n)");
    CoefficientSpec spec = parse_coefficient_spec(args[0], path);
    if (spec.mollify) throw ConfigError(path, "nested mollification is not supported");
    const double n = parse_number(args[1], path);
    if (!(n >= 1.0) || n != std::floor(n) || n > 1e9) throw ConfigError(path, "mollification level must be a positive integer");
    spec.mollify = static_cast<int>(n);
    return spec;
  }

  CoefficientSpec spec;
  spec.builtin = head;
  const auto& params = parameters_at(head, path);
  if (args.size() > params.size())
    throw ConfigError(path, head + " takes at most " + std::to_string(params.size()) + " parameters");
  for (std::size_t i = 0; i < args.size(); ++i) spec.params[params[i].first] = parse_number(args[i], path);
  fill_defaults(spec, path);
  return spec;
}

std::string to_string(const CoefficientSpec& spec) {
  std::string s = spec.builtin + "(";
  bool first = true;
  for (const auto& [name, def] : builtin_parameters(spec.builtin)) {
    (void)def;
    if (!first) s += ", ";
    s += fmt(spec.params.at(name));
    first = false;
  }
  s += ")";
  if (spec.mollify) s = "mollified(" + s + ", " + std::to_string(*spec.mollify) + ")";
  return s;
}

Coefficient build_coefficient(const CoefficientSpec& spec, const MollifyOptions& options) {
  const auto& p = spec.params;
  const auto base = [&]() -> Coefficient {
    const std::string& b = spec.builtin;
    if (b == "neg_sign") return builtin::neg_sign(p.at("scale"));
    if (b == "pos_sign") return builtin::pos_sign(p.at("scale"));
    if (b == "step") return builtin::step(p.at("theta"), p.at("left"), p.at("right"));
    if (b == "constant") return builtin::constant(p.at("value"));
    if (b == "clipped_linear") return builtin::clipped_linear(p.at("slope"), p.at("cap"));
    if (b == "holder_diffusion") return builtin::holder_diffusion(p.at("c0"), p.at("c1"), p.at("eta"), p.at("center"));
    throw ConfigError("builtin", "unknown builtin '" + b + "'");
  }();
  if (!spec.mollify) return base;
  MollifyOptions opts = options;
  if (spec.quadrature_tolerance) opts.quad.rel_tol = *spec.quadrature_tolerance;
  return mollify(base, *spec.mollify, opts);
}

NormSpec ExperimentConfig::norm_spec() const {
  NormSpec s;
  s.quad.rel_tol = numerics.quadrature_tolerance;
  s.quad.max_depth = static_cast<unsigned>(numerics.quadrature_max_depth);
  s.truncation_radius = numerics.truncation_radius;
  return s;
}

MollifyOptions ExperimentConfig::mollify_options() const {
  MollifyOptions m;
  m.quad.rel_tol = numerics.quadrature_tolerance;
  m.quad.max_depth = static_cast<unsigned>(numerics.quadrature_max_depth);
  return m;
}

SimulationPlan ExperimentConfig::simulation_plan() const {
  SimulationPlan sp;
  sp.steps = plan.steps;
  sp.paths = plan.paths;
  sp.seed = plan.seed;
  sp.noise_refinement = plan.noise_refinement;
  sp.record_full_paths = plan.record_full_paths;
  return sp;
}

SdePair ExperimentConfig::pair() const {
  const MollifyOptions m = mollify_options();
  const Coefficient b = build_coefficient(coefficients.drift, m);
  const Coefficient s = build_coefficient(coefficients.diffusion, m);
  const Coefficient bh = coefficients.drift_hat ? build_coefficient(*coefficients.drift_hat, m) : b;
  const Coefficient sh = coefficients.diffusion_hat ? build_coefficient(*coefficients.diffusion_hat, m) : s;
  return SdePair{measure.x0, measure.horizon, {b, s}, {bh, sh}};
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  ExperimentConfig cfg;
  ObjectReader top(root, "");

  if (!top.has("coefficients")) throw ConfigError("coefficients", "required");
  {
    ObjectReader r(top.raw("coefficients"), "coefficients");
    if (!r.has("drift")) throw ConfigError("coefficients.drift", "required");
    if (!r.has("diffusion")) throw ConfigError("coefficients.diffusion", "required");
    cfg.coefficients.drift = coefficient_from_json(r.raw("drift"), r.path("drift"));
    cfg.coefficients.diffusion = coefficient_from_json(r.raw("diffusion"), r.path("diffusion"));
    if (r.has("drift_hat")) cfg.coefficients.drift_hat = coefficient_from_json(r.raw("drift_hat"), r.path("drift_hat"));
    if (r.has("diffusion_hat"))
      cfg.coefficients.diffusion_hat = coefficient_from_json(r.raw("diffusion_hat"), r.path("diffusion_hat"));
    r.finish();
  }

  if (top.has("measure")) {
    ObjectReader r(top.raw("measure"), "measure");
    r.number("x0", cfg.measure.x0);
    r.number("T", cfg.measure.horizon);
    if (r.has("lambda")) {
      double l = 0.0;
      r.number("lambda", l);
      cfg.measure.lambda = l;
    }
    r.finish();
    if (!(cfg.measure.horizon > 0.0)) throw ConfigError("measure.T", "must be positive");
    if (cfg.measure.lambda && !(*cfg.measure.lambda >= 1.0)) throw ConfigError("measure.lambda", "must be >= 1");
  }

  if (top.has("plan")) {
    ObjectReader r(top.raw("plan"), "plan");
    r.integer("steps", cfg.plan.steps);
    r.integer("paths", cfg.plan.paths);
    r.integer("seed", cfg.plan.seed);
    r.integer("noise_refinement", cfg.plan.noise_refinement);
    r.boolean("record_full_paths", cfg.plan.record_full_paths);
    r.finish();
    try {
      cfg.simulation_plan().validate();
    } catch (const DomainError& e) {
      throw ConfigError("plan", e.what());
    }
  }

  if (!top.has("experiment")) throw ConfigError("experiment", "required");
  {
    ObjectReader r(top.raw("experiment"), "experiment");
    auto& e = cfg.experiment;
    if (!r.has("kind")) throw ConfigError("experiment.kind", "required");
    r.string("kind", e.kind);
    static const std::set<std::string> kinds{"check", "mollify", "norm", "yw-validate", "density", "simulate", "rates"};
    if (!kinds.count(e.kind)) throw ConfigError("experiment.kind", "unknown kind '" + e.kind + "'");
    r.number("p", e.p);
    r.list("p_values", e.p_values);
    r.list("n_ladder", e.n_ladder);
    r.integer("n", e.n);
    r.string("error_kind", e.error_kind);
    r.number("r", e.r);
    r.number("bv_theta", e.bv_theta);
    r.number("slope_tolerance", e.slope_tolerance);
    r.list("stopping_times", e.stopping_times);
    r.list("exit_radii", e.exit_radii);
    r.boolean("grid_doubling", e.grid_doubling);
    r.number("delta", e.delta);
    r.number("kappa", e.kappa);
    r.number("t", e.t);
    r.list("y_grid", e.y_grid);
    r.integer("order", e.order);
    r.finish();
    static const std::set<std::string> error_kinds{"stopped", "sup", "p-moment", "p-jensen", "bv"};
    if (!error_kinds.count(e.error_kind))
      throw ConfigError("experiment.error_kind", "unknown error kind '" + e.error_kind + "'");
    if (!(e.p >= 1.0)) throw ConfigError("experiment.p", "must be >= 1");
    if (!(e.r >= 1.0)) throw ConfigError("experiment.r", "must be >= 1");
    if (e.n <= 0) throw ConfigError("experiment.n", "must be positive");
    if (e.y_grid.size() != 3 || !(e.y_grid[2] >= 1.0) || e.y_grid[2] != std::floor(e.y_grid[2]))
      throw ConfigError("experiment.y_grid", "expected [lo, hi, points]");
    if (e.order < 0 || e.order > 2) throw ConfigError("experiment.order", "must be 0, 1 or 2");
  }

  if (top.has("numerics")) {
    ObjectReader r(top.raw("numerics"), "numerics");
    r.number("quadrature_tolerance", cfg.numerics.quadrature_tolerance);
    r.integer("quadrature_max_depth", cfg.numerics.quadrature_max_depth);
    r.number("truncation_radius", cfg.numerics.truncation_radius);
    r.integer("probe_pairs", cfg.numerics.probe_pairs);
    r.finish();
    if (!(cfg.numerics.quadrature_tolerance > 0.0)) throw ConfigError("numerics.quadrature_tolerance", "must be positive");
    if (cfg.numerics.quadrature_max_depth < 1) throw ConfigError("numerics.quadrature_max_depth", "must be >= 1");
    if (!(cfg.numerics.truncation_radius > 0.0)) throw ConfigError("numerics.truncation_radius", "must be positive");
  }

  if (top.has("output")) {
    ObjectReader r(top.raw("output"), "output");
    r.string("directory", cfg.output.directory);
    r.boolean("path_dump", cfg.output.path_dump);
    r.boolean("plot_script", cfg.output.plot_script);
    r.finish();
  }
  top.finish();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError("", "cannot read config file " + file.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
  ordered_json j;
  j["coefficients"]["drift"] = coefficient_to_json(cfg.coefficients.drift);
  j["coefficients"]["diffusion"] = coefficient_to_json(cfg.coefficients.diffusion);
  if (cfg.coefficients.drift_hat) j["coefficients"]["drift_hat"] = coefficient_to_json(*cfg.coefficients.drift_hat);
  if (cfg.coefficients.diffusion_hat)
    j["coefficients"]["diffusion_hat"] = coefficient_to_json(*cfg.coefficients.diffusion_hat);

  j["measure"]["x0"] = cfg.measure.x0;
  j["measure"]["T"] = cfg.measure.horizon;
  if (cfg.measure.lambda) j["measure"]["lambda"] = *cfg.measure.lambda;

  j["plan"]["steps"] = cfg.plan.steps;
  j["plan"]["paths"] = cfg.plan.paths;
  j["plan"]["seed"] = cfg.plan.seed;
  j["plan"]["noise_refinement"] = cfg.plan.noise_refinement;
  j["plan"]["record_full_paths"] = cfg.plan.record_full_paths;

  const auto& e = cfg.experiment;
  auto& je = j["experiment"];
  je["kind"] = e.kind;
  je["p"] = e.p;
  je["p_values"] = e.p_values;
  je["n_ladder"] = e.n_ladder;
  je["n"] = e.n;
  je["error_kind"] = e.error_kind;
  je["r"] = e.r;
  je["bv_theta"] = e.bv_theta;
  je["slope_tolerance"] = e.slope_tolerance;
  je["stopping_times"] = e.stopping_times;
  je["exit_radii"] = e.exit_radii;
  je["grid_doubling"] = e.grid_doubling;
  je["delta"] = e.delta;
  je["kappa"] = e.kappa;
  je["t"] = e.t;
  je["y_grid"] = e.y_grid;
  je["order"] = e.order;

  j["numerics"]["quadrature_tolerance"] = cfg.numerics.quadrature_tolerance;
  j["numerics"]["quadrature_max_depth"] = cfg.numerics.quadrature_max_depth;
  j["numerics"]["truncation_radius"] = cfg.numerics.truncation_radius;
  j["numerics"]["probe_pairs"] = cfg.numerics.probe_pairs;

  j["output"]["directory"] = cfg.output.directory;
  j["output"]["path_dump"] = cfg.output.path_dump;
  j["output"]["plot_script"] = cfg.output.plot_script;
  return j.dump(2);
}

void apply_tolerance_profile(ExperimentConfig& cfg, const std::string& profile) {
  auto& n = cfg.numerics;
  if (profile.empty() || profile == "default") return;
  if (profile == "strict") {
    n.quadrature_tolerance = 1e-14;
    n.quadrature_max_depth = 24;
    n.truncation_radius = 12.0;
    n.probe_pairs = 1000000;
  } else if (profile == "fast") {
    n.quadrature_tolerance = 1e-9;
    n.quadrature_max_depth = 16;
    n.truncation_radius = 8.0;
    n.probe_pairs = 10000;
  } else {
    throw ConfigError(kToleranceProfileEnv, "unknown tolerance profile '" + profile + "'");
  }
}

std::uint64_t fnv1a64(std::string_view data) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string manifest_json(const RunManifest& m) {
  char hash[19];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.config_hash));
  ordered_json j;
  j["tool_version"] = m.tool_version;
  j["command"] = m.command;
  j["config_hash"] = std::string("fnv1a64:") + hash;
  j["seed"] = m.seed;
  j["workers"] = m.workers;
  j["started_utc"] = m.started_utc;
  j["wall_seconds"] = m.wall_seconds;
  j["tolerance_profile"] = m.tolerance_profile;
  j["tolerances"] = m.tolerances;
  if (m.grid_doubling) {
    j["grid_doubling"] = {{"fine_steps", m.grid_doubling->fine_steps},
                          {"fine", m.grid_doubling->fine},
                          {"coarse", m.grid_doubling->coarse},
                          {"abs_change", m.grid_doubling->abs_change},
                          {"rel_change", m.grid_doubling->rel_change}};
  } else {
    j["grid_doubling"] = nullptr;
  }
  j["files"] = m.files;
  return j.dump(2);
}

OutputDirectory::OutputDirectory(std::filesystem::path dir) : dir_(std::move(dir)) {
  namespace fs = std::filesystem;
  fs::create_directories(dir_);
  const fs::path old = dir_ / kManifestName;
  if (!fs::exists(old)) return;
  std::ifstream is(old);
  try {
    const json j = json::parse(is);
    if (j.contains("files") && j["files"].is_array())
      for (const auto& f : j["files"])
        if (f.is_string()) {
          const fs::path p(f.get<std::string>());
          if (p.has_filename() && p.filename() == p) fs::remove(dir_ / p);
        }
  } catch (const json::exception&) {
  }
  fs::remove(old);
}

std::filesystem::path OutputDirectory::file(const std::string& name) {
  if (name == kManifestName) throw PreconditionError("reserved file name " + name);
  if (std::find(files_.begin(), files_.end(), name) == files_.end()) files_.push_back(name);
  return dir_ / name;
}

void OutputDirectory::write_manifest(RunManifest manifest) const {
  manifest.files = files_;
  std::ofstream os(dir_ / kManifestName);
  if (!os) throw std::runtime_error("cannot write manifest in " + dir_.string());
  os << manifest_json(manifest) << "\n";
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace sdestab
