#include "sdestab/sde_sim.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>

#include "sdestab/errors.hpp"
#include "sdestab/parallel.hpp"
#include "sdestab/rng.hpp"

namespace sdestab {

namespace {

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace

std::string StoppingRule::label() const {
  return kind == Kind::Deterministic ? "time=" + shortest(time) : "exit=" + shortest(radius);
}

BvFunction BvFunction::indicator(double theta) {
  return {"indicator(" + shortest(theta) + ")", [theta](double x) { return x >= theta ? 1.0 : 0.0; }, 1.0};
}

BvFunction BvFunction::constant(double c) {
  return {"constant(" + shortest(c) + ")", [c](double) { return c; }, 0.0};
}

void SimulationPlan::validate() const {
  if (steps < 2 || !std::has_single_bit(steps)) throw DomainError("SimulationPlan: steps must be a power of two >= 2");
  if (paths < 1) throw DomainError("SimulationPlan: paths must be >= 1");
  if (noise_refinement > 20) throw DomainError("SimulationPlan: noise_refinement too large");
  if (!(key_p >= 1.0)) throw DomainError("SimulationPlan: key_p must be >= 1");
  for (const auto& r : stopping) {
    if (r.kind == StoppingRule::Kind::Deterministic && !(r.time >= 0.0))
      throw DomainError("SimulationPlan: stopping time must be >= 0");
    if (r.kind == StoppingRule::Kind::Exit && !(r.radius > 0.0))
      throw DomainError("SimulationPlan: exit radius must be > 0");
  }
  if (record_full_paths) {
    const double bytes = 2.0 * 8.0 * static_cast<double>(paths) * static_cast<double>(steps + 1);
    if (bytes > static_cast<double>(full_path_budget_bytes))
      throw DomainError("SimulationPlan: full-path recording exceeds the memory budget");
  }
}

namespace {

std::vector<double> finite_only(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v)
    if (std::isfinite(x)) out.push_back(x);
  return out;
}

Estimate estimate_finite(const std::vector<double>& v) { return estimate_mean(finite_only(v)); }

// Grid index of a deterministic stopping time: first k with k h >= time, capped at N.
std::size_t stop_index(double time, double h, std::size_t steps) {
  if (!(time < static_cast<double>(steps) * h)) return steps;
  const double k = std::ceil(time / h - 1e-12);
  return std::min(steps, static_cast<std::size_t>(std::max(0.0, k)));
}

inline double em_step(double x, double drift, double diffusion, double h, double dw) noexcept {
  return x + drift * h + diffusion * dw;
}

}  // namespace

Estimate PathEnsemble::mean_terminal_error() const { return estimate_finite(terminal_error); }
Estimate PathEnsemble::mean_sup_error() const { return estimate_finite(sup_error); }

PathEnsemble simulate_pair(const SdePair& pair, const SimulationPlan& plan) {
  plan.validate();
  if (!(pair.horizon > 0.0)) throw DomainError("simulate_pair: T must be > 0");

  PathEnsemble e;
  e.paths = plan.paths;
  e.steps = plan.steps;
  e.x0 = pair.x0;
  e.horizon = pair.horizon;
  e.rules = plan.stopping;
  e.bv_functions = plan.bv;

  const std::size_t n = plan.paths;
  const std::size_t steps = plan.steps;
  if (plan.record_terminal) {
    e.terminal_x.assign(n, 0.0);
    e.terminal_xhat.assign(n, 0.0);
    e.terminal_error.assign(n, 0.0);
  }
  if (plan.record_sup) e.sup_error.assign(n, 0.0);
  e.stopped_error.assign(plan.stopping.size(), std::vector<double>(n, 0.0));
  e.bv_exact.assign(plan.bv.size(), std::vector<double>(n, 0.0));
  e.bv_perturbed.assign(plan.bv.size(), std::vector<double>(n, 0.0));
  if (plan.record_key_integrals) {
    e.key_drift.assign(n, 0.0);
    e.key_diffusion.assign(n, 0.0);
  }
  if (plan.record_full_paths) {
    e.full_x.assign(n * (steps + 1), 0.0);
    e.full_xhat.assign(n * (steps + 1), 0.0);
  }

  const double h = pair.horizon / static_cast<double>(steps);
  const std::size_t sub = std::size_t{1} << plan.noise_refinement;
  const double sqrt_fine_h = std::sqrt(h / static_cast<double>(sub));
  std::vector<std::size_t> deterministic_index(plan.stopping.size(), steps);
  for (std::size_t r = 0; r < plan.stopping.size(); ++r)
    if (plan.stopping[r].kind == StoppingRule::Kind::Deterministic)
      deterministic_index[r] = stop_index(plan.stopping[r].time, h, steps);

  const Coefficient& b = pair.exact.drift;
  const Coefficient& s = pair.exact.diffusion;
  const Coefficient& bh = pair.perturbed.drift;
  const Coefficient& sh = pair.perturbed.diffusion;
  const CounterNormals normals(plan.seed);
  const double kp = plan.key_p;
  std::vector<unsigned char> flagged(n, 0);

  parallel_for(n, plan.workers, [&](std::size_t i) {
    double x = pair.x0;
    double xh = pair.x0;
    double sup = 0.0;
    std::vector<char> stopped(plan.stopping.size(), 0);
    std::array<double, 2> cached{};
    std::uint64_t fine = 0;

    const auto key_terms = [&](double y, double& drift_term, double& diff_term) {
      const double db = std::abs(b.eval_unchecked(y) - bh.eval_unchecked(y));
      const double ds = std::abs(s.eval_unchecked(y) - sh.eval_unchecked(y));
      drift_term = kp == 1.0 ? db : std::pow(db, kp);
      diff_term = kp == 1.0 ? ds * ds : std::pow(ds, 2.0 * kp);
    };
    const auto observe = [&](std::size_t k) {
      const double err = std::abs(x - xh);
      sup = std::max(sup, err);
      for (std::size_t r = 0; r < plan.stopping.size(); ++r) {
        if (stopped[r]) continue;
        const auto& rule = plan.stopping[r];
        const bool fire = rule.kind == StoppingRule::Kind::Deterministic ? k == deterministic_index[r]
                                                                         : std::abs(x - pair.x0) >= rule.radius;
        if (fire || k == steps) {
          e.stopped_error[r][i] = err;
          stopped[r] = 1;
        }
      }
      if (plan.record_full_paths) {
        e.full_x[i * (steps + 1) + k] = x;
        e.full_xhat[i * (steps + 1) + k] = xh;
      }
      if (plan.record_key_integrals) {
        double dt;
        double st;
        key_terms(xh, dt, st);
        const double w = (k == 0 || k == steps) ? 0.5 * h : h;
        e.key_drift[i] += w * dt;
        e.key_diffusion[i] += w * st;
      }
    };

    observe(0);
    bool finite = true;
    for (std::size_t k = 0; k < steps; ++k) {
      double z = 0.0;
      for (std::size_t j = 0; j < sub; ++j, ++fine) {
        if ((fine & 1u) == 0) cached = normals.pair(i, fine >> 1);
        z += cached[fine & 1u];
      }
      const double dw = sqrt_fine_h * z;
      const double x_next = em_step(x, b.eval_unchecked(x), s.eval_unchecked(x), h, dw);
      const double xh_next = em_step(xh, bh.eval_unchecked(xh), sh.eval_unchecked(xh), h, dw);
      x = x_next;
      xh = xh_next;
      if (!std::isfinite(x) || !std::isfinite(xh)) {
        finite = false;
        break;
      }
      observe(k + 1);
    }

    if (!finite) {
      flagged[i] = 1;
      const double nan = std::numeric_limits<double>::quiet_NaN();
      if (plan.record_terminal) e.terminal_x[i] = e.terminal_xhat[i] = e.terminal_error[i] = nan;
      if (plan.record_sup) e.sup_error[i] = nan;
      for (auto& v : e.stopped_error) v[i] = nan;
      for (std::size_t f = 0; f < plan.bv.size(); ++f) e.bv_exact[f][i] = e.bv_perturbed[f][i] = nan;
      if (plan.record_key_integrals) e.key_drift[i] = e.key_diffusion[i] = nan;
      return;
    }
    if (plan.record_terminal) {
      e.terminal_x[i] = x;
      e.terminal_xhat[i] = xh;
      e.terminal_error[i] = std::abs(x - xh);
    }
    if (plan.record_sup) e.sup_error[i] = sup;
    for (std::size_t f = 0; f < plan.bv.size(); ++f) {
      e.bv_exact[f][i] = plan.bv[f].g(x);
      e.bv_perturbed[f][i] = plan.bv[f].g(xh);
    }
  });

  e.non_finite_paths = static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
  return e;
}

std::vector<double> stopped_error_samples(const PathEnsemble& e, const StoppingRule& rule) {
  for (std::size_t r = 0; r < e.rules.size(); ++r)
    if (e.rules[r] == rule) return e.stopped_error[r];
  if (e.full_x.empty()) throw PreconditionError("stopped_error: rule " + rule.label() + " was not recorded");

  const double h = e.horizon / static_cast<double>(e.steps);
  const std::size_t fixed = stop_index(rule.time, h, e.steps);
  std::vector<double> out(e.paths);
  for (std::size_t i = 0; i < e.paths; ++i) {
    const double* x = &e.full_x[i * (e.steps + 1)];
    const double* xh = &e.full_xhat[i * (e.steps + 1)];
    std::size_t k = e.steps;
    if (rule.kind == StoppingRule::Kind::Deterministic) {
      k = fixed;
    } else {
      for (std::size_t j = 0; j <= e.steps; ++j)
        if (std::abs(x[j] - e.x0) >= rule.radius) {
          k = j;
          break;
        }
    }
    out[i] = std::abs(x[k] - xh[k]);
  }
  return out;
}

Estimate stopped_error(const PathEnsemble& e, const StoppingRule& rule) {
  return estimate_finite(stopped_error_samples(e, rule));
}

Estimate pth_moment_sup_error(const PathEnsemble& e, double p) {
  if (!(p >= 1.0)) throw DomainError("pth_moment_sup_error: p must be >= 1");
  if (e.sup_error.empty()) throw PreconditionError("pth_moment_sup_error: sup recording was disabled");
  std::vector<double> v(e.sup_error.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = p == 1.0 ? e.sup_error[i] : std::pow(e.sup_error[i], p);
  return estimate_finite(v);
}

Estimate bv_error(const PathEnsemble& e, const std::string& name, double r) {
  if (!(r >= 1.0)) throw DomainError("bv_error: r must be >= 1");
  for (std::size_t f = 0; f < e.bv_functions.size(); ++f) {
    if (e.bv_functions[f].name != name) continue;
    std::vector<double> v(e.paths);
    for (std::size_t i = 0; i < e.paths; ++i) {
      const double d = std::abs(e.bv_exact[f][i] - e.bv_perturbed[f][i]);
      v[i] = r == 1.0 ? d : std::pow(d, r);
    }
    return estimate_finite(v);
  }
  throw PreconditionError("bv_error: function " + name + " was not recorded");
}

GridDoubling grid_doubling(const SdePair& pair, const SimulationPlan& plan,
                           const std::function<double(const PathEnsemble&)>& functional) {
  if (plan.steps < 4) throw DomainError("grid_doubling: need at least 4 steps");
  SimulationPlan coarse = plan;
  coarse.steps = plan.steps / 2;
  coarse.noise_refinement = plan.noise_refinement + 1;
  GridDoubling g;
  g.fine_steps = plan.steps;
  g.fine = functional(simulate_pair(pair, plan));
  g.coarse = functional(simulate_pair(pair, coarse));
  g.abs_change = std::abs(g.fine - g.coarse);
  g.rel_change = g.fine != 0.0 ? g.abs_change / std::abs(g.fine) : (g.abs_change == 0.0 ? 0.0 : INFINITY);
  return g;
}

namespace {

constexpr char kMagic[8] = {'S', 'D', 'E', 'P', 'A', 'T', 'H', 'S'};
constexpr std::uint32_t kDumpVersion = 1;

template <class T>
void put_le(std::ostream& os, T v) {
  unsigned char bytes[sizeof(T)];
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <class T>
T get_le(std::istream& is) {
  unsigned char bytes[sizeof(T)];
  is.read(reinterpret_cast<char*>(bytes), sizeof(T));
  if (!is) throw std::runtime_error("path dump: truncated header");
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(bytes[i]) << (8 * i);
  return v;
}

}  // namespace

void write_path_dump(const PathEnsemble& e, const std::string& file) {
  if (e.full_x.empty()) throw PreconditionError("write_path_dump: full paths were not recorded");
  std::ofstream os(file, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + file);
  os.write(kMagic, sizeof(kMagic));
  put_le<std::uint32_t>(os, kDumpVersion);
  put_le<std::uint64_t>(os, e.paths);
  put_le<std::uint64_t>(os, e.steps);
  const std::size_t len = e.steps + 1;
  for (std::size_t i = 0; i < e.paths; ++i) {
    for (std::size_t k = 0; k < len; ++k) put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(e.full_x[i * len + k]));
    for (std::size_t k = 0; k < len; ++k)
      put_le<std::uint64_t>(os, std::bit_cast<std::uint64_t>(e.full_xhat[i * len + k]));
  }
  if (!os) throw std::runtime_error("write failed: " + file);
}

PathDumpHeader read_path_dump_header(const std::string& file) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + file);
  char magic[8];
  is.read(magic, sizeof(magic));
  if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw std::runtime_error("path dump: bad magic");
  PathDumpHeader h;
  h.version = get_le<std::uint32_t>(is);
  h.paths = get_le<std::uint64_t>(is);
  h.steps = get_le<std::uint64_t>(is);
  return h;
}

}  // namespace sdestab
