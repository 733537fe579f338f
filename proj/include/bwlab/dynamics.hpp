// bwlab: Bouc-Wen class hysteresis toolkit
//
// SDOF oscillator with an m-BWBN restoring force: ground motions, pushover,
// yield displacement by the two-line rule, Newmark time-history analysis and
// spectral acceleration.
//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bwlab/errors.hpp"
#include "bwlab/io.hpp"
#include "bwlab/loading.hpp"
#include "bwlab/model.hpp"
#include "bwlab/params.hpp"
#include "bwlab/random.hpp"

namespace bwlab {

// ---------------------------------------------------------------------------
// Ground motions

struct GroundMotion {
  double dt = 0.01;            // [s]
  std::vector<double> accel;   // base acceleration [g]
  std::string label;

  double duration() const { return accel.empty() ? 0.0 : dt * static_cast<double>(accel.size() - 1); }

  GroundMotion scaled(double c) const {
    GroundMotion g = *this;
    for (double& a : g.accel) a *= c;
    return g;
  }
};

inline void validate(const GroundMotion& g) {
  if (!(g.dt > 0.0)) throw DomainError("ground motion dt must be positive");
  if (g.accel.size() < 2) throw DomainError("ground motion needs at least two samples");
  for (double a : g.accel)
    if (!std::isfinite(a)) throw DomainError("ground motion contains non-finite values");
}

/// Two-column text (t, a_g in g). A sidecar `<file>.json` with
/// {"label", "dt", "units"} is used to validate the sampling interval.
inline GroundMotion read_ground_motion(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::vector<double> t, a;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    double ti = 0.0, ai = 0.0;
    if (!(ls >> ti >> ai)) throw DomainError(path.string() + ": malformed line '" + line + "'");
    t.push_back(ti);
    a.push_back(ai);
  }
  if (t.size() < 2) throw DomainError(path.string() + ": fewer than two samples");
  GroundMotion g;
  g.dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  for (std::size_t i = 1; i < t.size(); ++i)
    if (std::abs((t[i] - t[i - 1]) - g.dt) > 1e-6 * g.dt + 1e-9)
      throw DomainError(path.string() + ": non-uniform time step");
  g.accel = std::move(a);
  g.label = path.stem().string();
  std::filesystem::path side = path;
  side += ".json";
  if (std::filesystem::exists(side)) {
    const nlohmann::json j = read_json(side);
    if (j.contains("units") && j["units"] != "g") throw DomainError(side.string() + ": units must be \"g\"");
    if (j.contains("dt") && std::abs(j["dt"].get<double>() - g.dt) > 1e-6 * g.dt)
      throw DomainError(side.string() + ": dt does not match the record");
    g.label = j.value("label", g.label);
  }
  validate(g);
  return g;
}

inline void write_ground_motion(const std::filesystem::path& path, const GroundMotion& g) {
  std::string s;
  for (std::size_t i = 0; i < g.accel.size(); ++i)
    s += fmt9(g.dt * static_cast<double>(i)) + " " + fmt9(g.accel[i]) + "\n";
  write_text(path, s);
  std::filesystem::path side = path;
  side += ".json";
  write_json(side, {{"label", g.label}, {"dt", g.dt}, {"units", "g"}, {"npts", g.accel.size()}});
}

// ---------------------------------------------------------------------------
// Linear SDOF (spectral acceleration, filters)

/// Relative displacement of a linear SDOF (u'' + 2 xi w u' + w^2 u = -a)
/// under acceleration samples a (m/s^2) at step h, Newmark average acceleration.
inline std::vector<double> linear_sdof_response(double omega, double xi, const std::vector<double>& a, double h) {
  const double c = 2.0 * xi * omega, k = omega * omega;
  const double keff = k + 2.0 * c / h + 4.0 / (h * h);
  std::vector<double> u(a.size(), 0.0);
  double ui = 0.0, vi = 0.0, ai = a.empty() ? 0.0 : -a[0];
  for (std::size_t i = 1; i < a.size(); ++i) {
    const double peff = -a[i] + (4.0 / (h * h)) * ui + (4.0 / h) * vi + ai + c * ((2.0 / h) * ui + vi);
    const double un = peff / keff;
    const double vn = (2.0 / h) * (un - ui) - vi;
    const double an = (4.0 / (h * h)) * (un - ui) - (4.0 / h) * vi - ai;
    ui = un;
    vi = vn;
    ai = an;
    u[i] = un;
  }
  return u;
}

/// Ground motion resampled at n equal sub-steps per record step, in m/s^2.
inline std::vector<double> resample_accel(const GroundMotion& g, std::size_t sub) {
  std::vector<double> out;
  out.reserve((g.accel.size() - 1) * sub + 1);
  for (std::size_t i = 0; i + 1 < g.accel.size(); ++i)
    for (std::size_t s = 0; s < sub; ++s) {
      const double w = static_cast<double>(s) / static_cast<double>(sub);
      out.push_back(((1.0 - w) * g.accel[i] + w * g.accel[i + 1]) * kGravity);
    }
  out.push_back(g.accel.back() * kGravity);
  return out;
}

/// Peak pseudo-acceleration omega^2 max|u| of a linear SDOF, in g.
inline double spectral_acceleration(const GroundMotion& g, double period, double damping = 0.05) {
  if (!(period > 0.0)) throw DomainError("spectral acceleration period must be positive");
  validate(g);
  const double omega = 2.0 * std::numbers::pi / period;
  const auto sub = static_cast<std::size_t>(std::max(1.0, std::ceil(g.dt / (period / 100.0))));
  const std::vector<double> a = resample_accel(g, sub);
  const std::vector<double> u = linear_sdof_response(omega, damping, a, g.dt / static_cast<double>(sub));
  double peak = 0.0;
  for (double x : u) peak = std::max(peak, std::abs(x));
  return omega * omega * peak / kGravity;
}

/// Kanai-Tajimi filtered white noise under a rise-plateau-decay envelope,
/// scaled to the requested peak ground acceleration (g).
struct SyntheticMotionSpec {
  double duration = 20.0;
  double dt = 0.01;
  double pga = 0.3;
  double ground_frequency = 15.6;  // rad/s
  double ground_damping = 0.6;
  EnvelopeShape envelope{0.15, 0.4, 3.0};
  std::uint64_t seed = 0;
  std::string label = "SYN";
};

inline GroundMotion synthetic_ground_motion(const SyntheticMotionSpec& s) {
  if (!(s.duration > 0.0) || !(s.dt > 0.0) || !(s.pga > 0.0)) throw DomainError("invalid synthetic motion spec");
  const auto n = static_cast<std::size_t>(std::llround(s.duration / s.dt)) + 1;
  Rng rng = make_rng(s.seed, {0x5eed});
  std::vector<double> w(n);
  for (double& x : w) x = standard_normal(rng);
  // Filter: x'' + 2 zg wg x' + wg^2 x = -w; output a = -(2 zg wg x' + wg^2 x) = x'' + w.
  const double wg = s.ground_frequency, zg = s.ground_damping;
  const std::vector<double> x = linear_sdof_response(wg, zg, w, s.dt);
  GroundMotion g;
  g.dt = s.dt;
  g.label = s.label;
  g.accel.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double xd = i == 0 ? 0.0 : (x[i] - x[i - 1]) / s.dt;
    const double raw = -(2.0 * zg * wg * xd + wg * wg * x[i]);
    g.accel[i] = raw * envelope_value(s.envelope, static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.accel.front() = 0.0;
  g.accel.back() = 0.0;
  double peak = 0.0;
  for (double a : g.accel) peak = std::max(peak, std::abs(a));
  for (double& a : g.accel) a *= s.pga / peak;
  return g;
}

// ---------------------------------------------------------------------------
// Pushover and yield displacement

struct PushoverCurve {
  std::vector<double> u;  // [m], strictly increasing, starts at 0
  std::vector<double> f;  // [m/s^2]
};

inline PushoverCurve pushover(const BwParams& p, double max_drift, double step, int substeps = kDefaultSubsteps) {
  if (!(step > 0.0)) throw DomainError("pushover step must be positive");
  if (!(max_drift > 0.0)) throw DomainError("pushover drift must be positive");
  PushoverCurve c{{0.0}, {0.0}};
  HystereticState s;
  const std::size_t n = detail::segment_steps(max_drift, step);
  for (std::size_t k = 1; k <= n; ++k) {
    const double target = k == n ? max_drift : step * static_cast<double>(k);
    s = step_quasi_static(p, s, target - s.u, substeps, k);
    s.u = target;
    s.f_s = resisting_force(p, s.u, s.z);
    c.u.push_back(s.u);
    c.f.push_back(s.f_s);
  }
  return c;
}

inline CsvTable pushover_table(const PushoverCurve& c) {
  CsvTable t{{"u_m", "f_mps2"}, {}};
  for (std::size_t i = 0; i < c.u.size(); ++i) t.rows.push_back({fmt9(c.u[i]), fmt9(c.f[i])});
  return t;
}

inline PushoverCurve pushover_from_table(const CsvTable& t) {
  PushoverCurve c{t.numeric_column("u_m"), t.numeric_column("f_mps2")};
  for (std::size_t i = 1; i < c.u.size(); ++i)
    if (!(c.u[i] > c.u[i - 1])) throw DomainError("pushover displacements must be strictly increasing");
  return c;
}

/// Two-line rule: intersection of the initial-stiffness line through the
/// origin with the tangent at the point of lowest positive tangential slope.
inline double yield_displacement(const PushoverCurve& c) {
  if (c.u.size() < 3 || c.u.size() != c.f.size()) throw DomainError("pushover curve needs at least 3 points");
  for (std::size_t i = 1; i < c.u.size(); ++i)
    if (!(c.u[i] > c.u[i - 1])) throw DomainError("pushover displacements must be strictly increasing");
  const double k_init = (c.f[1] - c.f[0]) / (c.u[1] - c.u[0]);
  if (!(k_init > 0.0)) throw DomainError("pushover curve has no positive initial slope");
  // Line through the origin with slope k_init, shifted if the curve does not start at (0, 0).
  const double f_at0 = c.f[0] - k_init * c.u[0];
  std::size_t best = 0;
  double best_slope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < c.u.size(); ++i) {
    const double s = (c.f[i + 1] - c.f[i]) / (c.u[i + 1] - c.u[i]);
    if (s > 0.0 && s < best_slope) {
      best_slope = s;
      best = i;
    }
  }
  if (!std::isfinite(best_slope)) throw DomainError("no yield detected: no positive tangential slope");
  if (k_init - best_slope <= 1e-6 * k_init) throw DomainError("no yield detected: tangent parallel to initial stiffness");
  return (c.f[best] - best_slope * c.u[best] - f_at0) / (k_init - best_slope);
}

// ---------------------------------------------------------------------------
// Nonlinear time-history analysis

struct NewmarkSettings {
  double tolerance = 1e-8;  // relative to the force scale of the step
  int max_iterations = 50;
  double substep_per_uy = 0.1 / kDefaultSubsteps;  // RK4 resolution of z, in u_y
};

struct Response {
  std::vector<double> t, u, v, a, z, eps_n;
  double peak_u = 0.0;
};

/// u'' + 2 xi w u' + f_s(u, z) = -a_g(t), Newmark average acceleration with a
/// safeguarded Newton iteration on the displacement increment. z and eps_n
/// follow the displacement path through RK4 within each step.
inline Response time_history(const BwParams& p, const GroundMotion& gm, double damping = 0.05,
                             std::optional<double> dt_sub = std::nullopt, const NewmarkSettings& ns = {}) {
  validate(gm);
  if (!(damping >= 0.0)) throw DomainError("damping must be non-negative");
  const double h_req = dt_sub.value_or(gm.dt);
  if (!(h_req > 0.0) || h_req > gm.dt * (1.0 + 1e-12)) throw DomainError("dt_sub must be in (0, gm.dt]");
  const auto sub = static_cast<std::size_t>(std::ceil(gm.dt / h_req - 1e-9));
  const double h = gm.dt / static_cast<double>(sub);
  const std::vector<double> ag = resample_accel(gm, sub);

  const double omega = 2.0 * std::numbers::pi / p.T;
  const double c = 2.0 * damping * omega;
  const double k0 = p.k0(), uy = p.uy(), fy = p.fy_si();
  const double a4 = 4.0 / (h * h), a2 = 2.0 / h;

  Response r;
  const std::size_t n = ag.size();
  for (auto* v : {&r.t, &r.u, &r.v, &r.a, &r.z, &r.eps_n}) v->reserve(n);
  HystereticState s;
  double v0 = 0.0, acc0 = -ag[0];
  auto record = [&](std::size_t i) {
    r.t.push_back(h * static_cast<double>(i));
    r.u.push_back(s.u);
    r.v.push_back(v0);
    r.a.push_back(acc0);
    r.z.push_back(s.z);
    r.eps_n.push_back(s.eps_n);
    r.peak_u = std::max(r.peak_u, std::abs(s.u));
  };
  record(0);

  for (std::size_t i = 1; i < n; ++i) {
    const double p1 = -ag[i];
    auto advance = [&](double du) {
      const int nsub = std::max(kDefaultSubsteps, static_cast<int>(std::ceil(std::abs(du) / (ns.substep_per_uy * uy))));
      return step_quasi_static(p, s, du, std::min(nsub, 100000), i);
    };
    auto residual = [&](double du, HystereticState& out) {
      out = advance(du);
      const double v1 = a2 * du - v0;
      const double acc1 = a4 * du - 2.0 * a2 * v0 - acc0;
      return acc1 + c * v1 + out.f_s - p1;
    };
    auto tangent = [&](double du, const HystereticState& st) {
      const double dir = du != 0.0 ? sign_of(du) : (v0 != 0.0 ? sign_of(v0) : 1.0);
      const double dz = displacement_rates(p, st.z, st.eps_n, dir).z_rate;
      return a4 + c * a2 + p.alpha * k0 + (1.0 - p.alpha) * fy * dz;
    };
    const double scale = std::max({fy, std::abs(p1), std::abs(acc0), 1e-12});
    const double tol = ns.tolerance * scale;

    HystereticState st;
    double du = (p1 + 2.0 * a2 * v0 + acc0 + c * v0 - s.f_s) / std::max(tangent(0.0, s), a4);
    double res = residual(du, st);
    // Bracket [lo, hi] with R(lo) < 0 < R(hi); R is dominated by the inertia term.
    double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
    bool converged = std::abs(res) <= tol;
    for (int it = 0; it < ns.max_iterations && !converged; ++it) {
      if (res > 0.0) hi = std::min(hi, du);
      else lo = std::max(lo, du);
      const double kt = tangent(du, st);
      double next = du - res / (kt > 0.0 ? kt : a4);
      if (std::isfinite(lo) && std::isfinite(hi)) {
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (hi - lo <= 1e-15 * (std::abs(s.u) + uy)) {
          du = 0.5 * (lo + hi);
          res = residual(du, st);
          converged = true;
          break;
        }
      }
      du = next;
      res = residual(du, st);
      converged = std::abs(res) <= tol;
    }
    if (!converged) throw DomainError("Newton iteration did not converge at time index " + std::to_string(i));

    const double v1 = a2 * du - v0;
    const double acc1 = a4 * du - 2.0 * a2 * v0 - acc0;
    s = st;
    v0 = v1;
    acc0 = acc1;
    record(i);
  }
  return r;
}

inline CsvTable response_table(const Response& r) {
  CsvTable t{{"t", "u", "v", "a", "z", "eps_n"}, {}};
  for (std::size_t i = 0; i < r.t.size(); ++i)
    t.rows.push_back({fmt9(r.t[i]), fmt9(r.u[i]), fmt9(r.v[i]), fmt9(r.a[i]), fmt9(r.z[i]), fmt9(r.eps_n[i])});
  return t;
}

}  // namespace bwlab
