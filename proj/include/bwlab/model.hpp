// bwlab: Bouc-Wen class hysteresis toolkit
//
// m-BWBN constitutive law: resisting force, evolution of the hysteretic
// variable z and of the normalized cumulative hysteretic energy eps_n, and
// quasi-static integration under prescribed displacement.
//
// Units are SI throughout (m, s, m/s^2); forces are per unit mass. eps_n is
// the literal integral of (1 - alpha) * Fy * z du with Fy in m/s^2, so it
// carries m^2/s^2 even though it is called "normalized".
//
#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "bwlab/errors.hpp"
#include "bwlab/params.hpp"

namespace bwlab {

struct HystereticState {
  double u = 0.0;      // displacement [m]
  double z = 0.0;      // hysteretic variable
  double eps_n = 0.0;  // cumulative hysteretic energy
  double f_s = 0.0;    // resisting force per unit mass [m/s^2]
};

struct AuxiliaryValues {
  double eta = 1.0;    // stiffness degradation
  double nu = 1.0;     // strength degradation
  double h = 1.0;      // pinching
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double z_u = 1.0;    // ultimate |z|
};

struct HysteresisCurve {
  std::vector<double> u;  // [m]
  std::vector<double> f;  // [m/s^2]

  std::size_t size() const { return u.size(); }
  bool empty() const { return u.empty(); }
};

constexpr double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

inline AuxiliaryValues evaluate_auxiliary(const BwParams& p, double z, double eps_n, double sign_du) {
  if (!(p.n > 0.0)) throw DomainError("yield sharpness n must be positive");
  AuxiliaryValues a;
  a.eta = 1.0 + p.delta_eta * eps_n;
  a.nu = 1.0 + p.delta_nu * eps_n;
  if (!(a.nu > 0.0)) throw DomainError("strength degradation factor nu must be positive");
  a.z_u = std::pow(1.0 / (a.nu * (p.beta + p.gamma())), 1.0 / p.n);
  a.zeta1 = p.zeta0 * (1.0 - std::exp(-p.p * eps_n));
  a.zeta2 = (p.psi + p.delta_psi * eps_n) * (p.lambda + a.zeta1);
  if (a.zeta1 == 0.0) {
    a.h = 1.0;
  } else {
    const double d = z * sign_du - p.q * a.z_u;
    a.h = 1.0 - a.zeta1 * std::exp(-(d * d) / (a.zeta2 * a.zeta2));
  }
  return a;
}

inline double resisting_force(const BwParams& p, double u, double z) {
  return p.alpha * p.k0() * u + (1.0 - p.alpha) * p.fy_si() * z;
}

struct StateRates {
  double z_rate = 0.0;
  double eps_rate = 0.0;
};

/// Rates of z and eps_n per unit displacement for a monotone displacement
/// increment of direction sign_du. Multiplying by u_dot gives time rates.
inline StateRates displacement_rates(const BwParams& p, double z, double eps_n, double sign_du) {
  if (sign_du == 0.0) return {};
  const AuxiliaryValues a = evaluate_auxiliary(p, z, eps_n, sign_du);
  const double shape = p.beta * sign_of(sign_du * z) + p.gamma();
  const double bracket = 1.0 - std::pow(std::abs(z), p.n) * shape * a.nu;
  StateRates r;
  r.z_rate = (a.h / a.eta) * bracket / p.uy();
  r.eps_rate = (1.0 - p.alpha) * p.fy_si() * z;
  return r;
}

/// Time rates (dz/dt, d eps_n/dt) for velocity u_dot.
inline StateRates state_rates(const BwParams& p, const HystereticState& s, double u_dot) {
  if (u_dot == 0.0) return {};
  const StateRates d = displacement_rates(p, s.z, s.eps_n, sign_of(u_dot));
  return {d.z_rate * u_dot, d.eps_rate * u_dot};
}

inline constexpr int kDefaultSubsteps = 4;

/// Advances the state over a displacement increment with classical RK4 on
/// sub-increments of equal size. The loading direction is held at the sign
/// of delta_u for the whole increment.
inline HystereticState step_quasi_static(const BwParams& p, const HystereticState& s, double delta_u,
                                         int substeps = kDefaultSubsteps, std::size_t step_index = 0) {
  if (substeps < 1) throw DomainError("substeps must be >= 1");
  if (delta_u == 0.0) return s;
  const double dir = sign_of(delta_u);
  const double h = delta_u / substeps;
  double z = s.z;
  double e = s.eps_n;
  // A blown-up stage is an integration failure, not a parameter error.
  auto rates = [&](double zs, double es) {
    if (!std::isfinite(zs) || !std::isfinite(es)) throw IntegrationError(step_index, "non-finite hysteretic state");
    return displacement_rates(p, zs, es, dir);
  };
  for (int k = 0; k < substeps; ++k) {
    const StateRates k1 = rates(z, e);
    const StateRates k2 = rates(z + 0.5 * h * k1.z_rate, e + 0.5 * h * k1.eps_rate);
    const StateRates k3 = rates(z + 0.5 * h * k2.z_rate, e + 0.5 * h * k2.eps_rate);
    const StateRates k4 = rates(z + h * k3.z_rate, e + h * k3.eps_rate);
    z += h / 6.0 * (k1.z_rate + 2.0 * k2.z_rate + 2.0 * k3.z_rate + k4.z_rate);
    e += h / 6.0 * (k1.eps_rate + 2.0 * k2.eps_rate + 2.0 * k3.eps_rate + k4.eps_rate);
  }
  HystereticState out;
  out.u = s.u + delta_u;
  out.z = z;
  out.eps_n = e;
  out.f_s = resisting_force(p, out.u, z);
  if (!std::isfinite(out.z) || !std::isfinite(out.eps_n) || !std::isfinite(out.f_s))
    throw IntegrationError(step_index, "non-finite hysteretic state");
  return out;
}

/// Runs the displacement series from rest. The first increment is taken from
/// u = 0 to displacements[0]; output has one (u, f) pair per input value.
inline HysteresisCurve simulate_quasi_static(const BwParams& p, std::span<const double> displacements,
                                             int substeps = kDefaultSubsteps,
                                             std::vector<HystereticState>* states = nullptr) {
  HysteresisCurve c;
  c.u.reserve(displacements.size());
  c.f.reserve(displacements.size());
  if (states) states->clear();
  HystereticState s;
  for (std::size_t i = 0; i < displacements.size(); ++i) {
    const double target = displacements[i];
    if (!std::isfinite(target)) throw IntegrationError(i, "non-finite displacement input");
    s = step_quasi_static(p, s, target - s.u, substeps, i);
    s.u = target;
    s.f_s = resisting_force(p, s.u, s.z);
    c.u.push_back(s.u);
    c.f.push_back(s.f_s);
    if (states) states->push_back(s);
  }
  return c;
}

}  // namespace bwlab
