// bwlab: Bouc-Wen class hysteresis toolkit
//
// Parameter distributions, u_y perturbation, force noise and min-max scaling.
//
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "bwlab/errors.hpp"
#include "bwlab/model.hpp"
#include "bwlab/params.hpp"
#include "bwlab/random.hpp"

namespace bwlab {

struct Marginal {
  enum class Kind { Uniform, TruncatedNormal };
  Kind kind = Kind::Uniform;
  double mean = 0.0;  // unused for Uniform
  double sd = 0.0;    // unused for Uniform
  double lo = 0.0;
  double hi = 0.0;
};

inline constexpr std::size_t kNumIndependent = 7;  // BSC + DGD
inline constexpr std::size_t kNumPinching = 6;

struct JointNormal {
  std::array<double, kNumPinching> mean{};
  std::array<std::array<double, kNumPinching>, kNumPinching> covariance{};
  std::array<double, kNumPinching> lo{};
  std::array<double, kNumPinching> hi{};
};

/// Sampling model for the 13 parameters: independent marginals for the
/// BSC and DGD groups and a truncated joint normal for the PCH group.
struct ParamDistributions {
  std::array<Marginal, kNumIndependent> marginals{};
  JointNormal pinching{};
};

/// Shipped preset. Uniform for T, Fy, beta, n; truncated normals for alpha
/// and the degradation rates and a diagonal joint normal for pinching, all
/// with mean at one third of the range and sd at a quarter of it.
/// These hyperparameters are placeholders, not fitted values.
inline ParamDistributions default_distributions() {
  ParamDistributions d;
  for (std::size_t i = 0; i < kNumIndependent; ++i) {
    const ParamBound& b = kBounds[i];
    const auto id = static_cast<ParamId>(i);
    const bool normal = id == ParamId::alpha || id == ParamId::delta_nu || id == ParamId::delta_eta;
    Marginal m;
    m.kind = normal ? Marginal::Kind::TruncatedNormal : Marginal::Kind::Uniform;
    m.lo = b.lo;
    m.hi = b.hi;
    if (normal) {
      m.mean = b.lo + (b.hi - b.lo) / 3.0;
      m.sd = (b.hi - b.lo) / 4.0;
    }
    d.marginals[i] = m;
  }
  for (std::size_t j = 0; j < kNumPinching; ++j) {
    const ParamBound& b = kBounds[kNumIndependent + j];
    d.pinching.lo[j] = b.lo;
    d.pinching.hi[j] = b.hi;
    d.pinching.mean[j] = b.lo + (b.hi - b.lo) / 3.0;
    const double sd = (b.hi - b.lo) / 4.0;
    d.pinching.covariance[j][j] = sd * sd;
  }
  return d;
}

/// Lower-triangular factor of a symmetric positive semi-definite matrix.
/// Zero pivots (within tolerance) produce zero columns.
inline std::array<std::array<double, kNumPinching>, kNumPinching> psd_cholesky(
    const std::array<std::array<double, kNumPinching>, kNumPinching>& a) {
  constexpr std::size_t n = kNumPinching;
  std::array<std::array<double, n>, n> l{};
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a[i][i]));
  const double tol = 1e-12 * std::max(scale, 1e-300);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= l[j][k] * l[j][k];
    if (d < -tol) throw DomainError("covariance is not positive semi-definite");
    if (d <= tol) continue;
    l[j][j] = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= l[i][k] * l[j][k];
      l[i][j] = s / l[j][j];
    }
  }
  // Skipped pivots are only valid when L L^T still reproduces A.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += l[i][k] * l[j][k];
      if (std::abs(s - a[i][j]) > 1e-9 * std::max(scale, 1e-300))
        throw DomainError("covariance is not positive semi-definite");
    }
  return l;
}

inline void validate(const ParamDistributions& d) {
  auto inside = [](double lo, double hi, const ParamBound& b) {
    return lo <= hi && lo >= b.lo && hi <= b.hi;
  };
  for (std::size_t i = 0; i < kNumIndependent; ++i) {
    const Marginal& m = d.marginals[i];
    if (!inside(m.lo, m.hi, kBounds[i]))
      throw ConfigError("distribution bounds for " + std::string(kBounds[i].name) + " outside admissible range");
    if (m.kind == Marginal::Kind::TruncatedNormal && !(m.sd >= 0.0))
      throw ConfigError("negative sd for " + std::string(kBounds[i].name));
  }
  for (std::size_t j = 0; j < kNumPinching; ++j) {
    if (!inside(d.pinching.lo[j], d.pinching.hi[j], kBounds[kNumIndependent + j]))
      throw ConfigError("distribution bounds for " + std::string(kBounds[kNumIndependent + j].name) +
                        " outside admissible range");
    for (std::size_t k = 0; k < kNumPinching; ++k)
      if (d.pinching.covariance[j][k] != d.pinching.covariance[k][j])
        throw ConfigError("pinching covariance is not symmetric");
  }
  try {
    (void)psd_cholesky(d.pinching.covariance);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("pinching ") + e.what());
  }
}

inline BwParams sample_params(const ParamDistributions& d, Variant variant, Rng& rng) {
  BwParams p;
  for (std::size_t i = 0; i < kNumIndependent; ++i) {
    const Marginal& m = d.marginals[i];
    p[static_cast<ParamId>(i)] = m.kind == Marginal::Kind::Uniform
                                     ? uniform(rng, m.lo, m.hi)
                                     : truncated_normal(rng, m.mean, m.sd, m.lo, m.hi);
  }
  const auto chol = psd_cholesky(d.pinching.covariance);
  const JointNormal& j = d.pinching;
  std::array<double, kNumPinching> x{};
  bool accepted = false;
  for (int attempt = 0; attempt < kMaxRejections && !accepted; ++attempt) {
    std::array<double, kNumPinching> xi{};
    for (double& v : xi) v = standard_normal(rng);
    accepted = true;
    for (std::size_t r = 0; r < kNumPinching; ++r) {
      double v = j.mean[r];
      for (std::size_t c = 0; c <= r; ++c) v += chol[r][c] * xi[c];
      if (j.lo[r] == j.hi[r]) v = j.lo[r];
      x[r] = v;
      if (v < j.lo[r] || v > j.hi[r]) accepted = false;
    }
  }
  if (!accepted) throw DomainError("pinching joint normal: rejection cap exceeded");
  for (std::size_t r = 0; r < kNumPinching; ++r) p[static_cast<ParamId>(kNumIndependent + r)] = x[r];
  return apply_mask(p, variant);
}

inline BwParams sample_params(const ParamDistributions& d, Variant variant, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_params(d, variant, rng);
}

inline constexpr double kUyCov = 0.10;

/// Noisy yield displacement: Normal(u_y, cov * u_y), non-positive draws rejected.
inline double perturb_uy(double u_y, Rng& rng, double cov = kUyCov) {
  if (!(u_y > 0.0)) throw DomainError("u_y must be positive");
  if (cov == 0.0) return u_y;
  for (int i = 0; i < kMaxRejections; ++i) {
    const double x = u_y + cov * u_y * standard_normal(rng);
    if (x > 0.0) return x;
  }
  throw DomainError("perturb_uy: rejection cap exceeded");
}

/// Multiplicative Gaussian noise on each force value: f -> f (1 + e), e ~ N(0, cov).
inline HysteresisCurve add_force_noise(HysteresisCurve c, double cov, Rng& rng) {
  if (!(cov >= 0.0)) throw DomainError("noise coefficient of variation must be non-negative");
  if (cov == 0.0) return c;
  for (double& f : c.f) f *= 1.0 + cov * standard_normal(rng);
  return c;
}

inline double minmax_normalize(double v, double lo, double hi) {
  if (!(hi > lo)) throw DomainError("min-max range must satisfy hi > lo");
  return (v - lo) / (hi - lo);
}

inline double minmax_denormalize(double x, double lo, double hi) {
  if (!(hi > lo)) throw DomainError("min-max range must satisfy hi > lo");
  return lo + x * (hi - lo);
}

inline std::vector<double> minmax_normalize(std::span<const double> v, double lo, double hi) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = minmax_normalize(v[i], lo, hi);
  return out;
}

inline std::vector<double> minmax_denormalize(std::span<const double> v, double lo, double hi) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = minmax_denormalize(v[i], lo, hi);
  return out;
}

// ---------------------------------------------------------------------------
// JSON preset

inline nlohmann::json to_json(const ParamDistributions& d) {
  nlohmann::json j;
  j["preset_version"] = 1;
  for (std::size_t i = 0; i < kNumIndependent; ++i) {
    const Marginal& m = d.marginals[i];
    nlohmann::json e;
    if (m.kind == Marginal::Kind::Uniform) {
      e = {{"kind", "uniform"}, {"lo", m.lo}, {"hi", m.hi}};
    } else {
      e = {{"kind", "truncated_normal"}, {"mean", m.mean}, {"sd", m.sd}, {"lo", m.lo}, {"hi", m.hi}};
    }
    j["marginals"][std::string(kBounds[i].name)] = e;
  }
  nlohmann::json cov = nlohmann::json::array();
  for (const auto& row : d.pinching.covariance) cov.push_back(row);
  j["pinching"] = {{"mean", d.pinching.mean}, {"covariance", cov}, {"lo", d.pinching.lo}, {"hi", d.pinching.hi}};
  return j;
}

namespace detail {

inline void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) throw ConfigError(where + ": unknown key '" + it.key() + "'");
  }
}

template <std::size_t N>
void read_array(const nlohmann::json& j, std::array<double, N>& out, const std::string& where) {
  if (!j.is_array() || j.size() != N) throw ConfigError(where + ": expected array of " + std::to_string(N));
  for (std::size_t i = 0; i < N; ++i) out[i] = j[i].get<double>();
}

}  // namespace detail

/// Applies a (possibly partial) JSON preset on top of `base`.
inline ParamDistributions distributions_from_json(const nlohmann::json& j,
                                                  ParamDistributions base = default_distributions()) {
  try {
    detail::reject_unknown(j, {"preset_version", "marginals", "pinching"}, "distributions");
    if (j.contains("preset_version") && j["preset_version"].get<int>() != 1)
      throw ConfigError("distributions: unsupported preset_version");
    if (j.contains("marginals")) {
      const auto& m = j["marginals"];
      if (!m.is_object()) throw ConfigError("distributions.marginals: expected an object");
      for (auto it = m.begin(); it != m.end(); ++it) {
        const auto id = static_cast<std::size_t>(param_id(it.key()));
        if (id >= kNumIndependent)
          throw ConfigError("distributions.marginals: '" + it.key() + "' belongs to the pinching joint");
        const std::string where = "distributions.marginals." + it.key();
        detail::reject_unknown(*it, {"kind", "mean", "sd", "lo", "hi"}, where);
        Marginal& mg = base.marginals[id];
        if (it->contains("kind")) {
          const auto kind = (*it)["kind"].get<std::string>();
          if (kind == "uniform") mg.kind = Marginal::Kind::Uniform;
          else if (kind == "truncated_normal") mg.kind = Marginal::Kind::TruncatedNormal;
          else throw ConfigError(where + ": unknown kind '" + kind + "'");
        }
        if (it->contains("mean")) mg.mean = (*it)["mean"].get<double>();
        if (it->contains("sd")) mg.sd = (*it)["sd"].get<double>();
        if (it->contains("lo")) mg.lo = (*it)["lo"].get<double>();
        if (it->contains("hi")) mg.hi = (*it)["hi"].get<double>();
      }
    }
    if (j.contains("pinching")) {
      const auto& p = j["pinching"];
      detail::reject_unknown(p, {"mean", "covariance", "lo", "hi"}, "distributions.pinching");
      if (p.contains("mean")) detail::read_array(p["mean"], base.pinching.mean, "pinching.mean");
      if (p.contains("lo")) detail::read_array(p["lo"], base.pinching.lo, "pinching.lo");
      if (p.contains("hi")) detail::read_array(p["hi"], base.pinching.hi, "pinching.hi");
      if (p.contains("covariance")) {
        const auto& c = p["covariance"];
        if (!c.is_array() || c.size() != kNumPinching) throw ConfigError("pinching.covariance: expected 6x6");
        for (std::size_t r = 0; r < kNumPinching; ++r)
          detail::read_array(c[r], base.pinching.covariance[r], "pinching.covariance");
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("distributions: ") + e.what());
  }
  validate(base);
  return base;
}

}  // namespace bwlab
