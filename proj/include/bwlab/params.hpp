// bwlab: Bouc-Wen class hysteresis toolkit
//
// Parameter set of the modified Bouc-Wen-Baber-Noori (m-BWBN) model,
// its admissible bounds and the masking rules for the reduced BW variants.
//
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>

#include "bwlab/errors.hpp"

namespace bwlab {

inline constexpr double kGravity = 9.81;  // m/s^2

enum class Variant { BW, BWdeg, BWBNlike, mBWBN };

enum class Category { BSC, DGD, PCH };

inline std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::BW: return "BW";
    case Variant::BWdeg: return "BWdeg";
    case Variant::BWBNlike: return "BWBN-like";
    case Variant::mBWBN: return "mBWBN";
  }
  return "?";
}

inline Variant parse_variant(std::string_view s) {
  if (s == "BW") return Variant::BW;
  if (s == "BWdeg") return Variant::BWdeg;
  if (s == "BWBN-like" || s == "BWBN") return Variant::BWBNlike;
  if (s == "mBWBN" || s == "m-BWBN") return Variant::mBWBN;
  throw ConfigError("unknown variant '" + std::string(s) + "'");
}

inline std::string_view to_string(Category c) {
  switch (c) {
    case Category::BSC: return "BSC";
    case Category::DGD: return "DGD";
    case Category::PCH: return "PCH";
  }
  return "?";
}

inline Category parse_category(std::string_view s) {
  if (s == "BSC") return Category::BSC;
  if (s == "DGD") return Category::DGD;
  if (s == "PCH") return Category::PCH;
  throw ConfigError("unknown category '" + std::string(s) + "'");
}

// Fixed ordering of the 13 free parameters. Used for vectors, files and bounds.
enum class ParamId : std::size_t {
  T, Fy, alpha, beta, n,                         // BSC
  delta_nu, delta_eta,                           // DGD
  zeta0, p, q, psi, delta_psi, lambda            // PCH
};

inline constexpr std::size_t kNumParams = 13;

struct ParamBound {
  std::string_view name;
  double lo;
  double hi;
  Category category;
};

// Admissible ranges. T in seconds, Fy in multiples of g, the rest dimensionless.
inline constexpr std::array<ParamBound, kNumParams> kBounds{{
    {"T", 0.05, 5.0, Category::BSC},
    {"Fy", 0.05, 1.5, Category::BSC},
    {"alpha", 0.0, 0.5, Category::BSC},
    {"beta", 0.1, 0.9, Category::BSC},
    {"n", 1.0, 5.0, Category::BSC},
    {"delta_nu", 0.0, 0.36, Category::DGD},
    {"delta_eta", 0.0, 0.39, Category::DGD},
    {"zeta0", 0.0, 1.0, Category::PCH},
    {"p", 0.0, 1.38, Category::PCH},
    {"q", 0.01, 0.43, Category::PCH},
    {"psi", 0.1, 0.85, Category::PCH},
    {"delta_psi", 0.0, 0.09, Category::PCH},
    {"lambda", 0.01, 0.8, Category::PCH},
}};

constexpr const ParamBound& bound(ParamId id) { return kBounds[static_cast<std::size_t>(id)]; }

inline ParamId param_id(std::string_view name) {
  for (std::size_t i = 0; i < kNumParams; ++i)
    if (kBounds[i].name == name) return static_cast<ParamId>(i);
  throw ConfigError("unknown parameter '" + std::string(name) + "'");
}

/// Whether a parameter is free (estimated) under a model variant.
/// Inactive parameters are pinned to their neutral values.
constexpr bool is_active(Variant v, ParamId id) {
  const Category c = kBounds[static_cast<std::size_t>(id)].category;
  switch (v) {
    case Variant::BW: return c == Category::BSC;
    case Variant::BWdeg: return c != Category::PCH;
    case Variant::BWBNlike:
    case Variant::mBWBN: return true;
  }
  return true;
}

/// Value an inactive parameter is pinned to. zeta0 = 0 switches pinching off,
/// zero degradation rates switch degradation off; the remaining pinching
/// shape parameters sit at their lower bounds and have no effect then.
constexpr double neutral_value(ParamId id) {
  switch (id) {
    case ParamId::delta_nu:
    case ParamId::delta_eta:
    case ParamId::zeta0:
    case ParamId::p:
    case ParamId::delta_psi: return 0.0;
    default: return kBounds[static_cast<std::size_t>(id)].lo;
  }
}

/// The 13 m-BWBN parameters. gamma is not stored: gamma = 1 - beta.
struct BwParams {
  double T = 1.0;          // natural period [s]
  double Fy = 0.5;         // yield strength per unit mass [g]
  double alpha = 0.1;      // post/pre-yield stiffness ratio
  double beta = 0.5;       // basic shape
  double n = 2.0;          // yield sharpness
  double delta_nu = 0.0;   // strength degradation rate
  double delta_eta = 0.0;  // stiffness degradation rate
  double zeta0 = 0.0;      // total slip
  double p = 0.0;          // pinching slope
  double q = 0.01;         // pinching initiation
  double psi = 0.1;        // pinching magnitude
  double delta_psi = 0.0;  // pinching rate
  double lambda = 0.01;    // pinching severity
  Variant variant = Variant::mBWBN;

  double gamma() const { return 1.0 - beta; }
  /// Initial stiffness per unit mass [1/s^2].
  double k0() const {
    const double w = 2.0 * std::numbers::pi / T;
    return w * w;
  }
  /// Yield strength per unit mass [m/s^2].
  double fy_si() const { return Fy * kGravity; }
  /// Yield displacement [m].
  double uy() const { return fy_si() / k0(); }

  double& operator[](ParamId id) { return *slot(*this, id); }
  double operator[](ParamId id) const { return *slot(*this, id); }

  std::array<double, kNumParams> to_array() const {
    std::array<double, kNumParams> a{};
    for (std::size_t i = 0; i < kNumParams; ++i) a[i] = (*this)[static_cast<ParamId>(i)];
    return a;
  }

  static BwParams from_array(const std::array<double, kNumParams>& a, Variant v = Variant::mBWBN) {
    BwParams p;
    p.variant = v;
    for (std::size_t i = 0; i < kNumParams; ++i) p[static_cast<ParamId>(i)] = a[i];
    return p;
  }

  bool operator==(const BwParams&) const = default;

 private:
  template <class Self>
  static auto slot(Self& s, ParamId id) -> decltype(&s.T) {
    switch (id) {
      case ParamId::T: return &s.T;
      case ParamId::Fy: return &s.Fy;
      case ParamId::alpha: return &s.alpha;
      case ParamId::beta: return &s.beta;
      case ParamId::n: return &s.n;
      case ParamId::delta_nu: return &s.delta_nu;
      case ParamId::delta_eta: return &s.delta_eta;
      case ParamId::zeta0: return &s.zeta0;
      case ParamId::p: return &s.p;
      case ParamId::q: return &s.q;
      case ParamId::psi: return &s.psi;
      case ParamId::delta_psi: return &s.delta_psi;
      case ParamId::lambda: return &s.lambda;
    }
    return &s.T;
  }
};

/// Pins every parameter that is inactive for the variant to its neutral value.
inline BwParams apply_mask(BwParams p, Variant v) {
  p.variant = v;
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const auto id = static_cast<ParamId>(i);
    if (!is_active(v, id)) p[id] = neutral_value(id);
  }
  return p;
}

inline bool within_bounds(const BwParams& p, double tol = 0.0) {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const double x = p[static_cast<ParamId>(i)];
    if (!(x >= kBounds[i].lo - tol && x <= kBounds[i].hi + tol)) return false;
  }
  return true;
}

/// Checks bounds and the variant mask. Throws DomainError on the first violation.
inline void validate(const BwParams& p) {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    const double x = p[static_cast<ParamId>(i)];
    if (!std::isfinite(x) || x < kBounds[i].lo || x > kBounds[i].hi)
      throw DomainError("parameter " + std::string(kBounds[i].name) + " = " + std::to_string(x) +
                        " outside [" + std::to_string(kBounds[i].lo) + ", " +
                        std::to_string(kBounds[i].hi) + "]");
  }
  if (p.variant == Variant::BW && (p.delta_nu != 0.0 || p.delta_eta != 0.0))
    throw DomainError("BW variant requires delta_nu = delta_eta = 0");
  if ((p.variant == Variant::BW || p.variant == Variant::BWdeg) && p.zeta0 != 0.0)
    throw DomainError(std::string(to_string(p.variant)) + " variant requires zeta0 = 0");
}

/// Looser check for simulation inputs: the model must be well defined, but
/// values outside the sampling ranges (e.g. the elastic limit alpha = 1) pass.
inline void validate_admissible(const BwParams& p) {
  for (std::size_t i = 0; i < kNumParams; ++i)
    if (!std::isfinite(p[static_cast<ParamId>(i)]))
      throw DomainError("parameter " + std::string(kBounds[i].name) + " is not finite");
  auto require = [](bool ok, const char* what) {
    if (!ok) throw DomainError(std::string("inadmissible parameters: ") + what);
  };
  require(p.T > 0.0, "T must be positive");
  require(p.Fy > 0.0, "Fy must be positive");
  require(p.alpha >= 0.0 && p.alpha <= 1.0, "alpha must be in [0, 1]");
  require(p.beta >= 0.0 && p.beta <= 1.0, "beta must be in [0, 1]");
  require(p.n > 0.0, "n must be positive");
  require(p.delta_nu >= 0.0 && p.delta_eta >= 0.0, "degradation rates must be non-negative");
  require(p.zeta0 >= 0.0 && p.zeta0 <= 1.0, "zeta0 must be in [0, 1]");
  require(p.p >= 0.0 && p.q >= 0.0 && p.delta_psi >= 0.0, "p, q and delta_psi must be non-negative");
  require(p.zeta0 == 0.0 || (p.psi > 0.0 && p.lambda > 0.0), "psi and lambda must be positive with pinching");
  if (p.variant == Variant::BW && (p.delta_nu != 0.0 || p.delta_eta != 0.0))
    throw DomainError("BW variant requires delta_nu = delta_eta = 0");
  if ((p.variant == Variant::BW || p.variant == Variant::BWdeg) && p.zeta0 != 0.0)
    throw DomainError(std::string(to_string(p.variant)) + " variant requires zeta0 = 0");
}

/// Midpoint of every range, with the variant mask applied.
inline BwParams midpoint_params(Variant v = Variant::mBWBN) {
  BwParams p;
  for (std::size_t i = 0; i < kNumParams; ++i)
    p[static_cast<ParamId>(i)] = 0.5 * (kBounds[i].lo + kBounds[i].hi);
  return apply_mask(p, v);
}

}  // namespace bwlab
