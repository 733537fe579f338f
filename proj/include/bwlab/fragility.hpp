// bwlab: Bouc-Wen class hysteresis toolkit
//
// Incremental dynamic analysis, lognormal fragility fitting and the
// Kullback-Leibler divergence between fragility curves.
//
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bwlab/dynamics.hpp"
#include "bwlab/errors.hpp"
#include "bwlab/io.hpp"
#include "bwlab/parallel.hpp"
#include "bwlab/params.hpp"

namespace bwlab {

struct IdaConfig {
  std::vector<double> levels{0.1, 0.2, 0.3, 0.4, 0.6, 0.8, 1.0, 1.25, 1.5, 2.0};  // S_a [g]
  std::vector<double> thresholds{0.05, 0.09, 0.17};                              // peak roof displacement [m]
  std::vector<std::string> labels{"DS1", "DS2", "DS3"};
  double damping = 0.05;
  std::optional<double> sa_period;  // defaults to the model's T
  std::optional<double> dt_sub;
};

inline void validate(const IdaConfig& c) {
  if (c.levels.empty()) throw ConfigError("IDA needs at least one intensity level");
  for (double l : c.levels)
    if (!(l > 0.0)) throw ConfigError("IDA intensity levels must be positive");
  if (c.thresholds.size() != c.labels.size()) throw ConfigError("IDA thresholds and labels differ in length");
  for (std::size_t i = 0; i < c.thresholds.size(); ++i)
    if (!(c.thresholds[i] > 0.0) || (i > 0 && !(c.thresholds[i] > c.thresholds[i - 1])))
      throw ConfigError("IDA thresholds must be positive and increasing");
  if (!(c.damping >= 0.0)) throw ConfigError("IDA damping must be non-negative");
}

struct IdaCell {
  std::size_t motion = 0;
  std::string label;
  double sa = 0.0;       // [g]
  double scale = 1.0;
  double peak_u = 0.0;   // [m]
  bool failed = false;
  std::string error;
};

/// Scales every record to every intensity level and records the peak
/// displacement. Failed cells are marked, not fatal. Cells are motion-major.
inline std::vector<IdaCell> ida(const BwParams& p, const std::vector<GroundMotion>& motions, const IdaConfig& cfg) {
  validate(cfg);
  if (motions.empty()) throw DomainError("IDA needs at least one ground motion");
  const double period = cfg.sa_period.value_or(p.T);
  std::vector<double> sa0(motions.size());
  for (std::size_t m = 0; m < motions.size(); ++m) {
    sa0[m] = spectral_acceleration(motions[m], period, cfg.damping);
    if (!(sa0[m] > 0.0)) throw DomainError("ground motion '" + motions[m].label + "' has zero spectral acceleration");
  }
  const std::size_t nl = cfg.levels.size();
  std::vector<IdaCell> cells(motions.size() * nl);
  parallel_for(cells.size(), [&](std::size_t k) {
    const std::size_t m = k / nl, l = k % nl;
    IdaCell& c = cells[k];
    c.motion = m;
    c.label = motions[m].label;
    c.sa = cfg.levels[l];
    c.scale = cfg.levels[l] / sa0[m];
    try {
      c.peak_u = time_history(p, motions[m].scaled(c.scale), cfg.damping, cfg.dt_sub).peak_u;
    } catch (const DomainError& e) {
      c.failed = true;
      c.error = e.what();
    }
  });
  return cells;
}

inline CsvTable ida_table(const std::vector<IdaCell>& cells) {
  CsvTable t{{"motion", "sa_g", "peak_u_m"}, {}};
  for (const auto& c : cells) t.rows.push_back({c.label, fmt9(c.sa), c.failed ? "nan" : fmt9(c.peak_u)});
  return t;
}

inline std::vector<IdaCell> ida_from_table(const CsvTable& t) {
  std::vector<IdaCell> cells;
  const std::size_t cm = t.column("motion"), cs = t.column("sa_g"), cp = t.column("peak_u_m");
  for (const auto& r : t.rows) {
    IdaCell c;
    c.label = r.at(cm);
    c.sa = std::stod(r.at(cs));
    c.peak_u = std::stod(r.at(cp));
    c.failed = !std::isfinite(c.peak_u);
    cells.push_back(c);
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Lognormal fragility

struct FragilityCurve {
  std::string label;
  double theta = 1.0;  // median [g]
  double beta = 0.5;   // dispersion

  double probability(double im) const {
    if (im <= 0.0) return 0.0;
    return 0.5 * std::erfc(-std::log(im / theta) / (beta * std::numbers::sqrt2));
  }
};

namespace detail {

inline double log_phi(double z) { return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi); }

/// log Phi(z), stable in the lower tail.
inline double log_cdf(double z) {
  if (z > -30.0) return std::log(0.5 * std::erfc(-z / std::numbers::sqrt2));
  // Asymptotic expansion of the Mills ratio.
  return log_phi(z) - std::log(-z) + std::log1p(-1.0 / (z * z) + 3.0 / (z * z * z * z));
}

/// phi(z) / Phi(z).
inline double inverse_mills(double z) { return std::exp(log_phi(z) - log_cdf(z)); }

}  // namespace detail

/// Binomial maximum-likelihood fit of P(y = 1 | im) = Phi(ln(im / theta) / beta).
/// Equivalent to probit regression on ln(im), whose log-likelihood is concave.
inline FragilityCurve fit_lognormal_mle(const std::vector<double>& im, const std::vector<bool>& exceed,
                                        std::string label = {}) {
  if (im.size() != exceed.size() || im.empty()) throw DomainError("fragility: data not aligned");
  const auto n_yes = static_cast<std::size_t>(std::count(exceed.begin(), exceed.end(), true));
  if (n_yes == 0 || n_yes == exceed.size())
    throw DomainError("fragility '" + label + "' unfittable: all observations " +
                      (n_yes == 0 ? "below" : "above") + " the threshold");
  std::vector<double> x(im.size());
  for (std::size_t i = 0; i < im.size(); ++i) {
    if (!(im[i] > 0.0)) throw DomainError("fragility: intensities must be positive");
    x[i] = std::log(im[i]);
  }
  auto loglik = [&](double a, double b) {
    double ll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double z = a + b * x[i];
      ll += exceed[i] ? detail::log_cdf(z) : detail::log_cdf(-z);
    }
    return ll;
  };
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double b = 2.0, a = -b * mean;
  double ll = loglik(a, b);
  bool converged = false;
  for (int it = 0; it < 200 && !converged; ++it) {
    double g0 = 0.0, g1 = 0.0, h00 = 0.0, h01 = 0.0, h11 = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double z = a + b * x[i];
      double d1, w;
      if (exceed[i]) {
        const double lam = detail::inverse_mills(z);
        d1 = lam;
        w = lam * (z + lam);
      } else {
        const double mu = detail::inverse_mills(-z);
        d1 = -mu;
        w = mu * (mu - z);
      }
      g0 += d1;
      g1 += d1 * x[i];
      h00 += w;
      h01 += w * x[i];
      h11 += w * x[i] * x[i];
    }
    const double det = h00 * h11 - h01 * h01;
    if (!(det > 0.0)) break;
    const double da = (h11 * g0 - h01 * g1) / det;
    const double db = (h00 * g1 - h01 * g0) / det;
    double step = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60 && !accepted; ++ls, step *= 0.5) {
      const double na = a + step * da, nb = b + step * db;
      const double nll = loglik(na, nb);
      if (nll >= ll - 1e-12 * std::abs(ll)) {
        converged = std::abs(step * da) < 1e-10 * (1.0 + std::abs(a)) && std::abs(step * db) < 1e-10 * (1.0 + std::abs(b));
        a = na;
        b = nb;
        ll = nll;
        accepted = true;
      }
    }
    // No ascent direction left: the iterate is optimal to round-off.
    if (!accepted) converged = true;
    if (b > 1e6) break;
  }
  if (!converged || !(b > 0.0) || b > 1e6)
    throw DomainError("fragility '" + label + "' unfittable: maximum-likelihood fit did not converge "
                      "(separable or non-monotone data)");
  return {std::move(label), std::exp(-a / b), 1.0 / b};
}

/// Fits the exceedance of `threshold` (peak displacement) over the IDA grid.
inline FragilityCurve fit_fragility(const std::vector<IdaCell>& cells, double threshold, std::string label = {}) {
  std::vector<double> im;
  std::vector<bool> y;
  for (const auto& c : cells) {
    if (c.failed) continue;
    im.push_back(c.sa);
    y.push_back(c.peak_u >= threshold);
  }
  return fit_lognormal_mle(im, y, std::move(label));
}

inline CsvTable fragility_table(const std::vector<FragilityCurve>& curves) {
  CsvTable t{{"ds", "theta_g", "beta"}, {}};
  for (const auto& c : curves) t.rows.push_back({c.label, fmt9(c.theta), fmt9(c.beta)});
  return t;
}

inline std::vector<FragilityCurve> fragility_from_table(const CsvTable& t) {
  std::vector<FragilityCurve> out;
  const std::size_t cd = t.column("ds"), ct = t.column("theta_g"), cb = t.column("beta");
  for (const auto& r : t.rows) out.push_back({r.at(cd), std::stod(r.at(ct)), std::stod(r.at(cb))});
  return out;
}

// ---------------------------------------------------------------------------
// KL divergence between lognormal curves (treated as distributions of the
// capacity intensity): KL(f1 || f2).

inline double kl_divergence(const FragilityCurve& f1, const FragilityCurve& f2) {
  if (!(f1.beta > 0.0) || !(f2.beta > 0.0) || !(f1.theta > 0.0) || !(f2.theta > 0.0))
    throw DomainError("KL divergence needs positive medians and dispersions");
  const double dm = std::log(f1.theta) - std::log(f2.theta);
  const double s1 = f1.beta * f1.beta, s2 = f2.beta * f2.beta;
  return std::log(f2.beta / f1.beta) + (s1 + dm * dm) / (2.0 * s2) - 0.5;
}

/// Composite Simpson quadrature of p1 ln(p1 / p2) over ln(im), +-12 dispersions
/// around the first median.
inline double kl_divergence_quadrature(const FragilityCurve& f1, const FragilityCurve& f2, int intervals = 20000) {
  if (intervals % 2) ++intervals;
  const double m1 = std::log(f1.theta), m2 = std::log(f2.theta);
  auto log_pdf = [](double y, double m, double s) {
    const double z = (y - m) / s;
    return -0.5 * z * z - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
  };
  const double lo = m1 - 12.0 * f1.beta, hi = m1 + 12.0 * f1.beta;
  const double h = (hi - lo) / intervals;
  double sum = 0.0;
  for (int i = 0; i <= intervals; ++i) {
    const double y = lo + h * i;
    const double l1 = log_pdf(y, m1, f1.beta);
    const double v = std::exp(l1) * (l1 - log_pdf(y, m2, f2.beta));
    sum += v * (i == 0 || i == intervals ? 1.0 : (i % 2 ? 4.0 : 2.0));
  }
  return sum * h / 3.0;
}

}  // namespace bwlab
