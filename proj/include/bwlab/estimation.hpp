// bwlab: Bouc-Wen class hysteresis toolkit
//
// Curve comparison metrics and genetic-algorithm parameter identification.
//
#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "json.hpp"

#include "bwlab/errors.hpp"
#include "bwlab/io.hpp"
#include "bwlab/loading.hpp"
#include "bwlab/model.hpp"
#include "bwlab/parallel.hpp"
#include "bwlab/params.hpp"
#include "bwlab/random.hpp"

namespace bwlab {

// ---------------------------------------------------------------------------
// Metrics

/// Signed work enclosed by the curve, sum of trapezoids f_avg * du, divided
/// by fy * uy (fy in m/s^2, uy in m). With from_rest the path is taken to
/// start at the origin, which is how simulated curves are stored.
inline double hysteresis_area(const HysteresisCurve& c, double fy, double uy, bool from_rest = true) {
  if (c.empty()) throw DomainError("hysteresis_area: empty curve");
  if (!(fy > 0.0) || !(uy > 0.0)) throw DomainError("hysteresis_area: normalizers must be positive");
  double w = 0.0;
  double u0 = from_rest ? 0.0 : c.u[0];
  double f0 = from_rest ? 0.0 : c.f[0];
  for (std::size_t i = from_rest ? 0 : 1; i < c.size(); ++i) {
    w += 0.5 * (c.f[i] + f0) * (c.u[i] - u0);
    u0 = c.u[i];
    f0 = c.f[i];
  }
  return w / (fy * uy);
}

inline double pearson_r(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("pearson_r: need equal lengths >= 2");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw DomainError("pearson_r: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

struct AccuracyReport {
  std::vector<double> true_area;
  std::vector<double> pred_area;
  std::vector<double> rel_error;
  double within10 = 0.0;  // fraction
  double within5 = 0.0;
};

inline constexpr double kBand10 = 0.10;
inline constexpr double kBand5 = 0.05;

inline AccuracyReport accuracy_from_areas(std::vector<double> true_area, std::vector<double> pred_area) {
  if (true_area.size() != pred_area.size() || true_area.empty())
    throw DomainError("accuracy: area sets must be aligned and non-empty");
  AccuracyReport r;
  std::size_t n10 = 0, n5 = 0;
  for (std::size_t i = 0; i < true_area.size(); ++i) {
    const double t = std::abs(true_area[i]);
    const double p = std::abs(pred_area[i]);
    const double e = t > 0.0 ? std::abs(p - t) / t : (p == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    r.rel_error.push_back(e);
    n10 += e <= kBand10;
    n5 += e <= kBand5;
  }
  r.true_area = std::move(true_area);
  r.pred_area = std::move(pred_area);
  r.within10 = static_cast<double>(n10) / static_cast<double>(r.true_area.size());
  r.within5 = static_cast<double>(n5) / static_cast<double>(r.true_area.size());
  return r;
}

/// Normalized area of `model` on `validation` scaled by the specimen's u_y
/// and normalized by the specimen's Fy * u_y.
inline double validation_area(const BwParams& specimen, const BwParams& model, LoadingHistory validation,
                              int substeps = kDefaultSubsteps) {
  validation.u_y = specimen.uy();
  const HysteresisCurve c = simulate_quasi_static(model, discretize(validation), substeps);
  return std::abs(hysteresis_area(c, specimen.fy_si(), specimen.uy()));
}

/// Simulates each true/estimated pair on the validation history and
/// compares normalized areas.
inline AccuracyReport accuracy_bands(const std::vector<BwParams>& true_set, const std::vector<BwParams>& est_set,
                                     const LoadingHistory& validation, int substeps = kDefaultSubsteps) {
  if (true_set.size() != est_set.size()) throw DomainError("accuracy_bands: sets not aligned");
  std::vector<double> ta(true_set.size()), pa(true_set.size());
  parallel_for(true_set.size(), [&](std::size_t i) {
    ta[i] = validation_area(true_set[i], true_set[i], validation, substeps);
    pa[i] = validation_area(true_set[i], est_set[i], validation, substeps);
  });
  return accuracy_from_areas(std::move(ta), std::move(pa));
}

inline CsvTable accuracy_table(const AccuracyReport& r) {
  CsvTable t{{"sample", "true_area", "pred_area", "in10", "in5"}, {}};
  for (std::size_t i = 0; i < r.true_area.size(); ++i)
    t.rows.push_back({std::to_string(i), fmt9(r.true_area[i]), fmt9(r.pred_area[i]),
                      r.rel_error[i] <= kBand10 ? "1" : "0", r.rel_error[i] <= kBand5 ? "1" : "0"});
  return t;
}

// ---------------------------------------------------------------------------
// Genetic algorithm

struct GaConfig {
  int generations = 100;
  int population = 300;
  int tournament = 3;
  double crossover_rate = 0.9;
  double blend_alpha = 0.5;      // BLX-alpha
  double mutation_rate = 0.2;    // per gene
  double mutation_sd = 0.05;     // fraction of range, decays linearly to 0
  int elitism = 1;
  std::uint64_t seed = 0;
  int substeps = kDefaultSubsteps;
  /// Search T on a logarithmic scale (the range spans two decades).
  bool log_period = true;
  std::array<double, kNumParams> lo = [] {
    std::array<double, kNumParams> a{};
    for (std::size_t i = 0; i < kNumParams; ++i) a[i] = kBounds[i].lo;
    return a;
  }();
  std::array<double, kNumParams> hi = [] {
    std::array<double, kNumParams> a{};
    for (std::size_t i = 0; i < kNumParams; ++i) a[i] = kBounds[i].hi;
    return a;
  }();
};

inline void validate(const GaConfig& c) {
  if (c.generations < 1) throw ConfigError("GA generations must be >= 1");
  if (c.population < 2) throw ConfigError("GA population must be >= 2");
  if (c.tournament < 1) throw ConfigError("GA tournament size must be >= 1");
  if (c.elitism < 1 || c.elitism >= c.population + 1) throw ConfigError("GA elitism must be in [1, population]");
  for (std::size_t i = 0; i < kNumParams; ++i)
    if (!(c.lo[i] <= c.hi[i]) || c.lo[i] < kBounds[i].lo || c.hi[i] > kBounds[i].hi)
      throw ConfigError("GA bounds for " + std::string(kBounds[i].name) + " outside admissible range");
}

struct FitResult {
  BwParams params;
  std::vector<double> trace;  // best-so-far MSE after each generation
  double best_fitness = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  double wall_seconds = 0.0;
};

/// Mean squared force error of params against the curve, +inf if the
/// simulation fails.
inline double force_mse(const BwParams& p, const HysteresisCurve& target, int substeps = kDefaultSubsteps) {
  try {
    const HysteresisCurve c = simulate_quasi_static(p, target.u, substeps);
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double e = c.f[i] - target.f[i];
      s += e * e;
    }
    const double mse = s / static_cast<double>(c.size());
    return std::isfinite(mse) ? mse : std::numeric_limits<double>::infinity();
  } catch (const DomainError&) {
    return std::numeric_limits<double>::infinity();
  }
}

namespace detail {

struct GeneMap {
  std::vector<ParamId> active;
  const GaConfig* cfg;
  Variant variant;

  BwParams decode(const std::vector<double>& genes) const {
    BwParams p;
    for (std::size_t k = 0; k < kNumParams; ++k) p[static_cast<ParamId>(k)] = neutral_value(static_cast<ParamId>(k));
    for (std::size_t g = 0; g < active.size(); ++g) {
      const auto k = static_cast<std::size_t>(active[g]);
      const double lo = cfg->lo[k], hi = cfg->hi[k];
      const double x = std::clamp(genes[g], 0.0, 1.0);
      double v = (active[g] == ParamId::T && cfg->log_period && lo > 0.0) ? lo * std::pow(hi / lo, x)
                                                                           : lo + x * (hi - lo);
      p[active[g]] = std::clamp(v, lo, hi);
    }
    p.variant = variant;
    return p;
  }
};

}  // namespace detail

/// Minimizes the force MSE over the parameters active for `variant`.
/// Elitist: the best individual is never lost, so the trace is non-increasing.
inline FitResult ga_estimate(const HysteresisCurve& curve, Variant variant, const GaConfig& cfg) {
  validate(cfg);
  if (curve.empty() || curve.u.size() != curve.f.size()) throw DomainError("ga_estimate: invalid curve");
  const auto t0 = std::chrono::steady_clock::now();

  detail::GeneMap map{{}, &cfg, variant};
  for (std::size_t k = 0; k < kNumParams; ++k)
    if (is_active(variant, static_cast<ParamId>(k))) map.active.push_back(static_cast<ParamId>(k));
  const std::size_t ng = map.active.size();
  const auto pop_n = static_cast<std::size_t>(cfg.population);

  using Genome = std::vector<double>;
  std::vector<Genome> pop(pop_n, Genome(ng));
  std::vector<double> fit(pop_n, std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < pop_n; ++i) {
    Rng rng = make_rng(cfg.seed, {0, i});
    for (double& x : pop[i]) x = uniform(rng, 0.0, 1.0);
  }

  FitResult result;
  auto evaluate = [&](std::size_t from) {
    parallel_for(pop_n - from, [&](std::size_t j) {
      const std::size_t i = from + j;
      fit[i] = force_mse(map.decode(pop[i]), curve, cfg.substeps);
    });
    result.evaluations += pop_n - from;
  };
  auto ranking = [&] {
    std::vector<std::size_t> order(pop_n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });
    return order;
  };

  evaluate(0);
  if (std::all_of(fit.begin(), fit.end(), [](double f) { return !std::isfinite(f); }))
    throw DomainError("ga_estimate: every initial candidate failed to simulate");
  result.trace.push_back(fit[ranking().front()]);

  const auto elites = static_cast<std::size_t>(std::min(cfg.elitism, cfg.population));
  for (int gen = 1; gen < cfg.generations; ++gen) {
    const std::vector<std::size_t> order = ranking();
    const double sd = cfg.mutation_sd * (1.0 - static_cast<double>(gen) / cfg.generations);
    std::vector<Genome> next(pop_n);
    std::vector<double> next_fit(pop_n, std::numeric_limits<double>::infinity());
    for (std::size_t e = 0; e < elites; ++e) {
      next[e] = pop[order[e]];
      next_fit[e] = fit[order[e]];
    }
    for (std::size_t i = elites; i < pop_n; ++i) {
      Rng rng = make_rng(cfg.seed, {1, static_cast<std::uint64_t>(gen), i});
      auto pick = [&] {
        std::size_t best = rng() % pop_n;
        for (int t = 1; t < cfg.tournament; ++t) {
          const std::size_t c = rng() % pop_n;
          if (fit[c] < fit[best]) best = c;
        }
        return best;
      };
      const Genome& a = pop[pick()];
      const Genome& b = pop[pick()];
      Genome child = a;
      if (uniform(rng, 0.0, 1.0) < cfg.crossover_rate) {
        for (std::size_t k = 0; k < ng; ++k) {
          const double lo = std::min(a[k], b[k]), hi = std::max(a[k], b[k]);
          const double span = hi - lo;
          child[k] = uniform(rng, lo - cfg.blend_alpha * span, hi + cfg.blend_alpha * span);
        }
      }
      for (double& x : child) {
        if (uniform(rng, 0.0, 1.0) < cfg.mutation_rate) x += sd * standard_normal(rng);
        x = std::clamp(x, 0.0, 1.0);
      }
      next[i] = std::move(child);
    }
    pop = std::move(next);
    fit = std::move(next_fit);
    evaluate(elites);
    result.trace.push_back(std::min(result.trace.back(), fit[ranking().front()]));
  }

  const std::size_t best = ranking().front();
  result.params = map.decode(pop[best]);
  result.best_fitness = fit[best];
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

inline nlohmann::json to_json(const FitResult& r) {
  return {{"params", to_json(r.params)},
          {"best_fitness_mse", r.best_fitness},
          {"evaluations", r.evaluations},
          {"fitness_trace", r.trace}};
}

}  // namespace bwlab
