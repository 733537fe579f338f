// bwlab: Bouc-Wen class hysteresis toolkit
//
// Modularized loading protocol: (1) pushover and yield displacement,
// (2) optimal loading history for the target model variant, (3) test the
// specimen under that history and estimate the model parameters. A virtual
// specimen (known parameters) additionally gets a validation score: the
// normalized-area error on the envelope history.
//
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bwlab/dynamics.hpp"
#include "bwlab/errors.hpp"
#include "bwlab/estimation.hpp"
#include "bwlab/loading.hpp"
#include "bwlab/model.hpp"
#include "bwlab/nn.hpp"
#include "bwlab/params.hpp"

namespace bwlab {

inline constexpr double kValidationPeak = 4.0;  // [u_y]
inline constexpr int kValidationCycles = 8;

struct ProtocolInput {
  // Either a virtual specimen ...
  std::optional<BwParams> specimen;
  // ... or measured data: a pushover curve and the specimen's response to
  // the optimal history (same displacement series the protocol prescribes).
  std::optional<PushoverCurve> measured_pushover;
  std::optional<HysteresisCurve> measured_curve;

  Variant variant = Variant::BW;
  enum class Estimator { GA, CNN } estimator = Estimator::GA;
  GaConfig ga;
  std::vector<nn::Model> cnn;  // one model per parameter category

  // Pushover of a virtual specimen, in multiples of its u_y.
  double pushover_drift_uy = 10.0;
  double pushover_step_uy = 0.01;
};

struct ProtocolReport {
  double u_y = 0.0;
  std::size_t pushover_points = 0;
  LoadingHistory history;
  std::size_t history_steps = 0;
  BwParams estimate;
  double fit_mse = 0.0;
  std::optional<FitResult> ga;
  std::optional<double> true_area, pred_area, area_error;
  LoadingHistory validation;
};

/// Parameters predicted by a set of CNN models; parameters no model covers
/// stay at their neutral (BW) values or at the range midpoint for BSC.
inline BwParams cnn_estimate(const std::vector<nn::Model>& models, const HysteresisCurve& curve, Variant variant) {
  if (models.empty()) throw DomainError("CNN estimator needs at least one weights file");
  BwParams p = apply_mask(midpoint_params(Variant::BW), Variant::BW);
  for (const auto& m : models) {
    const std::vector<double> y = m.predict(curve);
    for (std::size_t i = 0; i < y.size(); ++i) p[m.outputs[i]] = y[i];
  }
  return apply_mask(p, variant);
}

inline ProtocolReport run_protocol(const ProtocolInput& in) {
  if (!in.specimen && !(in.measured_pushover && in.measured_curve))
    throw ConfigError("protocol needs specimen params, or a pushover curve plus the measured response");
  ProtocolReport r;

  // Step 1: yield displacement from a pushover curve.
  PushoverCurve push;
  if (in.measured_pushover) {
    push = *in.measured_pushover;
  } else {
    validate_admissible(*in.specimen);
    const double uy = in.specimen->uy();
    push = pushover(*in.specimen, in.pushover_drift_uy * uy, in.pushover_step_uy * uy);
  }
  r.pushover_points = push.u.size();
  r.u_y = yield_displacement(push);

  // Step 2: optimal loading history for the model variant.
  r.history = optimal_history(in.variant, r.u_y);
  const std::vector<double> series = discretize(r.history);
  r.history_steps = series.size();

  // Step 3: test and estimate.
  HysteresisCurve curve;
  if (in.measured_curve) {
    curve = *in.measured_curve;
    if (curve.size() != series.size())
      throw DomainError("measured curve has " + std::to_string(curve.size()) + " points, the optimal history " +
                        std::to_string(series.size()));
  } else {
    curve = simulate_quasi_static(*in.specimen, series);
  }
  if (in.estimator == ProtocolInput::Estimator::GA) {
    r.ga = ga_estimate(curve, in.variant, in.ga);
    r.estimate = r.ga->params;
    r.fit_mse = r.ga->best_fitness;
  } else {
    r.estimate = cnn_estimate(in.cnn, curve, in.variant);
    r.fit_mse = force_mse(r.estimate, curve);
  }

  r.validation = envelope_history(kValidationPeak, kValidationCycles, r.u_y);
  r.validation.label = "VAL";
  if (in.specimen) {
    r.true_area = validation_area(*in.specimen, *in.specimen, r.validation);
    r.pred_area = validation_area(*in.specimen, r.estimate, r.validation);
    r.area_error = std::abs(*r.pred_area - *r.true_area) / *r.true_area;
  }
  return r;
}

/// Deterministic report: no timings, no paths.
inline nlohmann::json to_json(const ProtocolReport& r, const ProtocolInput& in) {
  nlohmann::json j;
  j["variant"] = std::string(to_string(in.variant));
  j["estimator"] = in.estimator == ProtocolInput::Estimator::GA ? "ga" : "cnn";
  j["yield"] = {{"u_y_m", r.u_y}, {"pushover_points", r.pushover_points}};
  j["history"] = to_json(r.history);
  j["history"]["steps"] = r.history_steps;
  j["estimate"] = to_json(r.estimate);
  nlohmann::json fit = {{"force_mse", r.fit_mse}};
  if (r.ga) {
    fit["seed"] = in.ga.seed;
    fit["generations"] = in.ga.generations;
    fit["population"] = in.ga.population;
    fit["evaluations"] = r.ga->evaluations;
    fit["fitness_trace"] = r.ga->trace;
  }
  j["fit"] = fit;
  nlohmann::json val = {{"history", to_json(r.validation)}};
  if (r.area_error) {
    val["true_area"] = *r.true_area;
    val["pred_area"] = *r.pred_area;
    val["area_error"] = *r.area_error;
    val["within_10pct"] = *r.area_error <= kBand10;
  } else {
    val["area_error"] = nullptr;
  }
  j["validation"] = val;
  return j;
}

}  // namespace bwlab
