// bwlab: Bouc-Wen class hysteresis toolkit
//
// JSON configuration schemas for the command-line runs. Every object is
// checked for unknown keys; missing keys keep the library defaults. Relative
// file paths inside a config are resolved against the config's directory.
//
#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bwlab/dataset.hpp"
#include "bwlab/dynamics.hpp"
#include "bwlab/errors.hpp"
#include "bwlab/estimation.hpp"
#include "bwlab/fragility.hpp"
#include "bwlab/io.hpp"
#include "bwlab/loading.hpp"
#include "bwlab/params.hpp"
#include "bwlab/sampling.hpp"

namespace bwlab {

using nlohmann::json;

/// BWLAB_SEED, when set, replaces every seed read from a config.
inline std::optional<std::uint64_t> env_seed() {
  const char* s = std::getenv("BWLAB_SEED");
  if (!s || !*s) return std::nullopt;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 10);
  if (*end != '\0') throw ConfigError("BWLAB_SEED must be a non-negative integer");
  return static_cast<std::uint64_t>(v);
}

namespace cfg {

template <class T>
T get(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
void maybe(const json& j, const char* key, T& out, const std::string& where) {
  if (j.contains(key)) out = get<T>(j, key, where);
}

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path q(p);
  return q.is_absolute() || base.empty() ? q : base / q;
}

/// A parameter set given inline or as a path to a params JSON file.
inline BwParams params(const json& j, const std::filesystem::path& base, const std::string& where) {
  if (j.is_string()) return params_from_json(read_json(resolve(base, j.get<std::string>())));
  if (!j.is_object()) throw ConfigError(where + ": expected an object or a file path");
  return params_from_json(j);
}

inline GaConfig ga(const json& j, GaConfig c = {}) {
  const std::string w = "ga";
  detail::reject_unknown(j, {"generations", "population", "tournament", "crossover_rate", "blend_alpha",
                             "mutation_rate", "mutation_sd", "elitism", "seed", "substeps", "log_period", "bounds"},
                         w);
  maybe(j, "generations", c.generations, w);
  maybe(j, "population", c.population, w);
  maybe(j, "tournament", c.tournament, w);
  maybe(j, "crossover_rate", c.crossover_rate, w);
  maybe(j, "blend_alpha", c.blend_alpha, w);
  maybe(j, "mutation_rate", c.mutation_rate, w);
  maybe(j, "mutation_sd", c.mutation_sd, w);
  maybe(j, "elitism", c.elitism, w);
  maybe(j, "seed", c.seed, w);
  maybe(j, "substeps", c.substeps, w);
  maybe(j, "log_period", c.log_period, w);
  if (j.contains("bounds")) {
    const json& b = j["bounds"];
    if (!b.is_object()) throw ConfigError("ga.bounds: expected an object");
    for (auto it = b.begin(); it != b.end(); ++it) {
      const auto i = static_cast<std::size_t>(param_id(it.key()));
      const auto lh = get<std::vector<double>>(b, it.key().c_str(), "ga.bounds");
      if (lh.size() != 2) throw ConfigError("ga.bounds." + it.key() + ": expected [lo, hi]");
      c.lo[i] = lh[0];
      c.hi[i] = lh[1];
    }
  }
  if (auto s = env_seed()) c.seed = *s;
  validate(c);
  return c;
}

inline IdaConfig ida(const json& j, IdaConfig c = {}) {
  const std::string w = "ida";
  detail::reject_unknown(j, {"levels", "thresholds", "labels", "damping", "sa_period", "dt_sub"}, w);
  maybe(j, "levels", c.levels, w);
  maybe(j, "thresholds", c.thresholds, w);
  maybe(j, "labels", c.labels, w);
  maybe(j, "damping", c.damping, w);
  if (j.contains("sa_period")) c.sa_period = get<double>(j, "sa_period", w);
  if (j.contains("dt_sub")) c.dt_sub = get<double>(j, "dt_sub", w);
  validate(c);
  return c;
}

inline SyntheticMotionSpec synthetic(const json& j, SyntheticMotionSpec s = {}) {
  const std::string w = "motion";
  detail::reject_unknown(j, {"duration", "dt", "pga", "ground_frequency", "ground_damping", "envelope", "seed", "label"},
                         w);
  maybe(j, "duration", s.duration, w);
  maybe(j, "dt", s.dt, w);
  maybe(j, "pga", s.pga, w);
  maybe(j, "ground_frequency", s.ground_frequency, w);
  maybe(j, "ground_damping", s.ground_damping, w);
  maybe(j, "seed", s.seed, w);
  maybe(j, "label", s.label, w);
  if (j.contains("envelope")) {
    const json& e = j["envelope"];
    detail::reject_unknown(e, {"rise_end", "plateau_end", "decay"}, "motion.envelope");
    maybe(e, "rise_end", s.envelope.rise_end, "motion.envelope");
    maybe(e, "plateau_end", s.envelope.plateau_end, "motion.envelope");
    maybe(e, "decay", s.envelope.decay, "motion.envelope");
  }
  if (auto seed = env_seed()) s.seed = *seed;
  return s;
}

/// History selection. Exactly one of table2 / module / optimal / reference /
/// envelope / amplitudes_uy picks the history; u_y_m scales it (default 1,
/// i.e. the series is in multiples of u_y).
inline LoadingHistory history(const json& j, std::optional<double> u_y_default = std::nullopt) {
  const std::string w = "history";
  detail::reject_unknown(j, {"table2", "module", "optimal", "reference", "strict", "envelope", "amplitudes_uy",
                             "step_size_uy", "label", "u_y_m"},
                         w);
  double uy = u_y_default.value_or(1.0);
  maybe(j, "u_y_m", uy, w);
  int picked = 0;
  for (const char* k : {"table2", "module", "optimal", "reference", "envelope", "amplitudes_uy"}) picked += j.contains(k);
  if (picked != 1)
    throw ConfigError("history: give exactly one of table2, module, optimal, reference, envelope, amplitudes_uy");
  LoadingHistory h;
  if (j.contains("table2")) {
    h = table2_history(get<int>(j, "table2", w), uy);
  } else if (j.contains("module")) {
    h = module_history(parse_category(get<std::string>(j, "module", w)), uy);
  } else if (j.contains("optimal")) {
    h = optimal_history(parse_variant(get<std::string>(j, "optimal", w)), uy);
  } else if (j.contains("reference")) {
    const json& r = j["reference"];
    std::optional<std::vector<double>> amps;
    if (!r.is_null() && !r.is_boolean()) amps = get<std::vector<double>>(j, "reference", w);
    bool strict = true;
    maybe(j, "strict", strict, w);
    h = reference_history(amps, uy, strict);
  } else if (j.contains("envelope")) {
    const json& e = j["envelope"];
    detail::reject_unknown(e, {"peak_uy", "cycles"}, "history.envelope");
    h = envelope_history(get<double>(e, "peak_uy", "history.envelope"), get<int>(e, "cycles", "history.envelope"), uy);
  } else {
    h = make_history(get<std::vector<double>>(j, "amplitudes_uy", w), uy, "CUSTOM");
    maybe(j, "step_size_uy", h.step_size, w);
  }
  maybe(j, "label", h.label, w);
  validate(h);
  return h;
}

inline NoiseSpec noise(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("noise: expected a non-empty array of {cov, count}");
  NoiseSpec s;
  s.levels.clear();
  for (const json& l : j) {
    detail::reject_unknown(l, {"cov", "count"}, "noise[]");
    s.levels.push_back({get<double>(l, "cov", "noise[]"), get<std::size_t>(l, "count", "noise[]")});
  }
  validate(s);
  return s;
}

inline DatasetConfig dataset(const json& j, const std::filesystem::path& base) {
  const std::string w = "dataset";
  detail::reject_unknown(j, {"distributions", "variant", "history", "noise", "n_params", "split", "seed", "uy_cov",
                             "substeps"},
                         w);
  DatasetConfig c;
  if (j.contains("distributions")) {
    const json& d = j["distributions"];
    c.distributions = distributions_from_json(d.is_string() ? read_json(resolve(base, d.get<std::string>())) : d);
  }
  if (j.contains("variant")) c.variant = parse_variant(get<std::string>(j, "variant", w));
  if (j.contains("history")) c.history = history(j["history"]);
  maybe(j, "n_params", c.n_params, w);
  maybe(j, "split", c.split, w);
  maybe(j, "seed", c.seed, w);
  maybe(j, "uy_cov", c.uy_cov, w);
  maybe(j, "substeps", c.substeps, w);
  const auto n_train = static_cast<std::size_t>(std::llround(c.split * static_cast<double>(c.n_params)));
  c.noise = j.contains("noise") ? noise(j["noise"]) : NoiseSpec::scaled_default(n_train);
  if (auto s = env_seed()) c.seed = *s;
  return c;
}

}  // namespace cfg
}  // namespace bwlab
