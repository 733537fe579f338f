// bwlab command-line driver: the loading protocol end to end, plus each
// pipeline stage on its own. Exit codes: 0 success, 1 domain error,
// 2 configuration or usage error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bwlab/bwlab.hpp"

namespace fs = std::filesystem;
using namespace bwlab;
using nlohmann::json;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  bool json = false;
  bool svg = false;
};

void add_common(CLI::App* sub, Common& c, bool with_svg = false) {
  sub->add_option("--config", c.config, "JSON configuration file");
  sub->add_option("--out", c.out, "output directory")->capture_default_str();
  sub->add_flag("--json", c.json, "print a machine-readable summary on stdout");
  if (with_svg) sub->add_flag("--svg", c.svg, "also write an SVG plot");
}

/// Config object and the directory its relative paths refer to.
json load_config(const Common& c, fs::path& base) {
  if (c.config.empty()) {
    base.clear();
    return json::object();
  }
  const fs::path p = fs::absolute(c.config);
  if (!fs::is_regular_file(p)) throw ConfigError("config file not found: " + c.config);
  base = p.parent_path();
  json j = read_json(p);
  if (!j.is_object()) throw ConfigError(c.config + ": expected a JSON object");
  return j;
}

std::string abs_path(const std::string& p) { return fs::absolute(p).string(); }

template <class T>
void set_if(const CLI::Option* o, json& j, const char* key, const T& v) {
  if (o->count()) j[key] = v;
}

json sub_object(const json& j, const char* key) {
  if (!j.contains(key)) return json::object();
  if (!j[key].is_object()) throw ConfigError(std::string(key) + ": expected an object");
  return j[key];
}

void emit(const Common& c, const json& summary, const std::string& human) {
  if (c.json) std::cout << summary.dump(2) << "\n";
  else std::cout << human << "\n";
}

std::string rel(const fs::path& p) { return p.lexically_normal().string(); }

// History selection flags, shared by `history` and `simulate`.
struct HistoryFlags {
  int table2 = 0;
  std::string module, optimal, label;
  bool reference = false;
  double env_peak = 0.0, uy = 1.0, step = kDefaultStepSize;
  int env_cycles = 0;
  std::vector<double> amplitudes;
  CLI::Option *o_table2{}, *o_module{}, *o_optimal{}, *o_reference{}, *o_env_peak{}, *o_env_cycles{}, *o_amps{},
      *o_uy{}, *o_step{}, *o_label{};

  void add(CLI::App* a) {
    o_table2 = a->add_option("--table2", table2, "standard loading history LH1..LH18")->check(CLI::Range(1, 18));
    o_module = a->add_option("--module", module, "module history for a category (BSC, DGD, PCH)");
    o_optimal = a->add_option("--optimal", optimal, "optimal history for a variant (BW, BWdeg, BWBN-like, mBWBN)");
    o_reference = a->add_flag("--reference", reference, "the 430-step reference history");
    o_env_peak = a->add_option("--envelope-peak", env_peak, "envelope history peak amplitude [u_y]");
    o_env_cycles = a->add_option("--envelope-cycles", env_cycles, "envelope history cycle count");
    o_amps = a->add_option("--amplitudes", amplitudes, "custom amplitude sequence [u_y]")->delimiter(',');
    o_uy = a->add_option("--uy", uy, "yield displacement scaling the history [m]");
    o_step = a->add_option("--step-size", step, "step size of a custom history [u_y]");
    o_label = a->add_option("--label", label, "history label");
  }

  bool selects() const {
    return o_table2->count() || o_module->count() || o_optimal->count() || o_reference->count() ||
           o_env_peak->count() || o_env_cycles->count() || o_amps->count();
  }

  void apply(json& h) const {
    if (selects()) {
      for (const char* k : {"table2", "module", "optimal", "reference", "strict", "envelope", "amplitudes_uy"})
        h.erase(k);
      set_if(o_table2, h, "table2", table2);
      set_if(o_module, h, "module", module);
      set_if(o_optimal, h, "optimal", optimal);
      if (reference) h["reference"] = nullptr;
      if (o_env_peak->count() || o_env_cycles->count()) {
        if (!o_env_peak->count() || !o_env_cycles->count())
          throw ConfigError("--envelope-peak and --envelope-cycles go together");
        h["envelope"] = {{"peak_uy", env_peak}, {"cycles", env_cycles}};
      }
      set_if(o_amps, h, "amplitudes_uy", amplitudes);
    }
    set_if(o_uy, h, "u_y_m", uy);
    set_if(o_step, h, "step_size_uy", step);
    set_if(o_label, h, "label", label);
  }
};

void write_svg(const fs::path& p, const std::vector<svg::Series>& s, const svg::PlotOptions& o) {
  write_text(p, svg::plot(s, o));
}

// ---------------------------------------------------------------------------

int cmd_history(const Common& c, const HistoryFlags& hf) {
  fs::path base;
  json j = load_config(c, base);
  hf.apply(j);
  const LoadingHistory h = cfg::history(j);
  const std::vector<double> series = discretize(h);
  const fs::path out(c.out);
  write_json(out / "history.json", to_json(h));
  write_text(out / "series.csv", to_csv(series_table(series)));
  json s = to_json(h);
  s["steps"] = series.size();
  s["cumulative_displacement_uy"] = h.cumulative_displacement();
  s["files"] = {rel(out / "history.json"), rel(out / "series.csv")};
  std::string amps;
  for (double a : h.amplitudes) amps += (amps.empty() ? "" : ",") + fmt9(a);
  emit(c, s,
       h.label + ": amplitudes [" + amps + "] u_y, cumulative " + fmt9(h.cumulative_displacement()) + " u_y, " +
           std::to_string(series.size()) + " steps -> " + rel(out / "series.csv"));
  return 0;
}

int cmd_simulate(const Common& c, const HistoryFlags& hf, const std::string& params_path, const CLI::Option* o_params,
                 int substeps, const CLI::Option* o_sub) {
  fs::path base;
  json j = load_config(c, base);
  detail::reject_unknown(j, {"params", "history", "substeps"}, "simulate");
  if (o_params->count()) j["params"] = abs_path(params_path);
  set_if(o_sub, j, "substeps", substeps);
  if (!j.contains("params")) throw ConfigError("simulate: params are required (--params or config 'params')");
  const BwParams p = cfg::params(j["params"], base, "params");
  validate_admissible(p);
  json hj = sub_object(j, "history");
  hf.apply(hj);
  if (hj.empty() || (hj.size() == 1 && hj.contains("u_y_m"))) hj["optimal"] = std::string(to_string(p.variant));
  const LoadingHistory h = cfg::history(hj, p.uy());
  const int sub = j.value("substeps", kDefaultSubsteps);
  const HysteresisCurve curve = simulate_quasi_static(p, discretize(h), sub);
  const double area = hysteresis_area(curve, p.fy_si(), p.uy());
  double peak = 0.0;
  for (double f : curve.f) peak = std::max(peak, std::abs(f));
  const fs::path out(c.out);
  write_text(out / "curve.csv", to_csv(curve_table(curve)));
  if (c.svg)
    write_svg(out / "curve.svg", {{curve.u, curve.f, h.label}},
              {"Hysteresis (" + h.label + ")", "u [m]", "f_s [m/s^2]"});
  const json s = {{"history", h.label}, {"steps", curve.size()},      {"u_y_m", h.u_y},
                  {"normalized_area", area}, {"peak_force_mps2", peak}, {"file", rel(out / "curve.csv")}};
  emit(c, s,
       h.label + ": " + std::to_string(curve.size()) + " steps, normalized area " + fmt9(area) + " -> " +
           rel(out / "curve.csv"));
  return 0;
}

int cmd_gen_dataset(const Common& c, const json& flags) {
  fs::path base;
  json j = load_config(c, base);
  j.update(flags);
  const DatasetConfig dc = cfg::dataset(j, base);
  const DatasetSummary r = generate_dataset(dc, c.out);
  const json m = to_json(r.manifest);
  emit(c, m,
       "dataset: " + std::to_string(r.manifest.sample_count) + " train / " + std::to_string(r.manifest.test_count) +
           " test records of length " + std::to_string(r.manifest.d) + " -> " + rel(fs::path(c.out)));
  return 0;
}

int cmd_histograms(const Common& c, const json& flags) {
  fs::path base;
  json j = load_config(c, base);
  detail::reject_unknown(j, {"dataset", "bins"}, "histograms");
  if (j.contains("dataset")) j["dataset"] = cfg::resolve(base, cfg::get<std::string>(j, "dataset", "histograms")).string();
  j.update(flags);
  if (!j.contains("dataset")) throw ConfigError("histograms: dataset directory is required (--dataset)");
  const auto bins = j.value("bins", std::size_t{50});
  if (bins == 0) throw ConfigError("histograms: bins must be positive");
  const DatasetReader ds(j["dataset"].get<std::string>());
  const std::vector<BwParams> sets = dataset_param_sets(ds);
  const auto rows = histograms(sets, bins);
  const fs::path out(c.out);
  write_text(out / "histograms.csv", to_csv(histogram_table(rows)));
  const json s = {{"param_sets", sets.size()}, {"bins", bins}, {"rows", rows.size()}, {"file", rel(out / "histograms.csv")}};
  emit(c, s, std::to_string(sets.size()) + " parameter sets, " + std::to_string(bins) + " bins -> " +
                 rel(out / "histograms.csv"));
  return 0;
}

int cmd_estimate(const Common& c, const json& flags, const json& ga_flags) {
  fs::path base;
  json j = load_config(c, base);
  detail::reject_unknown(j, {"curve", "variant", "ga", "truth"}, "estimate");
  if (j.contains("curve")) j["curve"] = cfg::resolve(base, cfg::get<std::string>(j, "curve", "estimate")).string();
  j.update(flags);
  json gj = sub_object(j, "ga");
  gj.update(ga_flags);
  if (!j.contains("curve")) throw ConfigError("estimate: a measured curve CSV is required (--curve)");
  const Variant v = parse_variant(j.value("variant", std::string("BW")));
  const GaConfig ga = cfg::ga(gj);
  const HysteresisCurve curve = curve_from_table(parse_csv(read_text(j["curve"].get<std::string>())));
  const FitResult r = ga_estimate(curve, v, ga);
  const HysteresisCurve fitted = simulate_quasi_static(r.params, curve.u, ga.substeps);
  const fs::path out(c.out);
  json report = {{"variant", std::string(to_string(v))},
                 {"ga", {{"seed", ga.seed}, {"generations", ga.generations}, {"population", ga.population}}},
                 {"fit", to_json(r)}};
  if (j.contains("truth")) {
    const BwParams truth = cfg::params(j["truth"], base, "truth");
    LoadingHistory val = envelope_history(kValidationPeak, kValidationCycles, truth.uy());
    val.label = "VAL";
    const double ta = validation_area(truth, truth, val), pa = validation_area(truth, r.params, val);
    report["validation"] = {{"true_area", ta}, {"pred_area", pa}, {"area_error", std::abs(pa - ta) / ta}};
  }
  write_json(out / "fit.json", report);
  write_text(out / "fitted_curve.csv", to_csv(curve_table(fitted)));
  if (c.svg)
    write_svg(out / "fit.svg", {{curve.u, curve.f, "measured"}, {fitted.u, fitted.f, "fitted"}},
              {"GA fit (" + std::string(to_string(v)) + ")", "u [m]", "f_s [m/s^2]"});
  json s = report;
  s["wall_seconds"] = r.wall_seconds;
  emit(c, s,
       "GA " + std::string(to_string(v)) + ": force MSE " + fmt9(r.best_fitness) + " after " +
           std::to_string(r.evaluations) + " evaluations (" + fmt9(r.wall_seconds) + " s) -> " +
           rel(out / "fit.json"));
  return 0;
}

int cmd_pushover(const Common& c, const json& flags) {
  fs::path base;
  json j = load_config(c, base);
  detail::reject_unknown(j, {"params", "curve", "max_drift_uy", "step_uy", "substeps"}, "pushover");
  if (j.contains("curve")) j["curve"] = cfg::resolve(base, cfg::get<std::string>(j, "curve", "pushover")).string();
  j.update(flags);
  if (j.contains("params") == j.contains("curve"))
    throw ConfigError("pushover: give exactly one of params (simulate) or curve (measured CSV)");
  const fs::path out(c.out);
  PushoverCurve pc;
  if (j.contains("params")) {
    const BwParams p = cfg::params(j["params"], base, "params");
    validate_admissible(p);
    const double drift = j.value("max_drift_uy", 10.0), step = j.value("step_uy", 0.01);
    pc = pushover(p, drift * p.uy(), step * p.uy(), j.value("substeps", kDefaultSubsteps));
    write_text(out / "pushover.csv", to_csv(pushover_table(pc)));
  } else {
    pc = pushover_from_table(parse_csv(read_text(j["curve"].get<std::string>())));
  }
  if (c.svg) write_svg(out / "pushover.svg", {{pc.u, pc.f, "pushover"}}, {"Pushover", "u [m]", "f_s [m/s^2]"});
  const double uy = yield_displacement(pc);
  const json s = {{"u_y_m", uy}, {"points", pc.u.size()}};
  write_json(out / "yield.json", s);
  emit(c, s, "u_y = " + fmt9(uy) + " m from " + std::to_string(pc.u.size()) + " pushover points");
  return 0;
}

GroundMotion load_motion(const json& j, const fs::path& base, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a file path");
  return read_ground_motion(cfg::resolve(base, j.get<std::string>()));
}

int cmd_tha(const Common& c, const json& flags) {
  fs::path base;
  json j = load_config(c, base);
  detail::reject_unknown(j, {"params", "motion", "scale", "damping", "dt_sub"}, "tha");
  if (j.contains("motion")) j["motion"] = cfg::resolve(base, cfg::get<std::string>(j, "motion", "tha")).string();
  j.update(flags);
  if (!j.contains("params") || !j.contains("motion")) throw ConfigError("tha: params and motion are required");
  const BwParams p = cfg::params(j["params"], base, "params");
  validate_admissible(p);
  const GroundMotion gm = load_motion(j["motion"], base, "motion").scaled(j.value("scale", 1.0));
  const double xi = j.value("damping", 0.05);
  std::optional<double> dt_sub;
  if (j.contains("dt_sub")) dt_sub = cfg::get<double>(j, "dt_sub", "tha");
  const Response r = time_history(p, gm, xi, dt_sub);
  const fs::path out(c.out);
  write_text(out / "response.csv", to_csv(response_table(r)));
  if (c.svg) write_svg(out / "response.svg", {{r.t, r.u, gm.label}}, {"Response", "t [s]", "u [m]"});
  const json s = {{"motion", gm.label},
                  {"steps", r.t.size()},
                  {"peak_u_m", r.peak_u},
                  {"sa_g", spectral_acceleration(gm, p.T, xi)},
                  {"file", rel(out / "response.csv")}};
  emit(c, s, gm.label + ": peak displacement " + fmt9(r.peak_u) + " m -> " + rel(out / "response.csv"));
  return 0;
}

int cmd_ida(const Common& c, const json& flags) {
  fs::path base;
  json j = load_config(c, base);
  detail::reject_unknown(j, {"params", "motions", "ida"}, "ida");
  if (j.contains("motions")) {
    if (!j["motions"].is_array()) throw ConfigError("ida.motions: expected an array of paths");
    for (auto& m : j["motions"]) m = cfg::resolve(base, m.get<std::string>()).string();
  }
  j.update(flags);
  if (!j.contains("params") || !j.contains("motions") || j["motions"].empty())
    throw ConfigError("ida: params and at least one motion are required");
  const BwParams p = cfg::params(j["params"], base, "params");
  validate_admissible(p);
  std::vector<GroundMotion> gms;
  for (const auto& m : j["motions"]) gms.push_back(load_motion(m, base, "motions[]"));
  const IdaConfig ic = cfg::ida(sub_object(j, "ida"));
  const auto cells = ida(p, gms, ic);
  std::size_t failed = 0;
  for (const auto& cell : cells) failed += cell.failed;
  const fs::path out(c.out);
  write_text(out / "ida.csv", to_csv(ida_table(cells)));
  const json s = {{"motions", gms.size()}, {"levels", ic.levels.size()}, {"cells", cells.size()},
                  {"failed", failed},      {"file", rel(out / "ida.csv")}};
  emit(c, s, std::to_string(cells.size()) + " IDA cells (" + std::to_string(failed) + " failed) -> " +
                 rel(out / "ida.csv"));
  return 0;
}

json kl_report(const std::vector<FragilityCurve>& curves) {
  json report;
  report["curves"] = json::array();
  report["labels"] = json::array();
  for (const auto& f : curves) {
    report["curves"].push_back({{"ds", f.label}, {"theta_g", f.theta}, {"beta", f.beta}});
    report["labels"].push_back(f.label);
  }
  json m = json::array();
  for (const auto& a : curves) {
    json row = json::array();
    for (const auto& b : curves) row.push_back(kl_divergence(a, b));
    m.push_back(row);
  }
  report["kl"] = m;
  return report;
}

int cmd_fragility(const Common& c, const json& flags) {
  fs::path base;
  json j = load_config(c, base);
  detail::reject_unknown(j, {"ida_csv", "thresholds", "labels"}, "fragility");
  if (j.contains("ida_csv")) j["ida_csv"] = cfg::resolve(base, cfg::get<std::string>(j, "ida_csv", "fragility")).string();
  j.update(flags);
  if (!j.contains("ida_csv")) throw ConfigError("fragility: an IDA grid CSV is required (--ida)");
  IdaConfig ic;
  cfg::maybe(j, "thresholds", ic.thresholds, "fragility");
  cfg::maybe(j, "labels", ic.labels, "fragility");
  validate(ic);
  const auto cells = ida_from_table(parse_csv(read_text(j["ida_csv"].get<std::string>())));
  std::vector<FragilityCurve> curves;
  for (std::size_t i = 0; i < ic.thresholds.size(); ++i) {
    try {
      curves.push_back(fit_fragility(cells, ic.thresholds[i], ic.labels[i]));
    } catch (const DomainError& e) {
      throw DomainError(ic.labels[i] + " (threshold " + fmt9(ic.thresholds[i]) + " m): " + e.what());
    }
  }
  const fs::path out(c.out);
  write_text(out / "fragility.csv", to_csv(fragility_table(curves)));
  const json report = kl_report(curves);
  write_json(out / "kl.json", report);
  if (c.svg) {
    double top = 0.0;
    for (const auto& cell : cells) top = std::max(top, cell.sa);
    std::vector<svg::Series> ss;
    for (const auto& f : curves) {
      svg::Series s{{}, {}, f.label};
      for (int k = 1; k <= 200; ++k) {
        s.x.push_back(1.2 * top * k / 200.0);
        s.y.push_back(f.probability(s.x.back()));
      }
      ss.push_back(std::move(s));
    }
    write_svg(out / "fragility.svg", ss, {"Fragility", "S_a [g]", "P(exceedance)"});
  }
  std::string human;
  for (const auto& f : curves) human += f.label + ": theta " + fmt9(f.theta) + " g, beta " + fmt9(f.beta) + "\n";
  emit(c, report, human + "-> " + rel(out / "fragility.csv") + ", " + rel(out / "kl.json"));
  return 0;
}

int cmd_protocol(const Common& c, const json& flags, const json& ga_flags) {
  fs::path base;
  json j = load_config(c, base);
  detail::reject_unknown(j, {"specimen", "pushover_csv", "curve_csv", "variant", "estimator", "weights", "ga",
                             "pushover_drift_uy", "pushover_step_uy"},
                         "protocol");
  for (const char* k : {"pushover_csv", "curve_csv"})
    if (j.contains(k)) j[k] = cfg::resolve(base, cfg::get<std::string>(j, k, "protocol")).string();
  if (j.contains("specimen") && j["specimen"].is_string())
    j["specimen"] = cfg::resolve(base, j["specimen"].get<std::string>()).string();
  if (j.contains("weights")) {
    if (!j["weights"].is_array()) throw ConfigError("protocol.weights: expected an array of paths");
    for (auto& w : j["weights"]) w = cfg::resolve(base, w.get<std::string>()).string();
  }
  j.update(flags);
  json gj = sub_object(j, "ga");
  gj.update(ga_flags);

  ProtocolInput in;
  in.variant = parse_variant(j.value("variant", std::string("BW")));
  if (j.contains("specimen")) in.specimen = cfg::params(j["specimen"], base, "specimen");
  if (j.contains("pushover_csv"))
    in.measured_pushover = pushover_from_table(parse_csv(read_text(j["pushover_csv"].get<std::string>())));
  if (j.contains("curve_csv"))
    in.measured_curve = curve_from_table(parse_csv(read_text(j["curve_csv"].get<std::string>())));
  if (in.specimen && (in.measured_pushover || in.measured_curve))
    throw ConfigError("protocol: give either specimen or measured data, not both");
  const std::string est = j.value("estimator", std::string("ga"));
  if (est == "ga") {
    in.estimator = ProtocolInput::Estimator::GA;
  } else if (est == "cnn") {
    in.estimator = ProtocolInput::Estimator::CNN;
    if (!j.contains("weights") || j["weights"].empty()) throw ConfigError("protocol: cnn estimator needs weights files");
    for (const auto& w : j["weights"]) in.cnn.push_back(nn::load_model(w.get<std::string>()));
  } else {
    throw ConfigError("protocol: estimator must be 'ga' or 'cnn'");
  }
  in.ga = cfg::ga(gj);
  cfg::maybe(j, "pushover_drift_uy", in.pushover_drift_uy, "protocol");
  cfg::maybe(j, "pushover_step_uy", in.pushover_step_uy, "protocol");

  const auto t0 = std::chrono::steady_clock::now();
  const ProtocolReport r = run_protocol(in);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const json report = to_json(r, in);
  const fs::path out(c.out);
  write_json(out / "report.json", report);
  std::string human = "u_y = " + fmt9(r.u_y) + " m; history " + r.history.label + " (" +
                      std::to_string(r.history_steps) + " steps); force MSE " + fmt9(r.fit_mse);
  if (r.area_error) human += "; validation area error " + fmt9(100.0 * *r.area_error) + "%";
  human += " (" + fmt9(wall) + " s) -> " + rel(out / "report.json");
  emit(c, report, human);
  return 0;
}

int cmd_synth(const Common& c, const json& flags) {
  fs::path base;
  json j = load_config(c, base);
  j.update(flags);
  const SyntheticMotionSpec spec = cfg::synthetic(j);
  const GroundMotion g = synthetic_ground_motion(spec);
  const fs::path file = fs::path(c.out) / (g.label + ".txt");
  write_ground_motion(file, g);
  const json s = {{"label", g.label}, {"npts", g.accel.size()}, {"dt", g.dt}, {"pga_g", spec.pga},
                  {"seed", spec.seed}, {"file", rel(file)}};
  emit(c, s, g.label + ": " + std::to_string(g.accel.size()) + " samples at dt " + fmt9(g.dt) + " s -> " + rel(file));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bwlab: Bouc-Wen class hysteresis models, loading protocols and estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "bwlab 1.0");

  // history
  Common c_hist;
  HistoryFlags hf_hist;
  auto* s_hist = app.add_subcommand("history", "build a loading history and its displacement series");
  add_common(s_hist, c_hist);
  hf_hist.add(s_hist);

  // simulate
  Common c_sim;
  HistoryFlags hf_sim;
  std::string sim_params;
  int sim_sub = kDefaultSubsteps;
  auto* s_sim = app.add_subcommand("simulate", "quasi-static response of a parameter set to a history");
  add_common(s_sim, c_sim, true);
  hf_sim.add(s_sim);
  auto* o_sim_params = s_sim->add_option("--params", sim_params, "parameter JSON file");
  auto* o_sim_sub = s_sim->add_option("--substeps", sim_sub, "RK4 substeps per load step");

  // gen-dataset
  Common c_ds;
  std::size_t ds_n = 0;
  std::uint64_t ds_seed = 0;
  std::string ds_variant;
  double ds_split = 0.9;
  auto* s_ds = app.add_subcommand("gen-dataset", "sample parameters, simulate and write a training dataset");
  add_common(s_ds, c_ds);
  auto* o_ds_n = s_ds->add_option("--n-params", ds_n, "number of parameter sets");
  auto* o_ds_seed = s_ds->add_option("--seed", ds_seed, "master seed");
  auto* o_ds_var = s_ds->add_option("--variant", ds_variant, "model variant");
  auto* o_ds_split = s_ds->add_option("--split", ds_split, "train fraction");

  // histograms
  Common c_hg;
  std::string hg_dir;
  std::size_t hg_bins = 50;
  auto* s_hg = app.add_subcommand("histograms", "parameter histograms of a dataset");
  add_common(s_hg, c_hg);
  auto* o_hg_dir = s_hg->add_option("--dataset", hg_dir, "dataset directory");
  auto* o_hg_bins = s_hg->add_option("--bins", hg_bins, "bins per parameter");

  // GA flags shared by estimate and protocol
  struct GaFlags {
    std::uint64_t seed = 0;
    int generations = 0, population = 0;
    CLI::Option *o_seed{}, *o_gen{}, *o_pop{};
    void add(CLI::App* a) {
      o_seed = a->add_option("--seed", seed, "GA seed");
      o_gen = a->add_option("--generations", generations, "GA generations");
      o_pop = a->add_option("--population", population, "GA population");
    }
    json to_json() const {
      json j = json::object();
      set_if(o_seed, j, "seed", seed);
      set_if(o_gen, j, "generations", generations);
      set_if(o_pop, j, "population", population);
      return j;
    }
  };

  // estimate
  Common c_est;
  GaFlags ga_est;
  std::string est_curve, est_variant;
  auto* s_est = app.add_subcommand("estimate", "GA parameter estimation from a measured curve");
  add_common(s_est, c_est, true);
  ga_est.add(s_est);
  auto* o_est_curve = s_est->add_option("--curve", est_curve, "curve CSV (step,u_m,f_mps2)");
  auto* o_est_var = s_est->add_option("--variant", est_variant, "model variant");

  // pushover
  Common c_po;
  std::string po_params, po_curve;
  double po_drift = 10.0, po_step = 0.01;
  auto* s_po = app.add_subcommand("pushover", "monotonic pushover and yield displacement");
  add_common(s_po, c_po, true);
  auto* o_po_params = s_po->add_option("--params", po_params, "parameter JSON file");
  auto* o_po_curve = s_po->add_option("--curve", po_curve, "measured pushover CSV (u_m,f_mps2)");
  auto* o_po_drift = s_po->add_option("--drift-uy", po_drift, "maximum drift [u_y]");
  auto* o_po_step = s_po->add_option("--step-uy", po_step, "displacement step [u_y]");

  // tha
  Common c_tha;
  std::string tha_params, tha_motion;
  double tha_scale = 1.0, tha_xi = 0.05;
  auto* s_tha = app.add_subcommand("tha", "nonlinear time-history analysis");
  add_common(s_tha, c_tha, true);
  auto* o_tha_params = s_tha->add_option("--params", tha_params, "parameter JSON file");
  auto* o_tha_motion = s_tha->add_option("--motion", tha_motion, "ground motion (t, a_g in g)");
  auto* o_tha_scale = s_tha->add_option("--scale", tha_scale, "amplitude scale factor");
  auto* o_tha_xi = s_tha->add_option("--damping", tha_xi, "viscous damping ratio");

  // ida
  Common c_ida;
  std::string ida_params;
  std::vector<std::string> ida_motions;
  auto* s_ida = app.add_subcommand("ida", "incremental dynamic analysis grid");
  add_common(s_ida, c_ida);
  auto* o_ida_params = s_ida->add_option("--params", ida_params, "parameter JSON file");
  auto* o_ida_motions = s_ida->add_option("--motion", ida_motions, "ground motion file (repeatable)");

  // fragility
  Common c_fr;
  std::string fr_ida;
  std::vector<double> fr_thr;
  std::vector<std::string> fr_labels;
  auto* s_fr = app.add_subcommand("fragility", "lognormal fragility curves and KL report from an IDA grid");
  add_common(s_fr, c_fr, true);
  auto* o_fr_ida = s_fr->add_option("--ida", fr_ida, "IDA grid CSV (motion,sa_g,peak_u_m)");
  auto* o_fr_thr = s_fr->add_option("--thresholds", fr_thr, "peak displacement thresholds [m]")->delimiter(',');
  auto* o_fr_lab = s_fr->add_option("--labels", fr_labels, "damage state labels")->delimiter(',');

  // protocol
  Common c_pr;
  GaFlags ga_pr;
  std::string pr_spec, pr_push, pr_curve, pr_variant, pr_est;
  std::vector<std::string> pr_weights;
  auto* s_pr = app.add_subcommand("protocol", "pushover -> optimal history -> test and estimate");
  add_common(s_pr, c_pr);
  ga_pr.add(s_pr);
  auto* o_pr_spec = s_pr->add_option("--specimen", pr_spec, "virtual specimen parameter JSON");
  auto* o_pr_push = s_pr->add_option("--pushover", pr_push, "measured pushover CSV");
  auto* o_pr_curve = s_pr->add_option("--curve", pr_curve, "measured response to the optimal history (CSV)");
  auto* o_pr_var = s_pr->add_option("--variant", pr_variant, "target model variant");
  auto* o_pr_est = s_pr->add_option("--estimator", pr_est, "ga or cnn");
  auto* o_pr_w = s_pr->add_option("--weights", pr_weights, "weights.bwnn file (repeatable)");

  // synth-motion
  Common c_sy;
  std::uint64_t sy_seed = 0;
  double sy_dur = 20.0, sy_pga = 0.3, sy_dt = 0.01;
  std::string sy_label;
  auto* s_sy = app.add_subcommand("synth-motion", "synthetic filtered white-noise ground motion");
  add_common(s_sy, c_sy);
  auto* o_sy_seed = s_sy->add_option("--seed", sy_seed, "seed");
  auto* o_sy_dur = s_sy->add_option("--duration", sy_dur, "duration [s]");
  auto* o_sy_pga = s_sy->add_option("--pga", sy_pga, "peak ground acceleration [g]");
  auto* o_sy_dt = s_sy->add_option("--dt", sy_dt, "time step [s]");
  auto* o_sy_label = s_sy->add_option("--label", sy_label, "record label (also the file name)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (s_hist->parsed()) return cmd_history(c_hist, hf_hist);
    if (s_sim->parsed()) return cmd_simulate(c_sim, hf_sim, sim_params, o_sim_params, sim_sub, o_sim_sub);
    if (s_ds->parsed()) {
      json f = json::object();
      set_if(o_ds_n, f, "n_params", ds_n);
      set_if(o_ds_seed, f, "seed", ds_seed);
      set_if(o_ds_var, f, "variant", ds_variant);
      set_if(o_ds_split, f, "split", ds_split);
      return cmd_gen_dataset(c_ds, f);
    }
    if (s_hg->parsed()) {
      json f = json::object();
      if (o_hg_dir->count()) f["dataset"] = abs_path(hg_dir);
      set_if(o_hg_bins, f, "bins", hg_bins);
      return cmd_histograms(c_hg, f);
    }
    if (s_est->parsed()) {
      json f = json::object();
      if (o_est_curve->count()) f["curve"] = abs_path(est_curve);
      set_if(o_est_var, f, "variant", est_variant);
      return cmd_estimate(c_est, f, ga_est.to_json());
    }
    if (s_po->parsed()) {
      json f = json::object();
      if (o_po_params->count()) f["params"] = abs_path(po_params);
      if (o_po_curve->count()) f["curve"] = abs_path(po_curve);
      set_if(o_po_drift, f, "max_drift_uy", po_drift);
      set_if(o_po_step, f, "step_uy", po_step);
      return cmd_pushover(c_po, f);
    }
    if (s_tha->parsed()) {
      json f = json::object();
      if (o_tha_params->count()) f["params"] = abs_path(tha_params);
      if (o_tha_motion->count()) f["motion"] = abs_path(tha_motion);
      set_if(o_tha_scale, f, "scale", tha_scale);
      set_if(o_tha_xi, f, "damping", tha_xi);
      return cmd_tha(c_tha, f);
    }
    if (s_ida->parsed()) {
      json f = json::object();
      if (o_ida_params->count()) f["params"] = abs_path(ida_params);
      if (o_ida_motions->count()) {
        f["motions"] = json::array();
        for (const auto& m : ida_motions) f["motions"].push_back(abs_path(m));
      }
      return cmd_ida(c_ida, f);
    }
    if (s_fr->parsed()) {
      json f = json::object();
      if (o_fr_ida->count()) f["ida_csv"] = abs_path(fr_ida);
      set_if(o_fr_thr, f, "thresholds", fr_thr);
      set_if(o_fr_lab, f, "labels", fr_labels);
      return cmd_fragility(c_fr, f);
    }
    if (s_pr->parsed()) {
      json f = json::object();
      if (o_pr_spec->count()) f["specimen"] = abs_path(pr_spec);
      if (o_pr_push->count()) f["pushover_csv"] = abs_path(pr_push);
      if (o_pr_curve->count()) f["curve_csv"] = abs_path(pr_curve);
      set_if(o_pr_var, f, "variant", pr_variant);
      set_if(o_pr_est, f, "estimator", pr_est);
      if (o_pr_w->count()) {
        f["weights"] = json::array();
        for (const auto& w : pr_weights) f["weights"].push_back(abs_path(w));
      }
      return cmd_protocol(c_pr, f, ga_pr.to_json());
    }
    if (s_sy->parsed()) {
      json f = json::object();
      set_if(o_sy_seed, f, "seed", sy_seed);
      set_if(o_sy_dur, f, "duration", sy_dur);
      set_if(o_sy_pga, f, "pga", sy_pga);
      set_if(o_sy_dt, f, "dt", sy_dt);
      set_if(o_sy_label, f, "label", sy_label);
      return cmd_synth(c_sy, f);
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
