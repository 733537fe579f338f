// bwlab: Bouc-Wen class hysteresis toolkit
//
// Training / test datasets of (hysteresis curve, parameter vector) records.
//
// On disk:
//   manifest.json        schema, history, normalization ranges, partitions
//   train/records.bin    noisy records, grouped by noise level
//   test/records.bin     noise-free records
// A record is 2*d + 13 little-endian float32 values: the (u, f) pairs of the
// curve interleaved and min-max normalized with the dataset-wide channel
// ranges, followed by the 13 parameters normalized by their admissible bounds.
//
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"

#include "bwlab/errors.hpp"
#include "bwlab/io.hpp"
#include "bwlab/loading.hpp"
#include "bwlab/model.hpp"
#include "bwlab/parallel.hpp"
#include "bwlab/params.hpp"
#include "bwlab/random.hpp"
#include "bwlab/sampling.hpp"

namespace bwlab {

inline constexpr int kDatasetSchemaVersion = 1;

struct NoiseLevel {
  double cov = 0.0;
  std::size_t count = 0;
};

struct NoiseSpec {
  std::vector<NoiseLevel> levels{{0.0, 300000}, {0.002, 300000}, {0.005, 300000}, {0.008, 100000}};

  std::size_t total() const {
    std::size_t n = 0;
    for (const auto& l : levels) n += l.count;
    return n;
  }

  /// Default levels with counts scaled from the 450k-set baseline to n_train.
  static NoiseSpec scaled_default(std::size_t n_train) {
    NoiseSpec s;
    for (auto& l : s.levels)
      l.count = static_cast<std::size_t>(std::llround(static_cast<double>(l.count) * n_train / 450000.0));
    return s;
  }
};

inline void validate(const NoiseSpec& s) {
  if (s.levels.empty()) throw ConfigError("noise spec has no levels");
  for (const auto& l : s.levels)
    if (!(l.cov >= 0.0)) throw ConfigError("noise cov must be non-negative");
}

struct DatasetConfig {
  ParamDistributions distributions = default_distributions();
  Variant variant = Variant::mBWBN;
  LoadingHistory history = reference_history(std::nullopt, 1.0);  // u_y field unused
  NoiseSpec noise;
  std::size_t n_params = 500;
  double split = 0.9;  // train fraction
  std::uint64_t seed = 0;
  double uy_cov = kUyCov;
  int substeps = kDefaultSubsteps;
};

struct ChannelRange {
  double lo = 0.0;
  double hi = 1.0;
};

struct DatasetManifest {
  int schema_version = kDatasetSchemaVersion;
  std::string history_label;
  std::size_t d = 0;
  std::size_t sample_count = 0;  // train records (sum of noise counts)
  std::size_t test_count = 0;
  std::size_t n_train_params = 0;
  std::size_t n_test_params = 0;
  std::vector<NoiseLevel> noise;
  std::vector<std::size_t> noise_first_record;
  std::uint64_t seed = 0;
  Variant variant = Variant::mBWBN;
  ChannelRange u_range;
  ChannelRange f_range;
  std::size_t resampled = 0;
  nlohmann::json history_json;
  nlohmann::json distributions_json;

  std::size_t record_floats() const { return 2 * d + kNumParams; }
  std::size_t record_bytes() const { return record_floats() * sizeof(float); }
};

inline nlohmann::json to_json(const DatasetManifest& m) {
  nlohmann::json params = nlohmann::json::array();
  for (const auto& b : kBounds) params.push_back({{"name", b.name}, {"lo", b.lo}, {"hi", b.hi}});
  nlohmann::json noise = nlohmann::json::array();
  for (std::size_t i = 0; i < m.noise.size(); ++i)
    noise.push_back({{"cov", m.noise[i].cov},
                     {"count", m.noise[i].count},
                     {"first_record", m.noise_first_record[i]},
                     {"byte_offset", m.noise_first_record[i] * m.record_bytes()}});
  nlohmann::json j;
  j["schema_version"] = m.schema_version;
  j["format"] = {{"dtype", "float32"},
                 {"endianness", "little"},
                 {"record_layout", "u1,f1,...,ud,fd,params[13]"},
                 {"record_floats", m.record_floats()},
                 {"record_bytes", m.record_bytes()}};
  j["history"] = m.history_json;
  j["history"]["d"] = m.d;
  j["variant"] = std::string(to_string(m.variant));
  j["seed"] = m.seed;
  j["sample_count"] = m.sample_count;
  j["normalization"] = {{"params", params},
                        {"channels",
                         {{"u_m", {{"lo", m.u_range.lo}, {"hi", m.u_range.hi}}},
                          {"f_mps2", {{"lo", m.f_range.lo}, {"hi", m.f_range.hi}}}}},
                        {"curves", "per-dataset"}};
  j["partitions"] = {
      {"train",
       {{"file", "train/records.bin"}, {"count", m.sample_count}, {"param_sets", m.n_train_params}, {"noise", noise}}},
      {"test",
       {{"file", "test/records.bin"},
        {"count", m.test_count},
        {"param_sets", m.n_test_params},
        {"noise", nlohmann::json::array({{{"cov", 0.0}, {"count", m.test_count}, {"first_record", 0}, {"byte_offset", 0}}})}}}};
  j["resampled"] = m.resampled;
  j["distributions"] = m.distributions_json;
  return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j) {
  try {
    DatasetManifest m;
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != kDatasetSchemaVersion)
      throw DomainError("dataset schema version " + std::to_string(m.schema_version) + " unsupported");
    m.history_json = j.at("history");
    m.history_label = m.history_json.at("label").get<std::string>();
    m.d = m.history_json.at("d").get<std::size_t>();
    m.variant = parse_variant(j.at("variant").get<std::string>());
    m.seed = j.at("seed").get<std::uint64_t>();
    m.sample_count = j.at("sample_count").get<std::size_t>();
    const auto& ch = j.at("normalization").at("channels");
    m.u_range = {ch.at("u_m").at("lo").get<double>(), ch.at("u_m").at("hi").get<double>()};
    m.f_range = {ch.at("f_mps2").at("lo").get<double>(), ch.at("f_mps2").at("hi").get<double>()};
    const auto& train = j.at("partitions").at("train");
    m.n_train_params = train.at("param_sets").get<std::size_t>();
    for (const auto& l : train.at("noise")) {
      m.noise.push_back({l.at("cov").get<double>(), l.at("count").get<std::size_t>()});
      m.noise_first_record.push_back(l.at("first_record").get<std::size_t>());
    }
    const auto& test = j.at("partitions").at("test");
    m.test_count = test.at("count").get<std::size_t>();
    m.n_test_params = test.at("param_sets").get<std::size_t>();
    m.resampled = j.value("resampled", std::size_t{0});
    m.distributions_json = j.value("distributions", nlohmann::json{});
    if (j.at("format").at("record_floats").get<std::size_t>() != m.record_floats())
      throw DomainError("manifest record size inconsistent with d");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("manifest: ") + e.what());
  }
}

namespace detail {

inline void put_f32(std::vector<unsigned char>& buf, double v) {
  const auto f = static_cast<float>(v);
  std::uint32_t bits = std::bit_cast<std::uint32_t>(f);
  for (int b = 0; b < 4; ++b) buf.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xffu));
}

inline float get_f32(const unsigned char* p) {
  std::uint32_t bits = 0;
  for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return std::bit_cast<float>(bits);
}

struct SimulatedSample {
  BwParams params;
  double u_y = 0.0;  // perturbed
  HysteresisCurve curve;
};

inline void append_record(std::vector<unsigned char>& buf, const HysteresisCurve& c, const BwParams& p,
                          const ChannelRange& ur, const ChannelRange& fr) {
  for (std::size_t i = 0; i < c.size(); ++i) {
    put_f32(buf, minmax_normalize(c.u[i], ur.lo, ur.hi));
    put_f32(buf, minmax_normalize(c.f[i], fr.lo, fr.hi));
  }
  for (std::size_t k = 0; k < kNumParams; ++k)
    put_f32(buf, minmax_normalize(p[static_cast<ParamId>(k)], kBounds[k].lo, kBounds[k].hi));
}

inline void widen(ChannelRange& r, const std::vector<double>& v) {
  for (double x : v) {
    r.lo = std::min(r.lo, x);
    r.hi = std::max(r.hi, x);
  }
}

}  // namespace detail

struct DatasetSummary {
  DatasetManifest manifest;
  std::filesystem::path dir;
};

/// Samples n_params parameter sets, simulates each under the history scaled
/// by a perturbed u_y, adds noise to selected train copies and writes the
/// dataset to `dir`. Byte-identical output for identical config.
inline DatasetSummary generate_dataset(const DatasetConfig& cfg, const std::filesystem::path& dir) {
  validate(cfg.distributions);
  validate(cfg.noise);
  validate(cfg.history);
  if (!(cfg.split > 0.0 && cfg.split <= 1.0)) throw ConfigError("split must be in (0, 1]");
  if (cfg.n_params == 0) throw ConfigError("n_params must be positive");
  const auto n_train = static_cast<std::size_t>(std::llround(cfg.split * static_cast<double>(cfg.n_params)));
  const std::size_t n_test = cfg.n_params - n_train;
  for (const auto& l : cfg.noise.levels)
    if (l.count > n_train)
      throw ConfigError("noise level count " + std::to_string(l.count) + " exceeds train parameter sets " +
                        std::to_string(n_train));

  const std::vector<double> unit_series = discretize_normalized(cfg.history);
  const std::size_t d = unit_series.size();

  std::vector<detail::SimulatedSample> samples(cfg.n_params);
  std::vector<std::size_t> retries(cfg.n_params, 0);
  parallel_for(cfg.n_params, [&](std::size_t i) {
    constexpr std::size_t kMaxAttempts = 100;
    for (std::size_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
      Rng rng = make_rng(cfg.seed, {1, i, attempt});
      detail::SimulatedSample s;
      s.params = sample_params(cfg.distributions, cfg.variant, rng);
      s.u_y = perturb_uy(s.params.uy(), rng, cfg.uy_cov);
      std::vector<double> x(unit_series);
      for (double& v : x) v *= s.u_y;
      try {
        s.curve = simulate_quasi_static(s.params, x, cfg.substeps);
      } catch (const DomainError&) {
        ++retries[i];
        continue;
      }
      samples[i] = std::move(s);
      return;
    }
    throw DomainError("dataset sample " + std::to_string(i) + ": simulation failed after resampling");
  });

  // Which train parameter sets receive a copy at each noise level.
  std::vector<std::vector<std::size_t>> chosen(cfg.noise.levels.size());
  for (std::size_t l = 0; l < cfg.noise.levels.size(); ++l) {
    std::vector<std::size_t> idx(n_train);
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng = make_rng(cfg.seed, {2, l});
    const std::size_t k = cfg.noise.levels[l].count;
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (n_train - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    chosen[l] = std::move(idx);
  }
  auto noisy = [&](std::size_t level, std::size_t rank) {
    Rng rng = make_rng(cfg.seed, {3, level, rank});
    return add_force_noise(samples[chosen[level][rank]].curve, cfg.noise.levels[level].cov, rng);
  };

  DatasetManifest m;
  m.history_label = cfg.history.label;
  m.d = d;
  m.seed = cfg.seed;
  m.variant = cfg.variant;
  m.noise = cfg.noise.levels;
  m.n_train_params = n_train;
  m.n_test_params = n_test;
  m.test_count = n_test;
  m.sample_count = cfg.noise.total();
  m.resampled = std::accumulate(retries.begin(), retries.end(), std::size_t{0});
  LoadingHistory hj = cfg.history;
  hj.u_y = 1.0;
  m.history_json = to_json(hj);
  m.history_json.erase("u_y_m");
  m.history_json["u_y"] = "per-sample, perturbed";
  m.distributions_json = to_json(cfg.distributions);

  // Channel ranges over every emitted train record.
  constexpr double inf = std::numeric_limits<double>::infinity();
  m.u_range = {inf, -inf};
  m.f_range = {inf, -inf};
  for (std::size_t l = 0; l < chosen.size(); ++l)
    for (std::size_t r = 0; r < chosen[l].size(); ++r) {
      const HysteresisCurve c = noisy(l, r);
      detail::widen(m.u_range, c.u);
      detail::widen(m.f_range, c.f);
    }
  if (m.sample_count == 0)
    for (std::size_t i = n_train; i < cfg.n_params; ++i) {
      detail::widen(m.u_range, samples[i].curve.u);
      detail::widen(m.f_range, samples[i].curve.f);
    }
  if (!(m.u_range.hi > m.u_range.lo) || !(m.f_range.hi > m.f_range.lo))
    throw DomainError("dataset channel range is degenerate");

  std::size_t first = 0;
  for (const auto& l : cfg.noise.levels) {
    m.noise_first_record.push_back(first);
    first += l.count;
  }

  std::filesystem::create_directories(dir / "train");
  std::filesystem::create_directories(dir / "test");
  {
    std::ofstream out(dir / "train" / "records.bin", std::ios::binary);
    if (!out) throw DomainError("cannot write train records");
    std::vector<unsigned char> buf;
    for (std::size_t l = 0; l < chosen.size(); ++l)
      for (std::size_t r = 0; r < chosen[l].size(); ++r) {
        buf.clear();
        detail::append_record(buf, noisy(l, r), samples[chosen[l][r]].params, m.u_range, m.f_range);
        out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
      }
    if (!out) throw DomainError("write failed for train records");
  }
  {
    std::ofstream out(dir / "test" / "records.bin", std::ios::binary);
    if (!out) throw DomainError("cannot write test records");
    std::vector<unsigned char> buf;
    for (std::size_t i = n_train; i < cfg.n_params; ++i) {
      buf.clear();
      detail::append_record(buf, samples[i].curve, samples[i].params, m.u_range, m.f_range);
      out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    }
    if (!out) throw DomainError("write failed for test records");
  }
  write_json(dir / "manifest.json", to_json(m));
  return {m, dir};
}

// ---------------------------------------------------------------------------
// Reading

struct DatasetRecord {
  HysteresisCurve curve;  // denormalized
  BwParams params;        // denormalized
};

class DatasetReader {
 public:
  explicit DatasetReader(const std::filesystem::path& dir)
      : dir_(dir), manifest_(manifest_from_json(read_json(dir / "manifest.json"))) {
    train_ = load(dir / "train" / "records.bin", manifest_.sample_count);
    test_ = load(dir / "test" / "records.bin", manifest_.test_count);
  }

  const DatasetManifest& manifest() const { return manifest_; }
  std::size_t train_size() const { return manifest_.sample_count; }
  std::size_t test_size() const { return manifest_.test_count; }

  DatasetRecord train(std::size_t i) const { return decode(train_, i); }
  DatasetRecord test(std::size_t i) const { return decode(test_, i); }

  /// Raw normalized floats of a record.
  std::vector<float> raw(bool test_partition, std::size_t i) const {
    const auto& bytes = test_partition ? test_ : train_;
    const std::size_t rb = manifest_.record_bytes();
    std::vector<float> out(manifest_.record_floats());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = detail::get_f32(bytes.data() + i * rb + 4 * k);
    return out;
  }

 private:
  std::vector<unsigned char> load(const std::filesystem::path& p, std::size_t count) const {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DomainError("cannot open " + p.string());
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (bytes.size() != count * manifest_.record_bytes())
      throw DomainError(p.string() + ": size does not match manifest");
    return bytes;
  }

  DatasetRecord decode(const std::vector<unsigned char>& bytes, std::size_t i) const {
    const std::size_t rb = manifest_.record_bytes();
    if ((i + 1) * rb > bytes.size()) throw DomainError("record index out of range");
    const unsigned char* p = bytes.data() + i * rb;
    DatasetRecord r;
    r.curve.u.resize(manifest_.d);
    r.curve.f.resize(manifest_.d);
    for (std::size_t k = 0; k < manifest_.d; ++k) {
      r.curve.u[k] = minmax_denormalize(detail::get_f32(p + 8 * k), manifest_.u_range.lo, manifest_.u_range.hi);
      r.curve.f[k] = minmax_denormalize(detail::get_f32(p + 8 * k + 4), manifest_.f_range.lo, manifest_.f_range.hi);
    }
    const unsigned char* q = p + 8 * manifest_.d;
    for (std::size_t k = 0; k < kNumParams; ++k) {
      const double x = std::clamp(static_cast<double>(detail::get_f32(q + 4 * k)), 0.0, 1.0);
      r.params[static_cast<ParamId>(k)] = minmax_denormalize(x, kBounds[k].lo, kBounds[k].hi);
    }
    r.params.variant = manifest_.variant;
    return r;
  }

  std::filesystem::path dir_;
  DatasetManifest manifest_;
  std::vector<unsigned char> train_;
  std::vector<unsigned char> test_;
};

// ---------------------------------------------------------------------------
// Histograms

struct HistogramRow {
  std::string param;
  double bin_lo;
  double bin_hi;
  std::size_t count;
};

/// Per-parameter counts over `bins` equal bins spanning the admissible bounds.
inline std::vector<HistogramRow> histograms(const std::vector<BwParams>& samples, std::size_t bins = 50) {
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  std::vector<HistogramRow> rows;
  for (std::size_t k = 0; k < kNumParams; ++k) {
    const ParamBound& b = kBounds[k];
    std::vector<std::size_t> counts(bins, 0);
    for (const auto& s : samples) {
      const double x = s[static_cast<ParamId>(k)];
      auto bin = static_cast<std::ptrdiff_t>(std::floor((x - b.lo) / (b.hi - b.lo) * static_cast<double>(bins)));
      bin = std::clamp<std::ptrdiff_t>(bin, 0, static_cast<std::ptrdiff_t>(bins) - 1);
      ++counts[static_cast<std::size_t>(bin)];
    }
    const double w = (b.hi - b.lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i < bins; ++i) {
      const double lo = b.lo + w * static_cast<double>(i);
      const double hi = i + 1 == bins ? b.hi : b.lo + w * static_cast<double>(i + 1);
      rows.push_back({std::string(b.name), lo, hi, counts[i]});
    }
  }
  return rows;
}

/// Distinct parameter sets stored in a dataset (both partitions).
inline std::vector<BwParams> dataset_param_sets(const DatasetReader& ds) {
  std::set<std::array<double, kNumParams>> seen;
  std::vector<BwParams> out;
  auto take = [&](const DatasetRecord& r) {
    if (seen.insert(r.params.to_array()).second) out.push_back(r.params);
  };
  for (std::size_t i = 0; i < ds.train_size(); ++i) take(ds.train(i));
  for (std::size_t i = 0; i < ds.test_size(); ++i) take(ds.test(i));
  return out;
}

inline CsvTable histogram_table(const std::vector<HistogramRow>& rows) {
  CsvTable t{{"param", "bin_lo", "bin_hi", "count"}, {}};
  for (const auto& r : rows) t.rows.push_back({r.param, fmt9(r.bin_lo), fmt9(r.bin_hi), std::to_string(r.count)});
  return t;
}

}  // namespace bwlab
