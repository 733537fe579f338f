// bwlab: Bouc-Wen class hysteresis toolkit
//
// Text formats: CSV tables (9 significant digits), params / history JSON.
//
#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "bwlab/errors.hpp"
#include "bwlab/loading.hpp"
#include "bwlab/model.hpp"
#include "bwlab/params.hpp"

namespace bwlab {

inline std::string fmt9(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

/// Minimal CSV table: header plus rows of numbers or strings.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw DomainError("CSV column '" + name + "' not found");
  }
  std::vector<double> numeric_column(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
      try {
        out.push_back(std::stod(r.at(c)));
      } catch (const std::exception&) {
        throw DomainError("CSV column '" + name + "': non-numeric value");
      }
    }
    return out;
  }
};

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    out.push_back(cell);
  }
  return out;
}
}  // namespace detail

inline std::string to_csv(const CsvTable& t) {
  std::string s;
  for (std::size_t i = 0; i < t.header.size(); ++i) s += (i ? "," : "") + t.header[i];
  s += '\n';
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
    s += '\n';
  }
  return s;
}

inline CsvTable parse_csv(const std::string& text) {
  CsvTable t;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (first) {
      t.header = detail::split_csv_line(line);
      first = false;
    } else {
      t.rows.push_back(detail::split_csv_line(line));
      if (t.rows.back().size() != t.header.size()) throw DomainError("CSV row width does not match header");
    }
  }
  if (first) throw DomainError("empty CSV");
  return t;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw DomainError("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DomainError("cannot write " + p.string());
  out << text;
  if (!out) throw DomainError("write failed for " + p.string());
}

inline nlohmann::json read_json(const std::filesystem::path& p) {
  try {
    return nlohmann::json::parse(read_text(p));
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(p.string() + ": " + e.what());
  }
}

inline void write_json(const std::filesystem::path& p, const nlohmann::json& j) { write_text(p, j.dump(2) + "\n"); }

// ---------------------------------------------------------------------------
// HysteresisCurve: step,u_m,f_mps2

inline CsvTable curve_table(const HysteresisCurve& c) {
  CsvTable t{{"step", "u_m", "f_mps2"}, {}};
  for (std::size_t i = 0; i < c.size(); ++i) t.rows.push_back({std::to_string(i + 1), fmt9(c.u[i]), fmt9(c.f[i])});
  return t;
}

inline HysteresisCurve curve_from_table(const CsvTable& t) {
  return {t.numeric_column("u_m"), t.numeric_column("f_mps2")};
}

/// Discretized history in the curve layout without the force column.
inline CsvTable series_table(const std::vector<double>& u) {
  CsvTable t{{"step", "u_m"}, {}};
  for (std::size_t i = 0; i < u.size(); ++i) t.rows.push_back({std::to_string(i + 1), fmt9(u[i])});
  return t;
}

// ---------------------------------------------------------------------------
// BwParams JSON: {"variant": "...", "T": ..., ...}

inline nlohmann::json to_json(const BwParams& p) {
  nlohmann::json j = nlohmann::json::object();
  j["variant"] = std::string(to_string(p.variant));
  for (std::size_t i = 0; i < kNumParams; ++i) j[std::string(kBounds[i].name)] = p[static_cast<ParamId>(i)];
  return j;
}

/// Missing parameters take their neutral values; unknown keys are rejected.
inline BwParams params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("params: expected an object");
  BwParams p = apply_mask(midpoint_params(), Variant::BW);
  p.variant = Variant::mBWBN;
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() == "variant") p.variant = parse_variant(it->get<std::string>());
      else p[param_id(it.key())] = it->get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("params: ") + e.what());
  }
  return p;
}

// ---------------------------------------------------------------------------
// LoadingHistory JSON: {label, u_y_m, step_size_uy, amplitudes_uy[]}

inline nlohmann::json to_json(const LoadingHistory& h) {
  return {{"label", h.label}, {"u_y_m", h.u_y}, {"step_size_uy", h.step_size}, {"amplitudes_uy", h.amplitudes}};
}

inline LoadingHistory history_from_json(const nlohmann::json& j) {
  try {
    for (auto it = j.begin(); it != j.end(); ++it)
      if (it.key() != "label" && it.key() != "u_y_m" && it.key() != "step_size_uy" && it.key() != "amplitudes_uy")
        throw ConfigError("history: unknown key '" + it.key() + "'");
    LoadingHistory h;
    h.label = j.value("label", std::string("CUSTOM"));
    h.u_y = j.at("u_y_m").get<double>();
    h.step_size = j.value("step_size_uy", kDefaultStepSize);
    h.amplitudes = j.at("amplitudes_uy").get<std::vector<double>>();
    validate(h);
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("history: ") + e.what());
  }
}

}  // namespace bwlab
