// bwlab: Bouc-Wen class hysteresis toolkit
//
// Cyclic displacement histories expressed in multiples of the yield
// displacement. Each amplitude A is one symmetric cycle 0 -> +A -> -A -> 0.
//
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "bwlab/errors.hpp"
#include "bwlab/params.hpp"

namespace bwlab {

inline constexpr double kDefaultStepSize = 0.1;      // in u_y
inline constexpr std::size_t kReferenceLength = 430;  // steps of the reference history

struct LoadingHistory {
  std::vector<double> amplitudes;  // [u_y]
  double step_size = kDefaultStepSize;  // [u_y]
  double u_y = 1.0;                // [m]
  std::string label;

  double cumulative_displacement() const {
    return std::accumulate(amplitudes.begin(), amplitudes.end(), 0.0);
  }
  double max_amplitude() const {
    return amplitudes.empty() ? 0.0 : *std::max_element(amplitudes.begin(), amplitudes.end());
  }
  bool operator==(const LoadingHistory&) const = default;
};

inline void validate(const LoadingHistory& h) {
  if (h.amplitudes.empty()) throw DomainError("loading history has no cycles");
  for (double a : h.amplitudes)
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("loading amplitudes must be positive");
  if (!(h.step_size > 0.0)) throw DomainError("step size must be positive");
  if (!(h.u_y > 0.0)) throw DomainError("yield displacement must be positive");
}

namespace detail {

// Number of steps to cover `length` with steps of `step`; the last may be short.
inline std::size_t segment_steps(double length, double step) {
  const double r = length / step;
  const auto n = static_cast<std::size_t>(std::ceil(r - 1e-9));
  return std::max<std::size_t>(n, 1);
}

inline void append_segment(std::vector<double>& out, double from, double to, double step) {
  const std::size_t n = segment_steps(std::abs(to - from), step);
  const double dir = to > from ? 1.0 : -1.0;
  for (std::size_t k = 1; k < n; ++k) out.push_back(from + dir * static_cast<double>(k) * step);
  out.push_back(to);
}

}  // namespace detail

/// Per-step displacement series in u_y units. The path starts from rest, so
/// the first value is one step away from zero; the last value is zero.
inline std::vector<double> discretize_normalized(const LoadingHistory& h) {
  validate(h);
  std::vector<double> out;
  for (double a : h.amplitudes) {
    detail::append_segment(out, 0.0, a, h.step_size);
    detail::append_segment(out, a, -a, h.step_size);
    detail::append_segment(out, -a, 0.0, h.step_size);
  }
  return out;
}

/// Per-step displacement series in metres.
inline std::vector<double> discretize(const LoadingHistory& h) {
  std::vector<double> out = discretize_normalized(h);
  for (double& x : out) x *= h.u_y;
  return out;
}

inline std::size_t discretized_length(const LoadingHistory& h) {
  std::size_t n = 0;
  for (double a : h.amplitudes)
    n += 2 * detail::segment_steps(a, h.step_size) + detail::segment_steps(2 * a, h.step_size);
  return n;
}

/// Total path length in u_y units (four times the cumulative displacement).
inline double path_length(const LoadingHistory& h) { return 4.0 * h.cumulative_displacement(); }

/// Recovers cycle amplitudes from a discretized series by locating the
/// positive turning points. Inverse of discretize for symmetric cycles.
inline std::vector<double> detect_amplitudes(const std::vector<double>& series, double u_y = 1.0) {
  std::vector<double> amps;
  double prev = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double next = i + 1 < series.size() ? series[i + 1] : 0.0;
    const double x = series[i];
    if (x > 0.0 && x >= prev && x > next) amps.push_back(x / u_y);
    prev = x;
  }
  return amps;
}

// ---------------------------------------------------------------------------
// Constructors

inline LoadingHistory make_history(std::vector<double> amplitudes, double u_y, std::string label,
                                   double step_size = kDefaultStepSize) {
  LoadingHistory h{std::move(amplitudes), step_size, u_y, std::move(label)};
  validate(h);
  return h;
}

/// The 18 histories LH1..LH18 spanning elastic, single-cycle, repeated,
/// incremental and constant-cumulative-displacement patterns.
inline LoadingHistory table2_history(int index, double u_y) {
  static const std::vector<std::vector<double>> table{
      {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5},
      {1.0, 1.0, 1.0, 1.0},
      {2.0},
      {3.0},
      {4.0},
      {5.0},
      {6.0},
      {2.0, 2.0},
      {2.0, 2.0, 2.0, 2.0},
      {2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0},
      {2.0, 3.0},
      {2.0, 3.0, 4.0},
      {2.0, 3.0, 4.0, 5.0},
      {2.0, 3.0, 4.0, 5.0, 6.0},
      {2.0, 2.0, 3.0, 3.0, 4.0, 4.0},
      {2.0, 2.0, 2.0, 4.0, 4.0, 4.0},
      {2.0, 2.0, 2.0, 3.0, 4.0, 5.0},
      {2.0, 2.0, 2.0, 2.0, 5.0, 5.0},
  };
  if (index < 1 || index > static_cast<int>(table.size()))
    throw DomainError("loading history index " + std::to_string(index) + " outside 1..18");
  return make_history(table[static_cast<std::size_t>(index - 1)], u_y, "LH" + std::to_string(index));
}

/// Minimal history sufficient for one hysteresis category.
inline LoadingHistory module_history(Category c, double u_y) {
  switch (c) {
    case Category::BSC: return make_history({3.0, 3.0}, u_y, "MOD_BSC");
    case Category::DGD: return make_history({2.0, 2.0, 3.0, 3.0}, u_y, "MOD_DGD");
    case Category::PCH: return make_history({2.0, 2.0, 3.0, 3.0, 4.0, 4.0}, u_y, "MOD_PCH");
  }
  throw DomainError("unknown category");
}

inline LoadingHistory optimal_history(Variant v, double u_y) {
  switch (v) {
    case Variant::BW: return make_history({2.0, 2.0, 3.0, 3.0}, u_y, "OPT_BW");
    case Variant::BWdeg: return make_history({2.0, 2.0, 3.0, 3.0}, u_y, "OPT_BWdeg");
    case Variant::BWBNlike: return make_history({2.0, 2.0, 3.0, 3.0, 4.0, 4.0}, u_y, "OPT_BWBN-like");
    case Variant::mBWBN: return make_history({2.0, 2.0, 3.0, 3.0, 4.0, 4.0}, u_y, "OPT_mBWBN");
  }
  throw DomainError("unknown variant");
}

/// Default reference amplitudes: paired cycles of increasing amplitude,
/// discretizing to exactly 430 steps at 0.1 u_y. The two 0.25 u_y cycles
/// need one shortened landing step per peak.
inline const std::vector<double>& default_reference_amplitudes() {
  static const std::vector<double> a{0.25, 0.25, 0.6, 0.6, 1.0, 1.0, 1.5, 1.5, 2.0, 2.0};
  return a;
}

inline LoadingHistory reference_history(const std::optional<std::vector<double>>& amplitudes, double u_y,
                                        bool strict = true) {
  LoadingHistory h = make_history(amplitudes.value_or(default_reference_amplitudes()), u_y, "REF");
  if (strict && discretized_length(h) != kReferenceLength)
    throw DomainError("reference history discretizes to " + std::to_string(discretized_length(h)) +
                      " steps, expected " + std::to_string(kReferenceLength));
  return h;
}

/// Shape of the amplitude envelope: quadratic rise up to `rise_end`, plateau
/// to `plateau_end`, exponential decay with rate `decay` afterwards. Times are
/// fractions of the history.
struct EnvelopeShape {
  double rise_end = 0.25;
  double plateau_end = 0.5;
  double decay = 2.5;
};

inline double envelope_value(const EnvelopeShape& s, double t) {
  if (t < s.rise_end) return (t / s.rise_end) * (t / s.rise_end);
  if (t <= s.plateau_end) return 1.0;
  return std::exp(-s.decay * (t - s.plateau_end));
}

/// Cycle amplitudes following a rise-plateau-decay envelope with the largest
/// amplitude equal to `peak`. Amplitudes are rounded to the step grid.
inline LoadingHistory envelope_history(double peak, int n_cycles, double u_y, const EnvelopeShape& shape = {},
                                       double step_size = kDefaultStepSize) {
  if (!(peak > 0.0)) throw DomainError("envelope peak must be positive");
  if (n_cycles < 3) throw DomainError("envelope history needs at least 3 cycles");
  std::vector<double> env(static_cast<std::size_t>(n_cycles));
  for (int i = 0; i < n_cycles; ++i) env[static_cast<std::size_t>(i)] = envelope_value(shape, (i + 0.5) / n_cycles);
  const double top = *std::max_element(env.begin(), env.end());
  std::vector<double> amps;
  amps.reserve(env.size());
  for (double e : env) {
    if (e == top) {
      amps.push_back(peak);
      continue;
    }
    const double a = std::round(peak * e / top / step_size) * step_size;
    amps.push_back(std::clamp(a, std::min(step_size, peak), peak));
  }
  return make_history(std::move(amps), u_y, "ENV", step_size);
}

}  // namespace bwlab
