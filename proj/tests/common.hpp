// Shared helpers for the test binaries.
#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "bwlab/params.hpp"
#include "oracles.hpp"

namespace testing_util {

/// Uniform draw inside the admissible bounds, masked for the variant.
inline bwlab::BwParams random_params(std::mt19937_64& rng, bwlab::Variant v = bwlab::Variant::mBWBN) {
  bwlab::BwParams p;
  for (std::size_t i = 0; i < bwlab::kNumParams; ++i) {
    std::uniform_real_distribution<double> d(bwlab::kBounds[i].lo, bwlab::kBounds[i].hi);
    p[static_cast<bwlab::ParamId>(i)] = d(rng);
  }
  return bwlab::apply_mask(p, v);
}

inline oracle::Params to_oracle(const bwlab::BwParams& p) {
  return {p.T, p.Fy, p.alpha, p.beta, p.n, p.delta_nu, p.delta_eta, p.zeta0, p.p, p.q, p.psi, p.delta_psi, p.lambda};
}

/// Fresh scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto d = std::filesystem::temp_directory_path() / ("bwlab_test_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

}  // namespace testing_util
