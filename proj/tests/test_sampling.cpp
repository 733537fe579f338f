#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bwlab/sampling.hpp"
#include "oracles.hpp"

using namespace bwlab;

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

TEST(Sampling, DrawsRespectBoundsAndMasks) {
  const auto d = default_distributions();
  Rng rng = make_rng(3);
  for (Variant v : {Variant::BW, Variant::BWdeg, Variant::BWBNlike, Variant::mBWBN}) {
    for (int i = 0; i < 500; ++i) {
      const BwParams p = sample_params(d, v, rng);
      EXPECT_TRUE(within_bounds(p));
      EXPECT_NO_THROW(validate(p));
      for (std::size_t k = 0; k < kNumParams; ++k) {
        const auto id = static_cast<ParamId>(k);
        if (!is_active(v, id)) {
          EXPECT_EQ(p[id], neutral_value(id));
        }
      }
    }
  }
}

TEST(Sampling, SameSeedSameDraw) {
  const auto d = default_distributions();
  EXPECT_EQ(sample_params(d, Variant::mBWBN, 42), sample_params(d, Variant::mBWBN, 42));
  EXPECT_NE(sample_params(d, Variant::mBWBN, 42), sample_params(d, Variant::mBWBN, 43));
}

TEST(Sampling, PinchingMarginalMatchesTruncatedNormal) {
  const auto d = default_distributions();
  const std::size_t jq = static_cast<std::size_t>(ParamId::q) - kNumIndependent;
  const double mu = d.pinching.mean[jq], sd = std::sqrt(d.pinching.covariance[jq][jq]);
  const double lo = d.pinching.lo[jq], hi = d.pinching.hi[jq];
  Rng rng = make_rng(5);
  std::vector<double> q(100000);
  for (double& x : q) x = sample_params(d, Variant::mBWBN, rng).q;
  std::sort(q.begin(), q.end());
  // Kolmogorov-Smirnov statistic against the numerically integrated CDF,
  // evaluated on a grid of sample quantiles.
  double ks = 0.0;
  const double n = static_cast<double>(q.size());
  for (std::size_t i = 0; i < q.size(); i += 97) {
    const double F = oracle::truncated_normal_cdf(q[i], mu, sd, lo, hi);
    ks = std::max({ks, std::abs(F - static_cast<double>(i + 1) / n), std::abs(F - static_cast<double>(i) / n)});
  }
  EXPECT_LT(ks, 0.02);
}

TEST(Sampling, UniformPeriodIsFlat) {
  const auto d = default_distributions();
  Rng rng = make_rng(6);
  std::vector<int> bins(50, 0);
  const ParamBound& b = bound(ParamId::T);
  for (int i = 0; i < 100000; ++i) {
    const double t = sample_params(d, Variant::BW, rng).T;
    ++bins[std::min<std::size_t>(49, static_cast<std::size_t>((t - b.lo) / (b.hi - b.lo) * 50))];
  }
  const auto [mn, mx] = std::minmax_element(bins.begin(), bins.end());
  EXPECT_LT(static_cast<double>(*mx) / *mn, 1.3);
}

TEST(PerturbUy, MeanAndSpread) {
  Rng rng = make_rng(7);
  std::vector<double> a(100000), b(100000);
  for (double& x : a) x = perturb_uy(1.12, rng);
  for (double& x : b) x = perturb_uy(1.0, rng);
  EXPECT_GE(mean_of(a), 1.115);
  EXPECT_LE(mean_of(a), 1.125);
  EXPECT_GE(sd_of(b), 0.098);
  EXPECT_LE(sd_of(b), 0.102);
  EXPECT_EQ(perturb_uy(0.0112, rng, 0.0), 0.0112);
  EXPECT_THROW(perturb_uy(0.0, rng), DomainError);
}

TEST(ForceNoise, StatisticsAndInvariants) {
  HysteresisCurve c;
  for (int i = 0; i < 100000; ++i) {
    c.u.push_back(1e-3 * i);
    c.f.push_back(1.0 + 0.5 * std::sin(0.01 * i));
  }
  Rng rng = make_rng(8);
  const HysteresisCurve same = add_force_noise(c, 0.0, rng);
  EXPECT_EQ(same.f, c.f);
  const HysteresisCurve noisy = add_force_noise(c, 0.008, rng);
  EXPECT_EQ(noisy.u, c.u);
  std::vector<double> rel(c.f.size());
  for (std::size_t i = 0; i < rel.size(); ++i) rel[i] = noisy.f[i] / c.f[i] - 1.0;
  EXPECT_GE(sd_of(rel), 0.0075);
  EXPECT_LE(sd_of(rel), 0.0085);
  EXPECT_THROW(add_force_noise(c, -0.1, rng), DomainError);
}

TEST(MinMax, EndpointsAndRoundTrip) {
  EXPECT_EQ(minmax_normalize(2.0, 2.0, 5.0), 0.0);
  EXPECT_EQ(minmax_normalize(5.0, 2.0, 5.0), 1.0);
  EXPECT_THROW(minmax_normalize(1.0, 2.0, 2.0), DomainError);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-100.0, 100.0);
  for (int i = 0; i < 10000; ++i) {
    const double lo = u(rng), hi = lo + 1.0 + std::abs(u(rng));
    const double v = u(rng);
    EXPECT_NEAR(minmax_denormalize(minmax_normalize(v, lo, hi), lo, hi), v, 1e-12 * std::max(1.0, std::abs(v)));
  }
}

TEST(Preset, JsonRoundTripAndOverrides) {
  const auto d = default_distributions();
  const auto back = distributions_from_json(to_json(d));
  EXPECT_EQ(to_json(back), to_json(d));
  const auto o = distributions_from_json(nlohmann::json::parse(R"({"marginals": {"alpha": {"mean": 0.2}}})"));
  EXPECT_EQ(o.marginals[static_cast<std::size_t>(ParamId::alpha)].mean, 0.2);
  EXPECT_EQ(o.marginals[static_cast<std::size_t>(ParamId::T)].lo, d.marginals[0].lo);
}

TEST(Preset, RejectsInvalidConfigs) {
  using nlohmann::json;
  EXPECT_THROW(distributions_from_json(json::parse(R"({"colour": 1})")), ConfigError);
  EXPECT_THROW(distributions_from_json(json::parse(R"({"marginals": {"T": {"lo": 0.0}}})")), ConfigError);
  EXPECT_THROW(distributions_from_json(json::parse(R"({"marginals": {"q": {"lo": 0.1}}})")), ConfigError);
  EXPECT_THROW(distributions_from_json(json::parse(R"({"marginals": {"T": {"shape": 1}}})")), ConfigError);
  json neg = to_json(default_distributions());
  neg["pinching"]["covariance"][0][0] = -1.0;
  EXPECT_THROW(distributions_from_json(neg), ConfigError);
  json asym = to_json(default_distributions());
  asym["pinching"]["covariance"][0][1] = 0.01;
  EXPECT_THROW(distributions_from_json(asym), ConfigError);
}

TEST(Preset, CorrelatedPinchingStaysInBounds) {
  auto d = default_distributions();
  const std::size_t a = 0, b = 4;  // zeta0 and delta_psi
  const double c = 0.5 * std::sqrt(d.pinching.covariance[a][a] * d.pinching.covariance[b][b]);
  d.pinching.covariance[a][b] = d.pinching.covariance[b][a] = c;
  validate(d);
  Rng rng = make_rng(10);
  for (int i = 0; i < 2000; ++i) EXPECT_TRUE(within_bounds(sample_params(d, Variant::mBWBN, rng)));
}
