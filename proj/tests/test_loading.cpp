#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bwlab/loading.hpp"

using namespace bwlab;

namespace {

struct Row {
  std::vector<double> amps;
  double cumulative;
};

// Amplitude sequences and cumulative displacements of the 18 histories.
const std::vector<Row> kTable = {
    {{0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5}, 4.0},
    {{1.0, 1.0, 1.0, 1.0}, 4.0},
    {{2.0}, 2.0},
    {{3.0}, 3.0},
    {{4.0}, 4.0},
    {{5.0}, 5.0},
    {{6.0}, 6.0},
    {{2.0, 2.0}, 4.0},
    {{2.0, 2.0, 2.0, 2.0}, 8.0},
    {{2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0}, 16.0},
    {{2.0, 3.0}, 5.0},
    {{2.0, 3.0, 4.0}, 9.0},
    {{2.0, 3.0, 4.0, 5.0}, 14.0},
    {{2.0, 3.0, 4.0, 5.0, 6.0}, 20.0},
    {{2.0, 2.0, 3.0, 3.0, 4.0, 4.0}, 18.0},
    {{2.0, 2.0, 2.0, 4.0, 4.0, 4.0}, 18.0},
    {{2.0, 2.0, 2.0, 3.0, 4.0, 5.0}, 18.0},
    {{2.0, 2.0, 2.0, 2.0, 5.0, 5.0}, 18.0},
};

}  // namespace

TEST(Table2, AllHistoriesMatchTheTable) {
  for (int i = 1; i <= 18; ++i) {
    const LoadingHistory h = table2_history(i, 0.0112);
    EXPECT_EQ(h.amplitudes, kTable[static_cast<std::size_t>(i - 1)].amps) << "LH" << i;
    EXPECT_EQ(h.cumulative_displacement(), kTable[static_cast<std::size_t>(i - 1)].cumulative) << "LH" << i;
    EXPECT_EQ(h.label, "LH" + std::to_string(i));
  }
}

TEST(Table2, SpotValues) {
  EXPECT_EQ(table2_history(3, 1.0).amplitudes, std::vector<double>{2.0});
  EXPECT_EQ(table2_history(15, 1.0).cumulative_displacement(), 18.0);
  EXPECT_EQ(table2_history(1, 1.0).amplitudes.size(), 8u);
  EXPECT_EQ(table2_history(13, 1.0).amplitudes, (std::vector<double>{2.0, 3.0, 4.0, 5.0}));
}

TEST(Table2, OutOfRangeIndex) {
  EXPECT_THROW(table2_history(0, 1.0), DomainError);
  EXPECT_THROW(table2_history(19, 1.0), DomainError);
}

TEST(Modules, PerCategory) {
  const auto bsc = module_history(Category::BSC, 1.0);
  EXPECT_EQ(bsc.max_amplitude(), 3.0);
  EXPECT_EQ(bsc.amplitudes.size(), 2u);
  EXPECT_EQ(module_history(Category::DGD, 1.0).cumulative_displacement(), 10.0);
  EXPECT_EQ(module_history(Category::PCH, 1.0).amplitudes, table2_history(15, 1.0).amplitudes);
}

TEST(Optimal, PerVariant) {
  EXPECT_EQ(optimal_history(Variant::BW, 1.0).amplitudes, (std::vector<double>{2, 2, 3, 3}));
  EXPECT_EQ(optimal_history(Variant::mBWBN, 1.0).amplitudes, table2_history(15, 1.0).amplitudes);
  EXPECT_EQ(optimal_history(Variant::BWBNlike, 1.0).amplitudes, table2_history(15, 1.0).amplitudes);
  EXPECT_EQ(optimal_history(Variant::BWdeg, 1.0).cumulative_displacement(), 10.0);
}

TEST(Optimal, MbwbnExtendsBwdegPrefix) {
  const auto deg = optimal_history(Variant::BWdeg, 1.0).amplitudes;
  const auto full = optimal_history(Variant::mBWBN, 1.0).amplitudes;
  ASSERT_GE(full.size(), deg.size());
  EXPECT_TRUE(std::equal(deg.begin(), deg.end(), full.begin()));
  // The BSC module is contained too: two cycles reaching 3 u_y.
  EXPECT_EQ(std::count(deg.begin(), deg.end(), 3.0), 2);
}

TEST(Discretize, StepCounts) {
  EXPECT_EQ(discretize(table2_history(15, 1.0)).size(), 720u);
  EXPECT_EQ(discretize(table2_history(3, 1.0)).size(), 80u);
  EXPECT_EQ(discretized_length(table2_history(15, 1.0)), 720u);
  for (int i = 1; i <= 18; ++i) {
    const auto h = table2_history(i, 1.0);
    EXPECT_EQ(discretize(h).size(), static_cast<std::size_t>(std::lround(4.0 * h.cumulative_displacement() / 0.1)));
  }
}

TEST(Discretize, ShapeAndBounds) {
  for (int i = 1; i <= 18; ++i) {
    const auto h = table2_history(i, 0.02);
    const auto x = discretize(h);
    EXPECT_NEAR(std::abs(x.front()), 0.1 * 0.02, 1e-15);
    EXPECT_EQ(x.back(), 0.0);
    const double lim = h.max_amplitude() * h.u_y;
    double prev = 0.0;
    for (double v : x) {
      EXPECT_LE(std::abs(v), lim * (1.0 + 1e-15));
      EXPECT_LE(std::abs(v - prev), 0.1 * h.u_y * (1.0 + 1e-9));
      prev = v;
    }
  }
}

TEST(Discretize, RoundTripRecoversAmplitudes) {
  for (int i = 1; i <= 18; ++i) {
    const auto h = table2_history(i, 0.013);
    const auto found = detect_amplitudes(discretize(h), h.u_y);
    ASSERT_EQ(found.size(), h.amplitudes.size()) << "LH" << i;
    for (std::size_t k = 0; k < found.size(); ++k) EXPECT_NEAR(found[k], h.amplitudes[k], 1e-12);
  }
  const auto ref = reference_history(std::nullopt, 1.0);
  const auto found = detect_amplitudes(discretize(ref));
  ASSERT_EQ(found.size(), ref.amplitudes.size());
  for (std::size_t k = 0; k < found.size(); ++k) EXPECT_NEAR(found[k], ref.amplitudes[k], 1e-12);
}

TEST(Discretize, ShortLandingStep) {
  const auto x = discretize_normalized(make_history({0.25}, 1.0, "X"));
  // 0.1, 0.2, 0.25 | ... lands exactly on the targets.
  EXPECT_NEAR(x[0], 0.1, 1e-15);
  EXPECT_EQ(x[2], 0.25);
  EXPECT_NE(std::find(x.begin(), x.end(), -0.25), x.end());
}

TEST(Reference, DefaultHasFourHundredThirtySteps) {
  const auto h = reference_history(std::nullopt, 0.0112);
  EXPECT_EQ(h.label, "REF");
  EXPECT_EQ(discretize(h).size(), 430u);
  // Exact landing on 0.25 u_y peaks costs 0.2 u_y of path against 430 x 0.1.
  EXPECT_NEAR(path_length(h), 42.8, 1e-12);
}

TEST(Reference, StrictModeRejectsWrongLength) {
  EXPECT_THROW(reference_history(std::vector<double>{2.0, 3.0}, 1.0), DomainError);
  EXPECT_EQ(discretize(reference_history(std::vector<double>{2.0, 3.0}, 1.0, false)).size(), 200u);
}

TEST(Envelope, ShapeProperties) {
  const auto h = envelope_history(4.0, 8, 0.01);
  EXPECT_EQ(h.max_amplitude(), 4.0);
  EXPECT_GT(h.cumulative_displacement(), 4.0);
  EXPECT_LT(h.amplitudes.front(), 4.0);
  EXPECT_LT(h.amplitudes.back(), 4.0);
  const auto top = std::max_element(h.amplitudes.begin(), h.amplitudes.end());
  EXPECT_TRUE(std::is_sorted(h.amplitudes.begin(), top + 1));
  EXPECT_TRUE(std::is_sorted(top, h.amplitudes.end(), std::greater<>()));
  for (int n : {3, 5, 12}) {
    const auto e = envelope_history(2.5, n, 1.0);
    EXPECT_EQ(e.max_amplitude(), 2.5);
    EXPECT_LT(e.amplitudes.front(), 2.5);
    EXPECT_LT(e.amplitudes.back(), 2.5);
  }
}

TEST(Envelope, RejectsBadInput) {
  EXPECT_THROW(envelope_history(0.0, 8, 1.0), DomainError);
  EXPECT_THROW(envelope_history(4.0, 2, 1.0), DomainError);
}

TEST(History, ValidationErrors) {
  EXPECT_THROW(make_history({}, 1.0, "X"), DomainError);
  EXPECT_THROW(make_history({1.0, -1.0}, 1.0, "X"), DomainError);
  EXPECT_THROW(make_history({1.0}, 0.0, "X"), DomainError);
}
