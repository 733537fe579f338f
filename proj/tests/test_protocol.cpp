#include <gtest/gtest.h>

#include <filesystem>

#include "bwlab/io.hpp"
#include "bwlab/protocol.hpp"
#include "common.hpp"

using namespace bwlab;
using nlohmann::json;

namespace {

const std::filesystem::path kData = BWLAB_DATA_DIR;

BwParams specimen(const std::string& name) { return params_from_json(read_json(kData / "fixtures" / name)); }

ProtocolInput bw_input(int generations, int population, std::uint64_t seed) {
  ProtocolInput in;
  in.specimen = specimen("bw_specimen.json");
  in.variant = Variant::BW;
  in.ga.generations = generations;
  in.ga.population = population;
  in.ga.seed = seed;
  return in;
}

// Dense-only model over the raw (d x 2) input with all weights zero:
// every output is sigmoid(0) = 0.5, i.e. the range midpoint.
nn::Model zero_model(std::size_t d, Category c) {
  const auto outs = nn::category_outputs(c);
  const std::size_t units = outs.size();
  json h = {{"format_version", 1},
            {"architecture", "flat"},
            {"category", std::string(to_string(c))},
            {"input_length", d},
            {"outputs", outs},
            {"normalization", {{"u_m", {{"lo", -0.1}, {"hi", 0.1}}}, {"f_mps2", {{"lo", -5.0}, {"hi", 5.0}}}}},
            {"branches", json::array({json::array()})},
            {"head",
             {{{"type", "dense"},
               {"units", units},
               {"activation", "sigmoid"},
               {"weights", {{"offset", 0}, {"shape", {2 * d, units}}}},
               {"bias", {{"offset", 2 * d * units}, {"shape", {units}}}}}}}};
  return nn::parse_model(nn::serialize_model(h, std::vector<float>(2 * d * units + units, 0.0f)));
}

}  // namespace

TEST(Protocol, RecoversBwSpecimen) {
  const ProtocolInput in = bw_input(40, 100, 7);
  const ProtocolReport r = run_protocol(in);
  EXPECT_NEAR(r.u_y, in.specimen->uy(), 0.01 * in.specimen->uy());
  EXPECT_EQ(r.history.amplitudes, (std::vector<double>{2, 2, 3, 3}));
  EXPECT_EQ(r.history_steps, 400u);
  ASSERT_TRUE(r.area_error.has_value());
  EXPECT_LT(*r.area_error, 0.1);
  EXPECT_EQ(r.estimate.variant, Variant::BW);
  EXPECT_EQ(r.estimate.zeta0, 0.0);
  const json j = to_json(r, in);
  EXPECT_EQ(j.at("validation").at("within_10pct"), true);
  EXPECT_EQ(j.at("fit").at("seed"), 7);
}

TEST(Protocol, FixedSeedIsDeterministic) {
  const ProtocolInput in = bw_input(5, 20, 3);
  EXPECT_EQ(to_json(run_protocol(in), in).dump(), to_json(run_protocol(in), in).dump());
}

TEST(Protocol, MeasuredDataMatchesVirtualSpecimen) {
  const ProtocolInput virt = bw_input(5, 20, 11);
  const BwParams& s = *virt.specimen;
  ProtocolInput meas = virt;
  meas.specimen.reset();
  meas.measured_pushover = pushover(s, virt.pushover_drift_uy * s.uy(), virt.pushover_step_uy * s.uy());
  const double uy = yield_displacement(*meas.measured_pushover);
  meas.measured_curve = simulate_quasi_static(s, discretize(optimal_history(Variant::BW, uy)));

  const ProtocolReport a = run_protocol(virt);
  const ProtocolReport b = run_protocol(meas);
  EXPECT_EQ(a.u_y, b.u_y);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_FALSE(b.area_error.has_value());
  EXPECT_TRUE(to_json(b, meas).at("validation").at("area_error").is_null());
}

TEST(Protocol, MeasuredCurveLengthMustMatch) {
  ProtocolInput in = bw_input(2, 4, 1);
  const BwParams s = *in.specimen;
  in.specimen.reset();
  in.measured_pushover = pushover(s, 10 * s.uy(), 0.01 * s.uy());
  in.measured_curve = simulate_quasi_static(s, discretize(table2_history(3, s.uy())));
  EXPECT_THROW(run_protocol(in), DomainError);
}

TEST(Protocol, NeedsSpecimenOrMeasurements) {
  ProtocolInput in;
  EXPECT_THROW(run_protocol(in), ConfigError);
  in.measured_pushover = PushoverCurve{};
  EXPECT_THROW(run_protocol(in), ConfigError);
}

TEST(Protocol, ElasticSpecimenHasNoYield) {
  ProtocolInput in = bw_input(2, 4, 1);
  in.specimen = specimen("elastic_specimen.json");
  try {
    run_protocol(in);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("no yield detected"), std::string::npos);
  }
}

TEST(Protocol, CnnEstimatorUsesWeights) {
  ProtocolInput in = bw_input(0, 0, 0);
  in.estimator = ProtocolInput::Estimator::CNN;
  in.cnn.push_back(zero_model(400, Category::BSC));
  const ProtocolReport r = run_protocol(in);
  const BwParams mid = midpoint_params(Variant::BW);
  EXPECT_NEAR(r.estimate.T, mid.T, 1e-12);
  EXPECT_NEAR(r.estimate.Fy, mid.Fy, 1e-12);
  EXPECT_NEAR(r.estimate.n, mid.n, 1e-12);
  EXPECT_FALSE(r.ga.has_value());
  EXPECT_EQ(to_json(r, in).at("estimator"), "cnn");
  ASSERT_TRUE(r.area_error.has_value());
  EXPECT_GT(r.fit_mse, 0.0);
}

TEST(Protocol, CnnRejectsWrongInputLength) {
  ProtocolInput in = bw_input(0, 0, 0);
  in.estimator = ProtocolInput::Estimator::CNN;
  in.cnn.push_back(nn::load_model(std::filesystem::path(BWLAB_TEST_DATA_DIR) / "golden_bsc.bwnn"));
  EXPECT_THROW(run_protocol(in), DomainError);
  in.cnn.clear();
  EXPECT_THROW(run_protocol(in), DomainError);
}
