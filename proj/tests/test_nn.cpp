#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>

#include "bwlab/nn.hpp"
#include "common.hpp"

using namespace bwlab;

namespace {

const std::filesystem::path kDir = BWLAB_TEST_DATA_DIR;

struct Golden {
  nn::Model model;
  HysteresisCurve curve;
  std::vector<double> raw;
  nlohmann::json params;
};

Golden golden(const std::string& name) {
  Golden g;
  g.model = nn::load_model(kDir / (name + ".bwnn"));
  const nlohmann::json e = read_json(kDir / (name + ".expected.json"));
  g.curve = {e.at("u_m").get<std::vector<double>>(), e.at("f_mps2").get<std::vector<double>>()};
  g.raw = e.at("raw").get<std::vector<double>>();
  g.params = e.at("params");
  return g;
}

std::vector<unsigned char> bytes_of(const std::string& name) {
  const std::string s = read_text(kDir / (name + ".bwnn"));
  return {s.begin(), s.end()};
}

// Splits a weights file into its header and float blob.
std::pair<nlohmann::json, std::vector<float>> split(const std::vector<unsigned char>& b) {
  std::uint32_t len = 0;
  for (int k = 0; k < 4; ++k) len |= static_cast<std::uint32_t>(b[4 + k]) << (8 * k);
  nlohmann::json h = nlohmann::json::parse(b.begin() + 8, b.begin() + 8 + len);
  std::vector<float> blob((b.size() - 8 - len) / 4);
  std::memcpy(blob.data(), b.data() + 8 + len, blob.size() * 4);
  return {h, blob};
}

}  // namespace

TEST(NnGolden, ForwardPassMatchesReference) {
  for (const std::string name : {"golden_bsc", "golden_pch"}) {
    const Golden g = golden(name);
    const std::vector<float> y = g.model.forward(g.model.input_tensor(g.curve));
    ASSERT_EQ(y.size(), g.raw.size()) << name;
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], g.raw[i], 1e-5) << name << " output " << i;
    const std::vector<double> p = g.model.predict(g.curve);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const ParamBound& b = bound(g.model.outputs[i]);
      EXPECT_NEAR(p[i], g.params.at(std::string(b.name)).get<double>(), 1e-5 * (b.hi - b.lo)) << name;
    }
  }
}

TEST(NnGolden, HeaderFieldsAreRead) {
  const Golden bsc = golden("golden_bsc");
  EXPECT_EQ(bsc.model.architecture, "BSC_DGD");
  EXPECT_EQ(bsc.model.category, Category::BSC);
  EXPECT_EQ(bsc.model.input_length, 16u);
  ASSERT_EQ(bsc.model.branches.size(), 1u);
  EXPECT_EQ(bsc.model.head.size(), 3u);
  const Golden pch = golden("golden_pch");
  EXPECT_EQ(pch.model.branches.size(), 2u);
  EXPECT_EQ(pch.model.outputs.size(), 6u);
  EXPECT_EQ(pch.model.outputs.front(), ParamId::zeta0);
}

TEST(NnGolden, ZeroWeightsPredictRangeMidpoints) {
  const Golden g = golden("golden_dgd_zero");
  for (float y : g.model.forward(g.model.input_tensor(g.curve))) EXPECT_EQ(y, 0.5f);
  const std::vector<double> p = g.model.predict(g.curve);
  ASSERT_EQ(p.size(), 2u);
  EXPECT_NEAR(p[0], 0.18, 1e-12);
  EXPECT_NEAR(p[1], 0.195, 1e-12);
}

TEST(NnFormat, SerializeRoundTrip) {
  const auto [header, blob] = split(bytes_of("golden_pch"));
  const nn::Model a = nn::load_model(kDir / "golden_pch.bwnn");
  const nn::Model b = nn::parse_model(nn::serialize_model(header, blob));
  const Golden g = golden("golden_pch");
  EXPECT_EQ(a.forward(a.input_tensor(g.curve)), b.forward(b.input_tensor(g.curve)));
}

TEST(NnFormat, RejectsMalformedFiles) {
  auto bytes = bytes_of("golden_bsc");
  auto bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(nn::parse_model(bad), DomainError);
  EXPECT_THROW(nn::parse_model(std::vector<unsigned char>(bytes.begin(), bytes.begin() + 6)), DomainError);
  EXPECT_THROW(nn::parse_model(std::vector<unsigned char>(bytes.begin(), bytes.begin() + 40)), DomainError);
  // Blob not a whole number of floats, and a blob too short for the layers.
  EXPECT_THROW(nn::parse_model(std::vector<unsigned char>(bytes.begin(), bytes.end() - 1)), DomainError);
  EXPECT_THROW(nn::parse_model(std::vector<unsigned char>(bytes.begin(), bytes.end() - 4)), DomainError);

  auto [header, blob] = split(bytes);
  auto h = header;
  h["head"][0]["type"] = "lstm";
  EXPECT_THROW(nn::parse_model(nn::serialize_model(h, blob)), DomainError);
  h = header;
  h["outputs"] = {"T", "bogus"};
  EXPECT_THROW(nn::parse_model(nn::serialize_model(h, blob)), DomainError);
  h = header;
  h["format_version"] = 2;
  EXPECT_THROW(nn::parse_model(nn::serialize_model(h, blob)), DomainError);
  h = header;
  h.erase("normalization");
  EXPECT_THROW(nn::parse_model(nn::serialize_model(h, blob)), DomainError);
  h = header;
  h["head"][0]["activation"] = "tanh";
  EXPECT_THROW(nn::parse_model(nn::serialize_model(h, blob)), DomainError);
}

TEST(NnFormat, InputLengthMustMatch) {
  const Golden g = golden("golden_bsc");
  HysteresisCurve shorter = g.curve;
  shorter.u.pop_back();
  shorter.f.pop_back();
  EXPECT_THROW(g.model.predict(shorter), DomainError);
}

TEST(NnFormat, OutputWidthMustMatchOutputs) {
  auto [header, blob] = split(bytes_of("golden_bsc"));
  header["outputs"] = {"T", "Fy"};
  const nn::Model m = nn::parse_model(nn::serialize_model(header, blob));
  const Golden g = golden("golden_bsc");
  EXPECT_THROW(m.predict(g.curve), DomainError);
}

TEST(NnFormat, CategoryOutputs) {
  EXPECT_EQ(nn::category_outputs(Category::BSC), (std::vector<std::string>{"T", "Fy", "alpha", "beta", "n"}));
  EXPECT_EQ(nn::category_outputs(Category::DGD), (std::vector<std::string>{"delta_nu", "delta_eta"}));
  EXPECT_EQ(nn::category_outputs(Category::PCH).size(), 6u);
}

TEST(NnLayers, ConvSamePaddingAndPooling) {
  // 3x2 input, single 2x2 kernel of ones: "same" pads one row/column after.
  nn::Tensor x(3, 2, 1);
  float v = 1.0f;
  for (auto& d : x.data) d = v++;  // [[1,2],[3,4],[5,6]]
  nn::Layer conv;
  conv.kind = nn::Layer::Kind::Conv2d;
  conv.kh = conv.kw = 2;
  conv.cin = conv.cout = 1;
  conv.weights.assign(4, 1.0f);
  conv.bias = {0.0f};
  const nn::Tensor y = nn::conv2d_same(x, conv);
  const std::vector<float> expected{1 + 2 + 3 + 4, 2 + 4, 3 + 4 + 5 + 6, 4 + 6, 5 + 6, 6};
  EXPECT_EQ(y.data, expected);
  nn::Layer pool;
  pool.kind = nn::Layer::Kind::MaxPool2d;
  pool.ph = 2;
  pool.pw = 1;
  const nn::Tensor p = nn::maxpool_valid(y, pool);
  EXPECT_EQ(p.h, 1u);
  EXPECT_EQ(p.data, (std::vector<float>{18, 10}));
}
