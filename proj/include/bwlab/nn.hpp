// bwlab: Bouc-Wen class hysteresis toolkit
//
// Forward pass for exported CNN parameter estimators (weights.bwnn).
//
// File layout:
//   "BWNN"  uint32 LE header length  JSON header  float32 LE blob
// Header:
//   {"format_version": 1, "architecture": "BSC_DGD" | "PCH", "category": "BSC",
//    "input_length": d, "outputs": ["T", "Fy", ...],
//    "normalization": {"u_m": {"lo", "hi"}, "f_mps2": {"lo", "hi"}},
//    "branches": [[layer, ...], ...], "head": [layer, ...]}
// Every branch reads the d x 2 x 1 input (channels: displacement, force);
// branch outputs are flattened (row-major h, w, c) and concatenated, then
// fed through the dense head. Layers:
//   {"type": "conv2d", "filters": F, "kernel": [kh, kw], "activation": ...,
//    "weights": {"offset": o, "shape": [kh, kw, cin, F]}, "bias": {"offset": o, "shape": [F]}}
//   {"type": "maxpool2d", "pool": [ph, pw]}
//   {"type": "dense", "units": U, "activation": ...,
//    "weights": {"offset": o, "shape": [in, U]}, "bias": {"offset": o, "shape": [U]}}
// Offsets count float32 values from the start of the blob. Convolutions use
// "same" padding (extra row/column after), pooling uses "valid" windows.
// Outputs are in [0, 1] and denormalized by the admissible parameter bounds.
//
#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "bwlab/errors.hpp"
#include "bwlab/io.hpp"
#include "bwlab/model.hpp"
#include "bwlab/params.hpp"
#include "bwlab/sampling.hpp"

namespace bwlab::nn {

struct Tensor {
  std::size_t h = 0, w = 0, c = 0;
  std::vector<float> data;

  Tensor() = default;
  Tensor(std::size_t h_, std::size_t w_, std::size_t c_) : h(h_), w(w_), c(c_), data(h_ * w_ * c_, 0.0f) {}
  float& at(std::size_t i, std::size_t j, std::size_t k) { return data[(i * w + j) * c + k]; }
  float at(std::size_t i, std::size_t j, std::size_t k) const { return data[(i * w + j) * c + k]; }
};

enum class Activation { Linear, Relu, Sigmoid };

inline Activation parse_activation(const std::string& s) {
  if (s == "linear" || s.empty()) return Activation::Linear;
  if (s == "relu") return Activation::Relu;
  if (s == "sigmoid") return Activation::Sigmoid;
  throw DomainError("weights: unknown activation '" + s + "'");
}

inline float activate(Activation a, float x) {
  switch (a) {
    case Activation::Relu: return x > 0.0f ? x : 0.0f;
    case Activation::Sigmoid: return 1.0f / (1.0f + std::exp(-x));
    case Activation::Linear: return x;
  }
  return x;
}

struct Layer {
  enum class Kind { Conv2d, MaxPool2d, Dense } kind = Kind::Dense;
  std::size_t kh = 1, kw = 1, cin = 0, cout = 0;  // conv / dense (kh = in for dense)
  std::size_t ph = 1, pw = 1;                     // pool
  Activation act = Activation::Linear;
  std::vector<float> weights;
  std::vector<float> bias;
};

inline Tensor conv2d_same(const Tensor& x, const Layer& l) {
  if (x.c != l.cin) throw DomainError("conv2d: channel mismatch");
  Tensor y(x.h, x.w, l.cout);
  const auto pad_h = static_cast<std::ptrdiff_t>((l.kh - 1) / 2);
  const auto pad_w = static_cast<std::ptrdiff_t>((l.kw - 1) / 2);
  for (std::size_t i = 0; i < x.h; ++i)
    for (std::size_t j = 0; j < x.w; ++j)
      for (std::size_t o = 0; o < l.cout; ++o) {
        float s = l.bias[o];
        for (std::size_t a = 0; a < l.kh; ++a) {
          const std::ptrdiff_t ii = static_cast<std::ptrdiff_t>(i + a) - pad_h;
          if (ii < 0 || ii >= static_cast<std::ptrdiff_t>(x.h)) continue;
          for (std::size_t b = 0; b < l.kw; ++b) {
            const std::ptrdiff_t jj = static_cast<std::ptrdiff_t>(j + b) - pad_w;
            if (jj < 0 || jj >= static_cast<std::ptrdiff_t>(x.w)) continue;
            for (std::size_t k = 0; k < l.cin; ++k)
              s += x.at(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj), k) *
                   l.weights[((a * l.kw + b) * l.cin + k) * l.cout + o];
          }
        }
        y.at(i, j, o) = activate(l.act, s);
      }
  return y;
}

inline Tensor maxpool_valid(const Tensor& x, const Layer& l) {
  Tensor y(x.h / l.ph, x.w / l.pw, x.c);
  if (y.h == 0 || y.w == 0) throw DomainError("maxpool: input smaller than pool");
  for (std::size_t i = 0; i < y.h; ++i)
    for (std::size_t j = 0; j < y.w; ++j)
      for (std::size_t k = 0; k < x.c; ++k) {
        float m = -INFINITY;
        for (std::size_t a = 0; a < l.ph; ++a)
          for (std::size_t b = 0; b < l.pw; ++b) m = std::max(m, x.at(i * l.ph + a, j * l.pw + b, k));
        y.at(i, j, k) = m;
      }
  return y;
}

inline std::vector<float> dense(const std::vector<float>& x, const Layer& l) {
  if (x.size() != l.cin) throw DomainError("dense: input width " + std::to_string(x.size()) + " != " + std::to_string(l.cin));
  std::vector<float> y(l.cout);
  for (std::size_t o = 0; o < l.cout; ++o) {
    float s = l.bias[o];
    for (std::size_t i = 0; i < l.cin; ++i) s += x[i] * l.weights[i * l.cout + o];
    y[o] = activate(l.act, s);
  }
  return y;
}

struct Model {
  std::string architecture;
  Category category = Category::BSC;
  std::size_t input_length = 0;
  std::vector<ParamId> outputs;
  double u_lo = 0.0, u_hi = 1.0, f_lo = 0.0, f_hi = 1.0;
  std::vector<std::vector<Layer>> branches;
  std::vector<Layer> head;
  nlohmann::json header;

  /// Raw network output in [0, 1] for a normalized d x 2 input.
  std::vector<float> forward(const Tensor& input) const {
    std::vector<float> features;
    for (const auto& branch : branches) {
      Tensor x = input;
      for (const auto& l : branch) {
        if (l.kind == Layer::Kind::Conv2d) x = conv2d_same(x, l);
        else if (l.kind == Layer::Kind::MaxPool2d) x = maxpool_valid(x, l);
        else throw DomainError("weights: dense layer inside a convolutional branch");
      }
      features.insert(features.end(), x.data.begin(), x.data.end());
    }
    for (const auto& l : head) {
      if (l.kind != Layer::Kind::Dense) throw DomainError("weights: only dense layers allowed in the head");
      features = dense(features, l);
    }
    if (features.size() != outputs.size()) throw DomainError("weights: output width does not match outputs list");
    return features;
  }

  Tensor input_tensor(const HysteresisCurve& c) const {
    if (c.size() != input_length)
      throw DomainError("curve length " + std::to_string(c.size()) + " != model input length " +
                        std::to_string(input_length));
    Tensor t(input_length, 2, 1);
    for (std::size_t i = 0; i < input_length; ++i) {
      t.at(i, 0, 0) = static_cast<float>(minmax_normalize(c.u[i], u_lo, u_hi));
      t.at(i, 1, 0) = static_cast<float>(minmax_normalize(c.f[i], f_lo, f_hi));
    }
    return t;
  }

  /// Denormalized parameter estimates, in the order of `outputs`.
  std::vector<double> predict(const HysteresisCurve& c) const {
    const std::vector<float> y = forward(input_tensor(c));
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      const ParamBound& b = bound(outputs[i]);
      out[i] = minmax_denormalize(std::clamp(static_cast<double>(y[i]), 0.0, 1.0), b.lo, b.hi);
    }
    return out;
  }
};

namespace detail {

inline std::vector<float> slice(const std::vector<float>& blob, const nlohmann::json& ref, std::size_t expected) {
  const auto off = ref.at("offset").get<std::size_t>();
  std::size_t n = 1;
  for (const auto& d : ref.at("shape")) n *= d.get<std::size_t>();
  if (n != expected) throw DomainError("weights: tensor shape does not match layer");
  if (off + n > blob.size()) throw DomainError("weights: tensor extends past end of blob");
  return {blob.begin() + static_cast<std::ptrdiff_t>(off), blob.begin() + static_cast<std::ptrdiff_t>(off + n)};
}

inline Layer parse_layer(const nlohmann::json& j, const std::vector<float>& blob, std::size_t& channels,
                         std::size_t& width) {
  Layer l;
  const auto type = j.at("type").get<std::string>();
  if (type == "conv2d") {
    l.kind = Layer::Kind::Conv2d;
    l.kh = j.at("kernel").at(0).get<std::size_t>();
    l.kw = j.at("kernel").at(1).get<std::size_t>();
    l.cin = channels;
    l.cout = j.at("filters").get<std::size_t>();
    l.act = parse_activation(j.value("activation", std::string("linear")));
    l.weights = slice(blob, j.at("weights"), l.kh * l.kw * l.cin * l.cout);
    l.bias = slice(blob, j.at("bias"), l.cout);
    channels = l.cout;
  } else if (type == "maxpool2d") {
    l.kind = Layer::Kind::MaxPool2d;
    l.ph = j.at("pool").at(0).get<std::size_t>();
    l.pw = j.at("pool").at(1).get<std::size_t>();
    if (l.ph == 0 || l.pw == 0) throw DomainError("weights: zero pool size");
  } else if (type == "dense") {
    l.kind = Layer::Kind::Dense;
    l.cin = width;
    l.cout = j.at("units").get<std::size_t>();
    l.act = parse_activation(j.value("activation", std::string("linear")));
    l.weights = slice(blob, j.at("weights"), l.cin * l.cout);
    l.bias = slice(blob, j.at("bias"), l.cout);
    width = l.cout;
  } else {
    throw DomainError("weights: unknown layer type '" + type + "'");
  }
  return l;
}

}  // namespace detail

inline Model parse_model(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 8 || std::string(bytes.begin(), bytes.begin() + 4) != "BWNN")
    throw DomainError("weights: bad magic");
  std::uint32_t len = 0;
  for (int b = 0; b < 4; ++b) len |= static_cast<std::uint32_t>(bytes[4 + static_cast<std::size_t>(b)]) << (8 * b);
  if (8 + static_cast<std::size_t>(len) > bytes.size()) throw DomainError("weights: truncated header");
  const std::size_t blob_bytes = bytes.size() - 8 - len;
  if (blob_bytes % 4) throw DomainError("weights: blob is not a whole number of float32 values");
  std::vector<float> blob(blob_bytes / 4);
  for (std::size_t i = 0; i < blob.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(bytes[8 + len + 4 * i + static_cast<std::size_t>(b)]) << (8 * b);
    blob[i] = std::bit_cast<float>(bits);
  }
  Model m;
  try {
    m.header = nlohmann::json::parse(bytes.begin() + 8, bytes.begin() + 8 + len);
    const auto& h = m.header;
    if (h.at("format_version").get<int>() != 1) throw DomainError("weights: unsupported format_version");
    m.architecture = h.at("architecture").get<std::string>();
    m.category = parse_category(h.at("category").get<std::string>());
    m.input_length = h.at("input_length").get<std::size_t>();
    for (const auto& o : h.at("outputs")) m.outputs.push_back(param_id(o.get<std::string>()));
    const auto& nz = h.at("normalization");
    m.u_lo = nz.at("u_m").at("lo").get<double>();
    m.u_hi = nz.at("u_m").at("hi").get<double>();
    m.f_lo = nz.at("f_mps2").at("lo").get<double>();
    m.f_hi = nz.at("f_mps2").at("hi").get<double>();
    std::size_t width = 0;
    for (const auto& br : h.at("branches")) {
      std::size_t channels = 1, dummy = 0, rows = m.input_length, cols = 2;
      std::vector<Layer> layers;
      for (const auto& lj : br) {
        layers.push_back(detail::parse_layer(lj, blob, channels, dummy));
        if (layers.back().kind == Layer::Kind::MaxPool2d) {
          rows /= layers.back().ph;
          cols /= layers.back().pw;
        }
      }
      width += rows * cols * channels;
      m.branches.push_back(std::move(layers));
    }
    for (const auto& lj : h.at("head")) {
      std::size_t channels = 0;
      m.head.push_back(detail::parse_layer(lj, blob, channels, width));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("weights header: ") + e.what());
  } catch (const ConfigError& e) {
    throw DomainError(std::string("weights header: ") + e.what());
  }
  return m;
}

inline Model load_model(const std::filesystem::path& p) {
  const std::string s = read_text(p);
  return parse_model(std::vector<unsigned char>(s.begin(), s.end()));
}

/// Serializes header + blob. Used to produce fixtures and by tests.
inline std::vector<unsigned char> serialize_model(const nlohmann::json& header, const std::vector<float>& blob) {
  const std::string h = header.dump();
  std::vector<unsigned char> out{'B', 'W', 'N', 'N'};
  const auto len = static_cast<std::uint32_t>(h.size());
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>((len >> (8 * b)) & 0xffu));
  out.insert(out.end(), h.begin(), h.end());
  for (float f : blob) {
    const auto bits = std::bit_cast<std::uint32_t>(f);
    for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xffu));
  }
  return out;
}

/// Parameter names predicted for a category.
inline std::vector<std::string> category_outputs(Category c) {
  std::vector<std::string> out;
  for (const auto& b : kBounds)
    if (b.category == c) out.emplace_back(b.name);
  return out;
}

}  // namespace bwlab::nn
