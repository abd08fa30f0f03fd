// Feed-forward network description: typed layers plus shape-chain validation.
//
// A network maps a tensor of shape input_shape to a single scalar. The five
// layer kinds below are the whole algebra; every engine (plain evaluation,
// interval bounds, ray propagation) reuses this description unchanged.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "firecheck/tensor.hpp"

namespace firecheck {

// weights[i][j] multiplies input j into output i. Accepts input of any rank;
// the input is read flattened in row-major order.
struct DenseLayer {
  std::vector<std::vector<double>> weights;  // [out][in]
  std::vector<double> bias;                  // [out]
};

// Valid padding, channel-major kernels: kernels[out_ch][in_ch][kh][kw].
struct Conv2dLayer {
  std::vector<std::vector<std::vector<std::vector<double>>>> kernels;
  std::vector<double> bias;  // [out_ch]
  std::int64_t stride_h = 1;
  std::int64_t stride_w = 1;
};

struct MaxPoolLayer {
  std::int64_t window_h = 1;
  std::int64_t window_w = 1;
  std::int64_t stride_h = 1;
  std::int64_t stride_w = 1;
};

struct ReluLayer {};

// Permitted once, as the final layer only. Engines reason on the logit; the
// sigmoid is applied afterwards for score reporting.
struct SigmoidLayer {};

using Layer = std::variant<DenseLayer, Conv2dLayer, MaxPoolLayer, ReluLayer, SigmoidLayer>;

struct Network {
  std::string name;
  Shape input_shape;
  std::vector<Layer> layers;
};

inline const char* layer_kind(const Layer& layer) {
  struct Visitor {
    const char* operator()(const DenseLayer&) const { return "dense"; }
    const char* operator()(const Conv2dLayer&) const { return "conv2d"; }
    const char* operator()(const MaxPoolLayer&) const { return "maxpool"; }
    const char* operator()(const ReluLayer&) const { return "relu"; }
    const char* operator()(const SigmoidLayer&) const { return "sigmoid"; }
  };
  return std::visit(Visitor{}, layer);
}

namespace detail {

struct ShapeTransfer {
  Shape shape;         // valid when error is empty
  std::string error;
};

inline ShapeTransfer dense_output_shape(const DenseLayer& d, const Shape& in) {
  const auto out = static_cast<std::int64_t>(d.weights.size());
  if (out == 0) return {{}, "dense layer has no output rows"};
  const auto in_features = static_cast<std::int64_t>(d.weights[0].size());
  for (const auto& row : d.weights) {
    if (static_cast<std::int64_t>(row.size()) != in_features)
      return {{}, "dense weight matrix is ragged"};
  }
  if (static_cast<std::int64_t>(d.bias.size()) != out)
    return {{}, "dense bias length " + std::to_string(d.bias.size()) +
                    " does not match weight rows " + std::to_string(out)};
  if (shape_size(in) != in_features)
    return {{}, "dense expects " + std::to_string(in_features) + " inputs, got shape " + shape_str(in)};
  return {Shape{out}, ""};
}

inline ShapeTransfer conv_output_shape(const Conv2dLayer& c, const Shape& in) {
  if (in.size() != 3) return {{}, "conv2d expects a [channels, h, w] input, got shape " + shape_str(in)};
  const auto out_ch = static_cast<std::int64_t>(c.kernels.size());
  if (out_ch == 0) return {{}, "conv2d has no kernels"};
  const auto in_ch = static_cast<std::int64_t>(c.kernels[0].size());
  if (in_ch == 0 || c.kernels[0][0].empty() || c.kernels[0][0][0].empty())
    return {{}, "conv2d kernel has an empty dimension"};
  const auto kh = static_cast<std::int64_t>(c.kernels[0][0].size());
  const auto kw = static_cast<std::int64_t>(c.kernels[0][0][0].size());
  for (const auto& per_in : c.kernels) {
    if (static_cast<std::int64_t>(per_in.size()) != in_ch) return {{}, "conv2d kernel tensor is ragged"};
    for (const auto& plane : per_in) {
      if (static_cast<std::int64_t>(plane.size()) != kh) return {{}, "conv2d kernel tensor is ragged"};
      for (const auto& row : plane)
        if (static_cast<std::int64_t>(row.size()) != kw) return {{}, "conv2d kernel tensor is ragged"};
    }
  }
  if (static_cast<std::int64_t>(c.bias.size()) != out_ch)
    return {{}, "conv2d bias length does not match kernel count"};
  if (c.stride_h < 1 || c.stride_w < 1) return {{}, "conv2d stride must be >= 1"};
  if (in[0] != in_ch)
    return {{}, "conv2d expects " + std::to_string(in_ch) + " input channels, got shape " + shape_str(in)};
  const std::int64_t oh = (in[1] - kh) / c.stride_h + 1;
  const std::int64_t ow = (in[2] - kw) / c.stride_w + 1;
  if (in[1] < kh || in[2] < kw)
    return {{}, "conv2d kernel " + std::to_string(kh) + "x" + std::to_string(kw) +
                    " does not fit input " + shape_str(in)};
  return {Shape{out_ch, oh, ow}, ""};
}

inline ShapeTransfer maxpool_output_shape(const MaxPoolLayer& m, const Shape& in) {
  if (in.size() != 3) return {{}, "maxpool expects a [channels, h, w] input, got shape " + shape_str(in)};
  if (m.window_h < 1 || m.window_w < 1) return {{}, "maxpool window must be >= 1"};
  if (m.stride_h < 1 || m.stride_w < 1) return {{}, "maxpool stride must be >= 1"};
  if (in[1] < m.window_h || in[2] < m.window_w)
    return {{}, "maxpool window does not fit input " + shape_str(in)};
  const std::int64_t oh = (in[1] - m.window_h) / m.stride_h + 1;
  const std::int64_t ow = (in[2] - m.window_w) / m.stride_w + 1;
  return {Shape{in[0], oh, ow}, ""};
}

inline ShapeTransfer layer_output_shape(const Layer& layer, const Shape& in) {
  struct Visitor {
    const Shape& in;
    ShapeTransfer operator()(const DenseLayer& d) const { return dense_output_shape(d, in); }
    ShapeTransfer operator()(const Conv2dLayer& c) const { return conv_output_shape(c, in); }
    ShapeTransfer operator()(const MaxPoolLayer& m) const { return maxpool_output_shape(m, in); }
    ShapeTransfer operator()(const ReluLayer&) const { return {in, ""}; }
    ShapeTransfer operator()(const SigmoidLayer&) const { return {in, ""}; }
  };
  return std::visit(Visitor{in}, layer);
}

}  // namespace detail

struct ValidationResult {
  std::vector<std::string> errors;
  // Shape after each layer; filled as far as validation got.
  std::vector<Shape> output_shapes;

  bool ok() const { return errors.empty(); }

  std::string message() const {
    std::string out;
    for (const auto& e : errors) {
      if (!out.empty()) out += "; ";
      out += e;
    }
    return out;
  }
};

// Checks the whole shape chain plus per-layer invariants. Errors name the
// offending layer index and the expected/actual shapes.
inline ValidationResult validate(const Network& net) {
  ValidationResult result;
  for (auto d : net.input_shape) {
    if (d <= 0) {
      result.errors.push_back("input shape " + shape_str(net.input_shape) + " has a non-positive dimension");
      return result;
    }
  }
  if (net.layers.empty()) {
    result.errors.push_back("output arity != 1 or no layers: network has no layers");
    return result;
  }

  Shape current = net.input_shape;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const Layer& layer = net.layers[i];
    if (std::holds_alternative<SigmoidLayer>(layer) && i + 1 != net.layers.size()) {
      result.errors.push_back("layer " + std::to_string(i) + ": sigmoid is only permitted as the final layer");
      return result;
    }
    auto step = detail::layer_output_shape(layer, current);
    if (!step.error.empty()) {
      result.errors.push_back("layer " + std::to_string(i) + " (" + layer_kind(layer) + "): " + step.error);
      return result;
    }
    current = std::move(step.shape);
    result.output_shapes.push_back(current);
  }

  if (current != Shape{1}) {
    result.errors.push_back("output arity != 1 or no layers: final shape is " + shape_str(current) +
                            ", expected [1]");
  }
  return result;
}

inline bool has_sigmoid_head(const Network& net) {
  return !net.layers.empty() && std::holds_alternative<SigmoidLayer>(net.layers.back());
}

}  // namespace firecheck
