// Shared fixtures: the two-input reference net, random networks, random scenes.
#pragma once

#include <cstdint>
#include <vector>

#include "firecheck/network.hpp"
#include "firecheck/planting.hpp"
#include "firecheck/rng.hpp"
#include "firecheck/tensor.hpp"

namespace fcts {

using namespace firecheck;

// Two inputs -> dense(2) -> relu -> dense(1). Hand-checkable integer weights:
// eval([1,3]) = 65, eval([1,0]) = 20, eval([0,0]) = 15.
inline Network toy_network() {
  Network net;
  net.name = "toy";
  net.input_shape = {2};
  net.layers.push_back(DenseLayer{{{1.0, 3.0}, {-2.0, -1.0}}, {3.0, -1.0}});
  net.layers.push_back(ReluLayer{});
  net.layers.push_back(DenseLayer{{{5.0, -1.0}}, {0.0}});
  return net;
}

inline Tensor vec(std::vector<double> v) {
  const auto n = static_cast<std::int64_t>(v.size());
  return Tensor({n}, std::move(v));
}

struct NetGenOptions {
  bool conv = true;           // allow conv/maxpool stacks (3-D input)
  bool nonnegative = false;   // weights >= 0 (monotone-by-construction)
  bool bias_free = false;
  bool sigmoid_head = false;
};

inline double gen_weight(Rng& rng, const NetGenOptions& o) {
  return o.nonnegative ? rng.uniform(0.0, 1.0) : rng.uniform(-1.0, 1.0);
}

inline DenseLayer gen_dense(Rng& rng, std::int64_t out, std::int64_t in, const NetGenOptions& o) {
  DenseLayer d;
  d.weights.resize(static_cast<std::size_t>(out));
  for (auto& row : d.weights) {
    row.resize(static_cast<std::size_t>(in));
    for (auto& w : row) w = gen_weight(rng, o);
  }
  d.bias.assign(static_cast<std::size_t>(out), 0.0);
  if (!o.bias_free)
    for (auto& b : d.bias) b = rng.uniform(-1.0, 1.0);
  return d;
}

inline Conv2dLayer gen_conv(Rng& rng, std::int64_t out_ch, std::int64_t in_ch, std::int64_t k,
                            const NetGenOptions& o) {
  Conv2dLayer c;
  c.kernels.resize(static_cast<std::size_t>(out_ch));
  for (auto& per_in : c.kernels) {
    per_in.resize(static_cast<std::size_t>(in_ch));
    for (auto& plane : per_in) {
      plane.resize(static_cast<std::size_t>(k));
      for (auto& row : plane) {
        row.resize(static_cast<std::size_t>(k));
        for (auto& w : row) w = gen_weight(rng, o);
      }
    }
  }
  c.bias.assign(static_cast<std::size_t>(out_ch), 0.0);
  if (!o.bias_free)
    for (auto& b : c.bias) b = rng.uniform(-0.5, 0.5);
  return c;
}

// Small random nets: at most 5 parameterized layers and about 64 neurons.
inline Network random_network(Rng& rng, const NetGenOptions& o = {}) {
  Network net;
  net.name = "random";
  const bool spatial = o.conv && rng.below(2) == 0;
  if (spatial) {
    const std::int64_t ch = 1 + static_cast<std::int64_t>(rng.below(2));
    const std::int64_t h = 4 + static_cast<std::int64_t>(rng.below(2));
    const std::int64_t w = 4 + static_cast<std::int64_t>(rng.below(2));
    net.input_shape = {ch, h, w};
    const std::int64_t oc = 2 + static_cast<std::int64_t>(rng.below(2));
    net.layers.push_back(gen_conv(rng, oc, ch, 2, o));
    net.layers.push_back(ReluLayer{});
    net.layers.push_back(MaxPoolLayer{2, 2, 2, 2});
    const auto vr = validate(Network{"", net.input_shape, net.layers});
    std::int64_t flat = 1;
    if (!vr.output_shapes.empty())
      flat = shape_size(vr.output_shapes.back());
    const std::int64_t hidden = 2 + static_cast<std::int64_t>(rng.below(6));
    net.layers.push_back(gen_dense(rng, hidden, flat, o));
    net.layers.push_back(ReluLayer{});
    net.layers.push_back(gen_dense(rng, 1, hidden, o));
  } else {
    const std::int64_t in = 2 + static_cast<std::int64_t>(rng.below(7));
    net.input_shape = {in};
    std::int64_t width = in;
    const std::uint64_t hidden_layers = 1 + rng.below(2);
    for (std::uint64_t i = 0; i < hidden_layers; ++i) {
      const std::int64_t next = 2 + static_cast<std::int64_t>(rng.below(15));
      net.layers.push_back(gen_dense(rng, next, width, o));
      net.layers.push_back(ReluLayer{});
      width = next;
    }
    net.layers.push_back(gen_dense(rng, 1, width, o));
  }
  if (o.sigmoid_head) net.layers.push_back(SigmoidLayer{});
  return net;
}

inline Tensor random_tensor(Rng& rng, const Shape& shape, double lo, double hi) {
  std::vector<double> v(static_cast<std::size_t>(shape_size(shape)));
  for (auto& x : v) x = rng.uniform(lo, hi);
  return Tensor(shape, std::move(v));
}

inline Scene random_scene(Rng& rng, const Shape& shape, bool nonnegative_signal = false) {
  Tensor signal = random_tensor(rng, shape, nonnegative_signal ? 0.0 : -1.0, 1.0);
  Tensor background = random_tensor(rng, shape, -1.0, 1.0);
  return Scene(std::move(signal), std::move(background), EpsRange{0.0, 2.0});
}

}  // namespace fcts
