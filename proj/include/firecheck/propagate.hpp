// Generic layer walk shared by every engine.
//
// All engines in this library are the same computation instantiated over a
// different value algebra: plain evaluation runs it over double, interval
// bound propagation over intervals, ray propagation over piecewise-linear
// functions of the ray parameter, and the twin consistency engine over
// coupled interval pairs. The algebra supplies three operations:
//
//   Value affine(const std::vector<AffineTerm<Value>>& terms, double bias);
//   Value relu(const Value& v);
//   Value max(const std::vector<const Value*>& items);   // items non-empty
//
// Zero-coefficient terms are dropped before affine() is called; values are
// finite by construction, so 0 * v contributes nothing.
//
// A trailing sigmoid layer is never propagated: engines reason on the logit,
// and callers that want the score apply the sigmoid to the scalar result.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "firecheck/network.hpp"

namespace firecheck {

template <class Value>
struct AffineTerm {
  double coeff;
  const Value* value;
};

namespace detail {

template <class Ops>
std::vector<typename Ops::Value> apply_dense(const DenseLayer& d,
                                             const std::vector<typename Ops::Value>& in,
                                             const Ops& ops) {
  using Value = typename Ops::Value;
  std::vector<Value> out;
  out.reserve(d.weights.size());
  std::vector<AffineTerm<Value>> terms;
  for (std::size_t i = 0; i < d.weights.size(); ++i) {
    terms.clear();
    const auto& row = d.weights[i];
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (row[j] != 0.0) terms.push_back({row[j], &in[j]});
    }
    out.push_back(ops.affine(terms, d.bias[i]));
  }
  return out;
}

template <class Ops>
std::vector<typename Ops::Value> apply_conv(const Conv2dLayer& c, const Shape& in_shape,
                                            const std::vector<typename Ops::Value>& in,
                                            const Ops& ops) {
  using Value = typename Ops::Value;
  const std::int64_t in_ch = in_shape[0], h = in_shape[1], w = in_shape[2];
  const auto out_ch = static_cast<std::int64_t>(c.kernels.size());
  const auto kh = static_cast<std::int64_t>(c.kernels[0][0].size());
  const auto kw = static_cast<std::int64_t>(c.kernels[0][0][0].size());
  const std::int64_t oh = (h - kh) / c.stride_h + 1;
  const std::int64_t ow = (w - kw) / c.stride_w + 1;

  std::vector<Value> out;
  out.reserve(static_cast<std::size_t>(out_ch * oh * ow));
  std::vector<AffineTerm<Value>> terms;
  for (std::int64_t oc = 0; oc < out_ch; ++oc) {
    for (std::int64_t oy = 0; oy < oh; ++oy) {
      for (std::int64_t ox = 0; ox < ow; ++ox) {
        terms.clear();
        for (std::int64_t ic = 0; ic < in_ch; ++ic) {
          for (std::int64_t ky = 0; ky < kh; ++ky) {
            for (std::int64_t kx = 0; kx < kw; ++kx) {
              const double coeff = c.kernels[oc][ic][ky][kx];
              if (coeff == 0.0) continue;
              const std::int64_t iy = oy * c.stride_h + ky;
              const std::int64_t ix = ox * c.stride_w + kx;
              terms.push_back({coeff, &in[static_cast<std::size_t>((ic * h + iy) * w + ix)]});
            }
          }
        }
        out.push_back(ops.affine(terms, c.bias[oc]));
      }
    }
  }
  return out;
}

template <class Ops>
std::vector<typename Ops::Value> apply_maxpool(const MaxPoolLayer& m, const Shape& in_shape,
                                               const std::vector<typename Ops::Value>& in,
                                               const Ops& ops) {
  using Value = typename Ops::Value;
  const std::int64_t ch = in_shape[0], h = in_shape[1], w = in_shape[2];
  const std::int64_t oh = (h - m.window_h) / m.stride_h + 1;
  const std::int64_t ow = (w - m.window_w) / m.stride_w + 1;

  std::vector<Value> out;
  out.reserve(static_cast<std::size_t>(ch * oh * ow));
  std::vector<const Value*> window;
  for (std::int64_t c = 0; c < ch; ++c) {
    for (std::int64_t oy = 0; oy < oh; ++oy) {
      for (std::int64_t ox = 0; ox < ow; ++ox) {
        window.clear();
        for (std::int64_t py = 0; py < m.window_h; ++py) {
          for (std::int64_t px = 0; px < m.window_w; ++px) {
            const std::int64_t iy = oy * m.stride_h + py;
            const std::int64_t ix = ox * m.stride_w + px;
            window.push_back(&in[static_cast<std::size_t>((c * h + iy) * w + ix)]);
          }
        }
        out.push_back(ops.max(window));
      }
    }
  }
  return out;
}

}  // namespace detail

// Runs the network over the supplied value algebra, stopping at the logit.
// The network must already be validated; `chain` is validate().output_shapes.
// `observe(layer_index, values)` is called after each propagated layer.
template <class Ops, class Observer>
typename Ops::Value propagate_logit_observed(const Network& net, const std::vector<Shape>& chain,
                                             std::vector<typename Ops::Value> values,
                                             const Ops& ops, Observer&& observe) {
  Shape current = net.input_shape;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const Layer& layer = net.layers[i];
    if (std::holds_alternative<SigmoidLayer>(layer)) break;  // logit semantics
    if (const auto* d = std::get_if<DenseLayer>(&layer)) {
      values = detail::apply_dense(*d, values, ops);
    } else if (const auto* c = std::get_if<Conv2dLayer>(&layer)) {
      values = detail::apply_conv(*c, current, values, ops);
    } else if (const auto* m = std::get_if<MaxPoolLayer>(&layer)) {
      values = detail::apply_maxpool(*m, current, values, ops);
    } else {
      for (auto& v : values) v = ops.relu(v);
    }
    current = chain[i];
    observe(i, values);
  }
  if (values.size() != 1) throw std::logic_error("propagation did not reduce to a single output");
  return std::move(values[0]);
}

template <class Ops>
typename Ops::Value propagate_logit(const Network& net, const std::vector<Shape>& chain,
                                    std::vector<typename Ops::Value> values, const Ops& ops) {
  return propagate_logit_observed(net, chain, std::move(values), ops,
                                  [](std::size_t, const auto&) {});
}

}  // namespace firecheck
